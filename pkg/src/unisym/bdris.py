"""BD-RIS-assisted MIMO link: channel model, achievable-rate objective,
closed-form per-phase updates, and the two reference baselines.

The reconfigurable surface response is a unitary symmetric matrix Theta;
the equivalent channel is H_eq = Hd + F Theta G^H and the objective is
the achievable rate ln det(I + rho H_eq H_eq^H) in nats (bits exposed as
nats / ln 2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .linalg import NumericalError
from .manifold import (
    GeodesicFrame,
    RetractionNonUniqueWarning,
    UPoint,
    UsPoint,
    as_matrix,
    us_retract,
)
from .optimizer import IterationTrace, Objective, OptimizerConfig, optimize_u_armijo

LN2 = math.log(2.0)


class InapplicableMethodError(RuntimeError):
    """The requested method cannot run on this scenario (e.g. it needs a
    direct link that is blocked)."""


@dataclass(frozen=True)
class Scenario:
    """Geometry and link budget of one simulated deployment.

    rho is the transmit SNR P/sigma^2 as a linear factor; pl0_db the
    reference path loss at 1 m. The Rician factor applies to both
    RIS-side links; the direct link is Rayleigh and can be zeroed out
    entirely with direct_blocked.
    """

    nt: int = 4
    nr: int = 4
    m: int = 64
    tx_pos: tuple[float, float, float] = (0.0, 0.0, 1.5)
    rx_pos: tuple[float, float, float] = (50.0, 0.0, 1.5)
    ris_pos: tuple[float, float, float] = (50.0, 3.0, 3.0)
    k_rician: float = 3.0
    alpha_ris: float = 2.0
    alpha_direct: float = 3.75
    rho: float = 1e13
    pl0_db: float = 50.0
    direct_blocked: bool = False

    def __post_init__(self):
        if min(self.nt, self.nr, self.m) < 1:
            raise ValueError("antenna and element counts must be >= 1")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.alpha_ris <= 0 or self.alpha_direct <= 0:
            raise ValueError("path-loss exponents must be > 0")
        if self.k_rician < 0:
            raise ValueError("k_rician must be >= 0")
        for name in ("tx_pos", "rx_pos", "ris_pos"):
            p = getattr(self, name)
            if len(p) != 3:
                raise ValueError(f"{name} must have 3 coordinates")

    def with_elements(self, m: int) -> "Scenario":
        return replace(self, m=m)


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization: direct link Hd (nr x nt), RIS-to-Rx link
    F (nr x m), Tx-to-RIS link G (nt x m, enters the model as G^H)."""

    Hd: np.ndarray
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        for name in ("Hd", "F", "G"):
            A = getattr(self, name)
            if not np.all(np.isfinite(A)):
                raise ValueError(f"channel matrix {name} has non-finite entries")
        if self.Hd.shape[0] != self.F.shape[0] or self.Hd.shape[1] != self.G.shape[0]:
            raise ValueError("inconsistent channel dimensions")
        if self.F.shape[1] != self.G.shape[1]:
            raise ValueError("F and G disagree on the element count")

    @property
    def m(self) -> int:
        return self.F.shape[1]


def _dist(a, b) -> float:
    d = float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    if d == 0.0:
        raise ValueError("coincident node positions")
    return d


def link_distances(sc: Scenario) -> tuple[float, float, float]:
    """(Tx-RIS, RIS-Rx, Tx-Rx) distances in meters."""
    return (_dist(sc.tx_pos, sc.ris_pos),
            _dist(sc.ris_pos, sc.rx_pos),
            _dist(sc.tx_pos, sc.rx_pos))


def path_loss(d: float, alpha: float, pl0_db: float) -> float:
    """Linear power path loss 10^(-pl0_db/10) * d^(-alpha)."""
    return 10.0 ** (-pl0_db / 10.0) * d ** (-alpha)


def ula_steering(n: int, azimuth: float) -> np.ndarray:
    """Steering vector of an n-element half-wavelength ULA at the given
    azimuth: entries e^{j pi sin(az) k}, k = 0..n-1."""
    return np.exp(1j * np.pi * np.sin(azimuth) * np.arange(n))


def _azimuth(p_from, p_to) -> float:
    d = np.asarray(p_to, float) - np.asarray(p_from, float)
    return float(np.arctan2(d[1], d[0]))


def los_components(sc: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (infinite-Rician-factor) limits of F and G, including
    the path-loss scaling: rank-one products of ULA steering vectors along
    the connecting rays."""
    d_tr, d_rr, _ = link_distances(sc)
    a_rx = ula_steering(sc.nr, _azimuth(sc.rx_pos, sc.ris_pos))
    a_ris_rx = ula_steering(sc.m, _azimuth(sc.ris_pos, sc.rx_pos))
    F_los = math.sqrt(path_loss(d_rr, sc.alpha_ris, sc.pl0_db)) * np.outer(a_rx, a_ris_rx.conj())
    a_tx = ula_steering(sc.nt, _azimuth(sc.tx_pos, sc.ris_pos))
    a_ris_tx = ula_steering(sc.m, _azimuth(sc.ris_pos, sc.tx_pos))
    G_los = math.sqrt(path_loss(d_tr, sc.alpha_ris, sc.pl0_db)) * np.outer(a_tx, a_ris_tx.conj())
    return F_los, G_los


def _crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def gen_channels(sc: Scenario, seed) -> ChannelSet:
    """Draw one channel realization, deterministic per seed.

    RIS links are Rician with factor k_rician around the steering-vector
    LOS components; the direct link is Rayleigh with its own path-loss
    exponent and is zeroed exactly when blocked (the draw still happens
    so the stream stays aligned between blocked and unblocked runs).
    """
    rng = np.random.default_rng(seed)
    d_tr, d_rr, d_td = link_distances(sc)
    F_los, G_los = los_components(sc)
    c_los = math.sqrt(sc.k_rician / (sc.k_rician + 1.0))
    c_nlos = math.sqrt(1.0 / (sc.k_rician + 1.0))
    sqrt_pl_f = math.sqrt(path_loss(d_rr, sc.alpha_ris, sc.pl0_db))
    sqrt_pl_g = math.sqrt(path_loss(d_tr, sc.alpha_ris, sc.pl0_db))
    F = c_los * F_los + c_nlos * sqrt_pl_f * _crandn(rng, sc.nr, sc.m)
    G = c_los * G_los + c_nlos * sqrt_pl_g * _crandn(rng, sc.nt, sc.m)
    Hd = math.sqrt(path_loss(d_td, sc.alpha_direct, sc.pl0_db)) * _crandn(rng, sc.nr, sc.nt)
    if sc.direct_blocked:
        Hd = np.zeros((sc.nr, sc.nt), dtype=complex)
    return ChannelSet(Hd=Hd, F=F, G=G)


def h_eq(ch: ChannelSet, Theta) -> np.ndarray:
    """Equivalent end-to-end channel Hd + F Theta G^H."""
    U = as_matrix(Theta)
    if U.shape != (ch.m, ch.m):
        raise ValueError(f"Theta has shape {U.shape}, expected ({ch.m}, {ch.m})")
    return ch.Hd + ch.F @ U @ ch.G.conj().T


def rate(ch: ChannelSet, Theta, rho: float) -> float:
    """Achievable rate ln det(I + rho H_eq H_eq^H) in nats, via Cholesky."""
    if rho <= 0:
        raise ValueError("rho must be > 0")
    H = h_eq(ch, Theta)
    E = np.eye(H.shape[0]) + rho * (H @ H.conj().T)
    try:
        L = np.linalg.cholesky((E + E.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"rate argument lost positive definiteness: {exc}") from exc
    return float(2.0 * np.sum(np.log(np.real(np.diag(L)))))


def rate_bits(ch: ChannelSet, Theta, rho: float) -> float:
    return rate(ch, Theta, rho) / LN2


def euclid_grad(ch: ChannelSet, Theta, rho: float) -> np.ndarray:
    """Ambient gradient of the rate at Theta under the real trace metric.

    The conjugate-Wirtinger derivative of ln det E is rho F^H E^-1 H_eq G;
    the directional derivative along a perturbation D of Theta is twice
    its real inner product with D, so the metric gradient returned here
    carries the factor 2. E^-1 is applied through Cholesky solves.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    H = h_eq(ch, Theta)
    E = np.eye(H.shape[0]) + rho * (H @ H.conj().T)
    cho = cho_factor((E + E.conj().T) / 2.0, lower=True)
    X = cho_solve(cho, H)
    return 2.0 * rho * (ch.F.conj().T @ X @ ch.G)


def _phase_argmax(Hd: np.ndarray, Uc: np.ndarray, Wc: np.ndarray,
                  theta: np.ndarray, m: int, rho: float) -> float:
    """Optimal phase of one frame axis with the others held fixed.

    With u, w the m-th columns of Uc = F QR and Wc = G* QR, the varying
    part of the channel is e^{j phi} u w^T on top of C (direct link plus
    the other axes at their current phases). The determinant reduces to
    const + ln(|1 + alpha e^{j phi}|^2 - kappa), maximized at -arg(alpha).
    """
    u = Uc[:, m]
    w = Wc[:, m]
    ph = np.exp(1j * theta)
    ph[m] = 0.0
    C = Hd + (Uc * ph[np.newaxis, :]) @ Wc.T
    nr = Hd.shape[0]
    Mmat = np.eye(nr) + rho * (C @ C.conj().T
                               + float(np.real(w.conj() @ w)) * np.outer(u, u.conj()))
    cho = cho_factor((Mmat + Mmat.conj().T) / 2.0, lower=True)
    ctil = rho * (C @ w.conj())
    x_u = cho_solve(cho, u)
    x_c = cho_solve(cho, ctil)
    alpha = complex(ctil.conj() @ x_u)
    kappa = float(np.real(ctil.conj() @ x_c)) * float(np.real(u.conj() @ x_u))
    margin = (1.0 - abs(alpha)) ** 2 - kappa
    if margin <= 0.0:
        raise NumericalError(
            f"per-phase determinant term lost positivity: margin {margin:.3e} "
            f"(|alpha|={abs(alpha):.3e}, kappa={kappa:.3e})")
    if abs(alpha) < 1e-14:
        return float(theta[m])
    return float(-np.angle(alpha))


def per_phase_opt(ch: ChannelSet, Fr: GeodesicFrame, theta: np.ndarray,
                  m: int, rho: float) -> float:
    """Closed-form argmax of the rate over frame phase m, others fixed.

    Never returns a phase worse than theta[m]; flat axes (e.g. a column
    annihilated by F) keep their current phase.
    """
    theta = np.asarray(theta, dtype=float)
    if not 0 <= m < Fr.n:
        raise ValueError(f"phase index {m} out of range for n={Fr.n}")
    Uc = ch.F @ Fr.QR
    Wc = ch.G.conj() @ Fr.QR
    return _phase_argmax(ch.Hd, Uc, Wc, theta, m, rho)


class RateObjective(Objective):
    """Achievable-rate objective over the surface response.

    Usable both on the unitary-symmetric manifold (with the closed-form
    phase maximizer) and on the plain unitary manifold for the projection
    baseline. A single instance caches per-frame products and is meant
    for one optimization run at a time; concurrent runs should each own
    an instance.
    """

    def __init__(self, channels: ChannelSet, rho: float):
        self.channels = channels
        self.rho = float(rho)
        self._frame_cache: Optional[tuple] = None

    def eval(self, point) -> float:
        return rate(self.channels, point, self.rho)

    def euclid_grad(self, point) -> np.ndarray:
        return euclid_grad(self.channels, point, self.rho)

    def phase_maximizer(self, Fr: GeodesicFrame, theta: np.ndarray, m: int) -> float:
        cache = self._frame_cache
        if cache is None or cache[0] is not Fr:
            cache = (Fr, self.channels.F @ Fr.QR, self.channels.G.conj() @ Fr.QR)
            self._frame_cache = cache
        return _phase_argmax(self.channels.Hd, cache[1], cache[2],
                             np.asarray(theta, dtype=float), m, self.rho)


def low_cost_bdris(ch: ChannelSet) -> UsPoint:
    """Training-free surface: retraction of F^H Hd G + its transpose.

    Needs a live direct link; raises InapplicableMethodError when Hd = 0.
    The retracted matrix has rank at most 2 min(nr, nt), so for m beyond
    that the nearest point is inherently non-unique; the retraction's
    non-uniqueness warning is expected and silenced here.
    """
    if not np.any(ch.Hd):
        raise InapplicableMethodError("low-cost surface needs a direct link (Hd is zero)")
    A = ch.F.conj().T @ ch.Hd @ ch.G
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RetractionNonUniqueWarning)
        return us_retract(A + A.T)


def mo_u_proj_baseline(ch: ChannelSet, rho: float, U0: UPoint,
                       cfg: OptimizerConfig | None = None) -> tuple[UsPoint, IterationTrace]:
    """Optimize over plain unitary matrices, then project to the feasible set.

    Runs the Armijo ascent on U(m) with the same rate objective and
    returns the retraction of Theta_u + Theta_u^T together with the
    ascent's trace.
    """
    obj = RateObjective(ch, rho)
    Pu, trace = optimize_u_armijo(obj, U0, cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RetractionNonUniqueWarning)
        P = us_retract(Pu.U + Pu.U.T)
    return P, trace
