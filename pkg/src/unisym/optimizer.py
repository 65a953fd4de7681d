"""Parameter-free Riemannian ascent on the unitary-symmetric manifold,
plus an Armijo line-search ascent on the plain unitary manifold used by
the projection baseline.

The main loop per iteration: Euclidean gradient at the current point,
tangent projection to get the real symmetric direction R, eigendecompose
R to open a geodesic frame, seed the frame phases with the gradient-step
values, maximize the objective over each phase one coordinate at a time,
then move with the multiplicative factor update. No step size is ever
chosen.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .manifold import (
    DRIFT_TOL,
    GeodesicFrame,
    UPoint,
    UsPoint,
    u_geodesic,
    u_tangent_project,
    us_geodesic_frame,
    us_point_at,
    us_retract,
    us_tangent_project,
)

ARMIJO_CONTRACTION = 0.5
ARMIJO_SUFFICIENT_INCREASE = 1e-4
ARMIJO_MAX_BACKTRACKS = 30


class Objective:
    """Contract the optimizers expect.

    eval(point) returns the objective value in nats; euclid_grad(point)
    returns the ambient-space gradient J, consistent with eval under the
    real trace inner product (directional derivative along a tangent B is
    Re tr(J^H B)). phase_maximizer, when overridden with a callable,
    must return an argmax of the objective over frame phase m holding the
    others fixed, and may never decrease the objective.
    """

    phase_maximizer = None

    def eval(self, point) -> float:
        raise NotImplementedError

    def euclid_grad(self, point) -> np.ndarray:
        raise NotImplementedError


@dataclass
class OptimizerConfig:
    epsilon: float = 1e-3        # stop when |F_k - F_{k-1}| < epsilon
    max_iters: int = 100
    sweeps_per_iter: int = 1     # phase-sweep passes per outer iteration
    fallback_grid: int = 360     # grid size of the scalar phase search
    check_gradient: bool = False  # debug: finite-difference gradient audit

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.sweeps_per_iter < 1:
            raise ValueError("sweeps_per_iter must be >= 1")
        if self.fallback_grid < 8:
            raise ValueError("fallback_grid must be >= 8")


@dataclass
class IterationRecord:
    k: int
    value: float        # objective, nats
    grad_norm: float    # ||R||_F (or ||S||_F on U(n)); nan for the k=0 row
    wall_ms: float      # whole-iteration wall time
    core_ms: float      # gradient + projection + eigendecomposition + update
    sweeps: int
    residual: float     # manifold residual of the iterate


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    status: str = "max_iters"    # converged | max_iters | stalled

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    @property
    def final_value(self) -> float:
        return self.records[-1].value

    @property
    def iterations(self) -> int:
        return self.records[-1].k

    @property
    def final_grad_norm(self) -> float:
        return self.records[-1].grad_norm

    def is_monotone(self) -> bool:
        v = self.values
        return bool(np.all(np.diff(v) >= 0))


def _audit_gradient(obj: Objective, P: UsPoint, direction, J, f0: float) -> None:
    """Central finite-difference check of euclid_grad along the projected
    gradient's own geodesic. Raises on inconsistency."""
    bnorm = float(np.linalg.norm(direction.R))
    if bnorm < 1e-12:
        return
    frame = us_geodesic_frame(P, direction)
    h = 1e-6 * float(np.linalg.norm(P.U)) / bnorm
    f_plus = obj.eval(us_point_at(frame, frame.theta * h))
    f_minus = obj.eval(us_point_at(frame, frame.theta * (-h)))
    fd = (f_plus - f_minus) / (2 * h)
    B = direction.embed(P)
    expected = float(np.real(np.trace(J.conj().T @ B)))
    if abs(fd - expected) > 1e-5 * max(abs(expected), abs(fd), 1e-8):
        raise ValueError(
            f"euclid_grad inconsistent with eval: finite difference {fd:.8e} "
            f"vs inner product {expected:.8e}")


def _scalar_phase_argmax(obj: Objective, Fr: GeodesicFrame, theta: np.ndarray,
                         m: int, grid: int) -> float:
    """Grid search over (-pi, pi] plus golden-section refinement for one
    phase, holding the others fixed. Never returns a worse phase than the
    current theta[m]."""
    def f_of(phi: float) -> float:
        t = theta.copy()
        t[m] = phi
        return obj.eval(us_point_at(Fr, t))

    phis = -np.pi + 2 * np.pi * (np.arange(1, grid + 1)) / grid
    vals = np.array([f_of(p) for p in phis])
    f_cur = f_of(theta[m])
    i = int(np.argmax(vals))
    best_phi, best_val = theta[m], f_cur
    if vals[i] > best_val:
        best_phi, best_val = phis[i], vals[i]
    # refine around the best grid point when it strictly beats its neighbors
    left, right = vals[(i - 1) % grid], vals[(i + 1) % grid]
    if vals[i] > left and vals[i] > right:
        step = 2 * np.pi / grid
        try:
            res = minimize_scalar(lambda p: -f_of(p),
                                  bracket=(phis[i] - step, phis[i], phis[i] + step),
                                  method="golden", options={"xtol": 1e-10})
            if -res.fun > best_val:
                best_phi, best_val = float(res.x), float(-res.fun)
        except ValueError:
            pass
    return best_phi


def phase_sweep(obj: Objective, Fr: GeodesicFrame, theta0: np.ndarray,
                cfg: OptimizerConfig) -> np.ndarray:
    """One coordinate-ascent pass over the frame phases.

    Coordinates are updated in ascending index order, each maximization
    holding the others at their already-updated values. Each update starts
    from (and can keep) the current value, so the objective never
    decreases along the pass.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    if theta.shape != (Fr.n,):
        raise ValueError(f"theta0 has shape {theta.shape}, expected ({Fr.n},)")
    maximizer = obj.phase_maximizer if callable(obj.phase_maximizer) else None
    for m in range(Fr.n):
        if maximizer is not None:
            theta[m] = float(maximizer(Fr, theta, m))
        else:
            theta[m] = _scalar_phase_argmax(obj, Fr, theta, m, cfg.fallback_grid)
    return theta


def optimize_us(obj: Objective, U0: UsPoint,
                cfg: OptimizerConfig | None = None) -> tuple[UsPoint, IterationTrace]:
    """Ascent on the unitary-symmetric manifold without step-size tuning.

    Per iteration: J = euclid_grad, project to R, open the geodesic frame
    of R, run phase sweeps seeded with the frame's own gradient-step
    phases, and take the new point with its multiplicatively updated
    factor. The seeded pass can in principle end below the current value;
    when that happens the sweeps are redone from the all-zeros phase
    vector, which reproduces the current point and therefore cannot lose
    ground. Stops when |F_k - F_{k-1}| < epsilon or at max_iters.

    Returns the final point and a per-iteration trace with monotone values.
    """
    cfg = cfg or OptimizerConfig()
    if U0.max_residual() > DRIFT_TOL:
        raise ValueError(f"U0 is off the manifold: residual {U0.max_residual():.3e}")
    P = U0
    F_prev = float(obj.eval(P))
    trace = IterationTrace()
    trace.records.append(IterationRecord(
        k=0, value=F_prev, grad_norm=math.nan, wall_ms=0.0, core_ms=0.0,
        sweeps=0, residual=P.max_residual()))
    for k in range(1, cfg.max_iters + 1):
        t_start = time.perf_counter()
        J = obj.euclid_grad(P)
        D = us_tangent_project(P, J)
        grad_norm = D.norm()
        if cfg.check_gradient and k == 1:
            _audit_gradient(obj, P, D, J, F_prev)
        Fr = us_geodesic_frame(P, D)
        core = time.perf_counter() - t_start

        def swept_point(theta0: np.ndarray):
            nonlocal core
            theta = theta0
            for _ in range(cfg.sweeps_per_iter):
                theta = phase_sweep(obj, Fr, theta, cfg)
            t_update = time.perf_counter()
            if np.any(theta):
                cand = us_point_at(Fr, theta)
            else:
                cand = P  # nothing moved; keep the exact current point
            core += time.perf_counter() - t_update
            r = cand.max_residual()
            if r > DRIFT_TOL:
                cand = us_retract((cand.U + cand.U.T) / 2.0)
                r = cand.max_residual()
            return cand, float(obj.eval(cand)), r

        seed = np.mod(Fr.theta + np.pi, 2.0 * np.pi) - np.pi
        P_new, F_new, res = swept_point(seed)
        if F_new < F_prev:
            # the gradient-step seed overshot; redo from the current point
            P_new, F_new, res = swept_point(np.zeros(Fr.n))
        wall_ms = (time.perf_counter() - t_start) * 1e3
        if F_new < F_prev:
            # roundoff-level regression: refuse the move and stop
            trace.records.append(IterationRecord(
                k=k, value=F_prev, grad_norm=grad_norm, wall_ms=wall_ms,
                core_ms=core * 1e3, sweeps=cfg.sweeps_per_iter,
                residual=P.max_residual()))
            trace.status = "converged"
            return P, trace
        P = P_new
        trace.records.append(IterationRecord(
            k=k, value=F_new, grad_norm=grad_norm, wall_ms=wall_ms,
            core_ms=core * 1e3, sweeps=cfg.sweeps_per_iter, residual=res))
        if abs(F_new - F_prev) < cfg.epsilon:
            trace.status = "converged"
            return P, trace
        F_prev = F_new
    trace.status = "max_iters"
    return P, trace


def optimize_u_armijo(obj: Objective, U0: UPoint,
                      cfg: OptimizerConfig | None = None) -> tuple[UPoint, IterationTrace]:
    """Riemannian gradient ascent on U(n) with Armijo backtracking.

    The baseline this supports deliberately needs what the symmetric-
    manifold method does not: an initial step (1), a contraction factor
    (0.5), a sufficient-increase coefficient (1e-4), and a backtrack cap
    (30). Stops on |F_k - F_{k-1}| < epsilon, max_iters, or line-search
    failure (status "stalled").
    """
    cfg = cfg or OptimizerConfig()
    if U0.unitarity_residual() > DRIFT_TOL:
        raise ValueError(f"U0 is not unitary: residual {U0.unitarity_residual():.3e}")
    P = U0
    F_prev = float(obj.eval(P))
    trace = IterationTrace()
    trace.records.append(IterationRecord(
        k=0, value=F_prev, grad_norm=math.nan, wall_ms=0.0, core_ms=0.0,
        sweeps=0, residual=P.unitarity_residual()))
    for k in range(1, cfg.max_iters + 1):
        t_start = time.perf_counter()
        J = obj.euclid_grad(P)
        S = u_tangent_project(P, J)
        grad_norm = float(np.linalg.norm(S))
        slope = grad_norm ** 2  # <J, U S>_Re for the projected direction
        t = 1.0
        accepted = False
        P_try, F_try = P, F_prev
        for _ in range(ARMIJO_MAX_BACKTRACKS + 1):
            P_try = u_geodesic(P, S, t)
            F_try = float(obj.eval(P_try))
            if F_try >= F_prev + ARMIJO_SUFFICIENT_INCREASE * t * slope:
                accepted = True
                break
            t *= ARMIJO_CONTRACTION
        wall_ms = (time.perf_counter() - t_start) * 1e3
        if not accepted:
            trace.records.append(IterationRecord(
                k=k, value=F_prev, grad_norm=grad_norm, wall_ms=wall_ms,
                core_ms=wall_ms, sweeps=0, residual=P.unitarity_residual()))
            trace.status = "stalled"
            return P, trace
        res = P_try.unitarity_residual()
        if res > DRIFT_TOL:
            u, _, vh = np.linalg.svd(P_try.U)
            P_try = UPoint(U=u @ vh)
            res = P_try.unitarity_residual()
        P = P_try
        trace.records.append(IterationRecord(
            k=k, value=F_try, grad_norm=grad_norm, wall_ms=wall_ms,
            core_ms=wall_ms, sweeps=0, residual=res))
        if abs(F_try - F_prev) < cfg.epsilon:
            trace.status = "converged"
            return P, trace
        F_prev = F_try
    trace.status = "max_iters"
    return P, trace
