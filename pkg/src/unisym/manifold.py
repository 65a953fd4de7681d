"""Geometry of the manifold of unitary symmetric matrices.

The feasible set is Us = {U : U U^H = I, U = U^T}. Every point carries a
cached factor Q with U = Q Q^T (a Takagi factor of U), which makes tangent
projection, geodesics, and the multiplicative phase update cheap: iterative
callers update Q instead of re-factorizing U each step, and refresh it from
a fresh Takagi factorization only when the residuals drift.

The few operations on the plain unitary manifold needed by the projection
baseline (tangent projection and geodesic steps on U(n)) live here too.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import eig_real_symmetric, expm_skew_hermitian, takagi

# Residual level above which a cached factor is considered stale and the
# point is refreshed by re-factorization.
DRIFT_TOL = 1e-8


class RetractionNonUniqueWarning(UserWarning):
    """The retracted matrix had (near-)zero singular values, so the closest
    unitary symmetric matrix may not be unique. A valid choice is still
    returned."""


class PointResiduals(NamedTuple):
    unitary: float        # ||U U^H - I||_F
    symmetry: float       # ||U - U^T||_F
    factor: float         # ||Q Q^T - U||_F
    factor_unitary: float  # ||Q Q^H - I||_F


@dataclass(frozen=True, eq=False)
class UsPoint:
    """A unitary symmetric matrix U together with a factor Q, U = Q Q^T."""

    U: np.ndarray
    Q: np.ndarray

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def residuals(self) -> PointResiduals:
        eye = np.eye(self.n)
        return PointResiduals(
            unitary=float(np.linalg.norm(self.U @ self.U.conj().T - eye)),
            symmetry=float(np.linalg.norm(self.U - self.U.T)),
            factor=float(np.linalg.norm(self.Q @ self.Q.T - self.U)),
            factor_unitary=float(np.linalg.norm(self.Q @ self.Q.conj().T - eye)),
        )

    def max_residual(self) -> float:
        return max(self.residuals())


@dataclass(frozen=True, eq=False)
class TangentDirection:
    """Tangent vector at a UsPoint, stored by its real symmetric parameter R.

    The embedded ambient vector is B = j Q R Q^T.
    """

    R: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        object.__setattr__(self, "R", (R + R.T) / 2.0)

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def embed(self, P: "UsPoint") -> np.ndarray:
        """Ambient-space tangent matrix j Q R Q^T at the point P."""
        return 1j * (P.Q @ self.R @ P.Q.T)

    def norm(self) -> float:
        return float(np.linalg.norm(self.R))


@dataclass(frozen=True, eq=False)
class GeodesicFrame:
    """Frame for the geodesic through a point along a tangent direction.

    With R = V diag(theta) V^T, the frame stores QR = Q V and theta; the
    geodesic is U(mu) = QR diag(e^{j theta mu}) QR^T, reached through
    us_point_at.
    """

    QR: np.ndarray
    theta: np.ndarray

    @property
    def n(self) -> int:
        return self.QR.shape[0]


@dataclass(frozen=True, eq=False)
class UPoint:
    """A point of the plain unitary manifold U(n)."""

    U: np.ndarray

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def unitarity_residual(self) -> float:
        return float(np.linalg.norm(self.U @ self.U.conj().T - np.eye(self.n)))


def point_from_factor(Q: np.ndarray) -> UsPoint:
    """UsPoint built from a unitary factor Q, with U = Q Q^T."""
    return UsPoint(U=Q @ Q.T, Q=Q)


def as_matrix(point) -> np.ndarray:
    """The ambient matrix of a UsPoint/UPoint, or a plain ndarray unchanged."""
    if isinstance(point, (UsPoint, UPoint)):
        return point.U
    return np.asarray(point)


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix with
    phase normalization of the triangular factor's diagonal."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R).copy()
    d[np.abs(d) == 0] = 1.0
    return Q * (d / np.abs(d))[np.newaxis, :]


def us_random(n: int, seed) -> UsPoint:
    """Random point of Us, distributed as Q0 Q0^T with Q0 Haar unitary.

    Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    Q = _haar_unitary(n, np.random.default_rng(seed))
    return point_from_factor(Q)


def u_random(n: int, seed) -> UPoint:
    """Haar-random point of the plain unitary manifold. Deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return UPoint(U=_haar_unitary(n, np.random.default_rng(seed)))


def us_tangent_project(P: UsPoint, J: np.ndarray) -> TangentDirection:
    """Orthogonal projection of an ambient matrix J onto the tangent space at P.

    Under the real trace inner product the projection has parameter
    R = Imag(Q^H (J + J^T) Q^*) / 2, the least-squares-closest tangent
    vector to J.
    """
    J = np.asarray(J)
    if J.shape != P.U.shape:
        raise ValueError(f"J has shape {J.shape}, expected {P.U.shape}")
    M = P.Q.conj().T @ (J + J.T) @ P.Q.conj()
    return TangentDirection(R=M.imag / 2.0)


def us_geodesic_frame(P: UsPoint, D: TangentDirection) -> GeodesicFrame:
    """Eigendecompose the direction and return the frame of its geodesic.

    With D.R = V diag(theta) V^T, the geodesic from P along D is
    U(mu) = (Q V) diag(e^{j theta mu}) (Q V)^T.
    """
    if D.n != P.n:
        raise ValueError(f"direction dimension {D.n} != point dimension {P.n}")
    V, theta = eig_real_symmetric(D.R)
    return GeodesicFrame(QR=P.Q @ V, theta=theta)


def us_point_at(Fr: GeodesicFrame, phases: np.ndarray) -> UsPoint:
    """Point of Us at the given per-axis phases in a geodesic frame.

    U = QR diag(e^{j phi}) QR^T, with the cached factor updated
    multiplicatively as Q = QR diag(e^{j phi / 2}).
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (Fr.n,):
        raise ValueError(f"phases have shape {phases.shape}, expected ({Fr.n},)")
    Q = Fr.QR * np.exp(0.5j * phases)[np.newaxis, :]
    return point_from_factor(Q)


def us_retract(A: np.ndarray, singular_tol: float = 1e-12) -> UsPoint:
    """Closest point of Us to a complex symmetric matrix A (Frobenius norm).

    Computed as Q Q^T from the Takagi factorization A = Q diag(sigma) Q^T.
    When sigma_min <= singular_tol * sigma_max the nearest point may not be
    unique; a RetractionNonUniqueWarning is emitted and one valid choice
    returned.
    """
    Q, sigma = takagi(A)
    if sigma.size and sigma[-1] <= singular_tol * sigma[0]:
        warnings.warn(
            f"retraction target has sigma_min={sigma[-1]:.3e} <= "
            f"{singular_tol:g}*sigma_max; nearest point may not be unique",
            RetractionNonUniqueWarning, stacklevel=2)
    return point_from_factor(Q)


def u_tangent_project(P: UPoint, J: np.ndarray) -> np.ndarray:
    """Skew-Hermitian S with U S the tangent projection of J at U on U(n)."""
    J = np.asarray(J)
    if J.shape != P.U.shape:
        raise ValueError(f"J has shape {J.shape}, expected {P.U.shape}")
    return (P.U.conj().T @ J - J.conj().T @ P.U) / 2.0


def u_geodesic(P: UPoint, S: np.ndarray, mu: float) -> UPoint:
    """Geodesic step U exp(mu S) on U(n) along skew-Hermitian S."""
    return UPoint(U=P.U @ expm_skew_hermitian(mu * np.asarray(S)))
