"""Dense complex linear-algebra kernels used by the geometry layer.

All routines are pure functions of their ndarray inputs and fix their
branch cuts (principal square roots, eigenphase halving) so downstream
code gets deterministic factors. Contracts are residual bounds, checked
by the callers' tests rather than re-verified on every call.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg


class NumericalError(RuntimeError):
    """A kernel could not certify its output to the required tolerance."""


class SvdFactors(NamedTuple):
    F: np.ndarray
    sigma: np.ndarray
    G: np.ndarray


class TakagiFactors(NamedTuple):
    Q: np.ndarray
    sigma: np.ndarray


class RealSymEig(NamedTuple):
    V: np.ndarray
    lam: np.ndarray


def _square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def svd(A: np.ndarray) -> SvdFactors:
    """Full SVD of a square complex matrix, A = F diag(sigma) G^H.

    Singular values come back descending. Factors are unitary to
    machine precision.
    """
    A = _square(A)
    try:
        F, sigma, Gh = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for shape {A.shape}: {exc}") from exc
    return SvdFactors(F=F, sigma=sigma, G=Gh.conj().T)


def eig_real_symmetric(R: np.ndarray, sym_tol: float = 1e-10) -> RealSymEig:
    """Eigendecomposition R = V diag(lam) V^T of a real symmetric matrix.

    Eigenvalues are returned in descending order with V real orthogonal.
    The input is symmetrized as (R + R^T)/2 before factoring; asymmetry
    beyond sym_tol (relative) is a contract violation.
    """
    R = _square(np.asarray(R), "R")
    if np.iscomplexobj(R):
        if np.max(np.abs(R.imag)) > sym_tol * max(1.0, np.linalg.norm(R)):
            raise ValueError("R must be real")
        R = R.real
    scale = max(1.0, np.linalg.norm(R))
    if np.linalg.norm(R - R.T) > sym_tol * scale:
        raise ValueError("R is not symmetric within tolerance")
    w, V = np.linalg.eigh((R + R.T) / 2.0)
    return RealSymEig(V=V[:, ::-1].copy(), lam=w[::-1].copy())


def _block_principal_sqrt(Z: np.ndarray) -> np.ndarray:
    """Principal square root of a (numerically) unitary block.

    The block is first projected to the closest unitary matrix, then
    diagonalized by a complex Schur step (exact for normal matrices);
    eigenphases are halved into (-pi/2, pi/2].
    """
    if Z.shape[0] == 1:
        z = Z[0, 0]
        if abs(z) < 1e-300:
            return np.array([[1.0 + 0j]])
        return np.array([[np.exp(0.5j * np.angle(z))]])
    u, _, vh = np.linalg.svd(Z)
    T, V = scipy.linalg.schur(u @ vh, output="complex")
    half = np.exp(0.5j * np.angle(np.diag(T)))
    return (V * half) @ V.conj().T


def _sigma_groups(sigma: np.ndarray, rel_gap: float) -> list[slice]:
    """Slices of consecutive singular values closer than rel_gap * sigma_max."""
    n = sigma.size
    scale = sigma[0] if n and sigma[0] > 0 else 1.0
    groups = []
    start = 0
    for i in range(1, n):
        if sigma[i - 1] - sigma[i] > rel_gap * scale:
            groups.append(slice(start, i))
            start = i
    groups.append(slice(start, n))
    return groups


def takagi(A: np.ndarray, sym_tol: float = 1e-8, group_tol: float = 1e-8,
           unitary_tol: float = 1e-8) -> TakagiFactors:
    """Takagi factorization A = Q diag(sigma) Q^T of a complex symmetric matrix.

    Built from the SVD A = F diag(sigma) G^H as Q = F (F^H G*)^(1/2).
    F^H G* is diagonal when the singular values are distinct; repeated or
    numerically close singular values are grouped (relative gap group_tol)
    and the square root is taken blockwise on each group, where F^H G* is
    unitary, with the principal branch.

    Args:
        A: square complex symmetric matrix (symmetrized internally).
        sym_tol: allowed relative asymmetry of the input.
        group_tol: relative gap under which singular values share a block.
        unitary_tol: residual above which the result is rejected.

    Returns:
        TakagiFactors(Q, sigma) with Q unitary and sigma descending.
    """
    A = _square(A)
    nrm = np.linalg.norm(A)
    if np.linalg.norm(A - A.T) > sym_tol * max(1.0, nrm):
        raise ValueError("A is not symmetric within tolerance")
    A = (A + A.T) / 2.0
    F, sigma, G = svd(A)
    W = F.conj().T @ G.conj()
    n = A.shape[0]
    root = np.zeros((n, n), dtype=complex)
    for ix in _sigma_groups(sigma, group_tol):
        root[ix, ix] = _block_principal_sqrt(W[ix, ix])
    Q = F @ root
    unit_res = np.linalg.norm(Q @ Q.conj().T - np.eye(n))
    if unit_res > unitary_tol:
        raise NumericalError(
            f"Takagi factor lost unitarity: residual {unit_res:.3e} (n={n}, "
            f"sigma range [{sigma[-1] if n else 0:.3e}, {sigma[0] if n else 0:.3e}])")
    return TakagiFactors(Q=Q, sigma=sigma)


def expm_skew_hermitian(S: np.ndarray, skew_tol: float = 1e-10) -> np.ndarray:
    """exp(S) for skew-Hermitian S, via the Hermitian eigendecomposition of -jS.

    With -jS = W diag(d) W^H, returns W diag(e^{jd}) W^H, which is unitary
    by construction.
    """
    S = _square(S, "S")
    scale = max(1.0, np.linalg.norm(S))
    if np.linalg.norm(S + S.conj().T) > skew_tol * scale:
        raise ValueError("S is not skew-Hermitian within tolerance")
    H = -1j * S
    d, W = np.linalg.eigh((H + H.conj().T) / 2.0)
    return (W * np.exp(1j * d)) @ W.conj().T
