"""Dense complex-matrix kernel for small quantum systems.

Hermitian eigendecomposition, PSD square root, Kronecker/partial-trace
plumbing and the Schmidt decomposition.  Everything is dense; target
dimensions are tiny (two qubits per source, 16x16 at most).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NumericalFailure,
)

HERMITICITY_TOL = 1e-9
EIG_CLAMP_TOL = 1e-10
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition H = V diag(values) V^dag, values ascending."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt form of a bipartite pure state.

    coefficients are nonnegative and nonincreasing; the columns of
    left_basis/right_basis are the orthonormal local Schmidt vectors, so
    sum_i c_i (l_i tensor r_i) reconstructs the input vector.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum(
            "i,ai,bi->ab", self.coefficients, self.left_basis, self.right_basis
        ).reshape(-1)


def hermiticity_error(M: np.ndarray) -> float:
    """Max-entry deviation from M = M^dag."""
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def hermitian_eig(H: np.ndarray, atol: float = HERMITICITY_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    err = hermiticity_error(H)
    if err > atol:
        raise NotHermitian(f"Hermiticity deviation {err:.3e} exceeds {atol:.1e}")
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise NumericalFailure("eigensolver did not converge") from exc
    return EigenSystem(values=w, vectors=V)


def psd_sqrt(
    rho: np.ndarray,
    clamp_tol: float = EIG_CLAMP_TOL,
    atol: float = HERMITICITY_TOL,
) -> np.ndarray:
    """Hermitian PSD square root via the spectral decomposition.

    Eigenvalues in [-clamp_tol, 0) are treated as floating-point dust and
    clamped to zero; anything lower raises NotPSD.
    """
    es = hermitian_eig(rho, atol=atol)
    if es.values[0] < -clamp_tol:
        raise NotPSD(f"minimum eigenvalue {es.values[0]:.3e} below -{clamp_tol:.1e}")
    w = np.sqrt(np.clip(es.values, 0.0, None))
    return (es.vectors * w) @ es.vectors.conj().T


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product (row-major convention, dims multiply)."""
    return np.kron(np.asarray(A), np.asarray(B))


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    return complex(np.trace(A.conj().T @ B))


def partial_trace(M: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in `keep`.

    `dims` lists the subsystem dimensions in tensor order; `keep` is an
    iterable of subsystem indices to retain (order preserved ascending).
    """
    M = np.asarray(M, dtype=complex)
    dims = [int(d) for d in dims]
    n = len(dims)
    D = int(np.prod(dims))
    if M.shape != (D, D):
        raise DimensionMismatch(f"matrix shape {M.shape} != product of dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {n} subsystems")
    T = M.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    R = np.einsum(T, row + col, out)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return R.reshape(d_keep, d_keep)


def schmidt(
    psi: np.ndarray,
    dim_left: int,
    dim_right: int,
    atol: float = NORMALIZATION_TOL,
) -> SchmidtDecomposition:
    """Schmidt decomposition of a normalized bipartite state vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != dim_left * dim_right:
        raise DimensionMismatch(
            f"vector length {psi.size} != {dim_left}*{dim_right}"
        )
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise NotNormalized(f"|psi| = {norm:.12f}")
    U, s, Vh = np.linalg.svd(psi.reshape(dim_left, dim_right), full_matrices=False)
    # right Schmidt vectors are the (unconjugated) rows of Vh so that
    # sum_i s_i l_i (x) r_i reproduces psi exactly
    return SchmidtDecomposition(coefficients=s, left_basis=U, right_basis=Vh.T)
