"""Orthonormal Hermitian operator bases and correlation-matrix expansions.

The generalized Gell-Mann basis is normalized so tr(B_i B_j) = delta_ij,
with B_0 = I/sqrt(d).  A correlation matrix stores the real coefficients
t_ij = tr(sqrt(rho) (X_i (x) Y_j)) of sqrt(rho) in a product basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qmatrix
from .errors import DimensionMismatch, InvalidMeasurement, NotHermitian
from .states import DensityMatrix

ORTHONORMALITY_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10
MEASUREMENT_TOL = 1e-10


@dataclass(frozen=True)
class HermitianBasis:
    """d^2 orthonormal Hermitian operators; element 0 is I/sqrt(d)."""

    dim: int
    elements: np.ndarray  # shape (d*d, d, d)

    def gram(self) -> np.ndarray:
        return np.einsum("kij,lji->kl", self.elements, self.elements).real


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann basis of dimension d.

    Order: identity/sqrt(d), then the symmetric, antisymmetric and diagonal
    families, each in lexicographic (j, k) order.  For d = 2 this is the
    normalized Pauli basis {I, sx, sy, sz}/sqrt(2).
    """
    if d < 2:
        raise DimensionMismatch("basis dimension must be at least 2")
    elems = [np.eye(d, dtype=complex) / np.sqrt(d)]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[j, k] = S[k, j] = inv_sqrt2
            elems.append(S)
    for j in range(d):
        for k in range(j + 1, d):
            A = np.zeros((d, d), dtype=complex)
            A[j, k] = -1j * inv_sqrt2
            A[k, j] = 1j * inv_sqrt2
            elems.append(A)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        elems.append(np.diag(diag.astype(complex)) / np.sqrt(l * (l + 1)))
    # for d = 2 this order is exactly (I, sx, sy, sz)/sqrt(2)
    return HermitianBasis(dim=d, elements=np.stack(elems))


def pauli_basis() -> HermitianBasis:
    """Alias for the d = 2 normalized Pauli basis."""
    return gell_mann_basis(2)


def correlation_matrix(
    rho: DensityMatrix,
    basis_a: HermitianBasis,
    basis_b: HermitianBasis,
    imag_tol: float = IMAG_RESIDUE_TOL,
) -> np.ndarray:
    """Expansion coefficients t_ij = tr(sqrt(rho) (X_i (x) Y_j)).

    Entries are provably real for Hermitian sqrt(rho) and Hermitian basis;
    imaginary residue above imag_tol raises.
    """
    da, db = rho.dims
    if basis_a.dim != da or basis_b.dim != db:
        raise DimensionMismatch(
            f"basis dims ({basis_a.dim}, {basis_b.dim}) != state dims {rho.dims}"
        )
    S = qmatrix.psd_sqrt(rho.matrix)
    S4 = S.reshape(da, db, da, db)
    T = np.einsum("abcd,ica,jdb->ij", S4, basis_a.elements, basis_b.elements)
    residue = float(np.max(np.abs(T.imag)))
    if residue > imag_tol:
        raise NotHermitian(f"imaginary residue {residue:.3e} on correlation entries")
    return T.real


def bilocal_correlation_matrix(t_ab: np.ndarray, t_cd: np.ndarray) -> np.ndarray:
    """T_{bc,ad} = T_ab^t (x) T_cd, composite index (jk) = j*u^2 + k."""
    return np.kron(np.asarray(t_ab).T, np.asarray(t_cd))


def product_basis_stack(basis_b: HermitianBasis, basis_c: HermitianBasis) -> np.ndarray:
    """Stack of Y_j (x) Z_k in (jk) = j*u^2 + k order, shape (n^2 u^2, nu, nu)."""
    n, u = basis_b.dim, basis_c.dim
    out = np.empty((n * n * u * u, n * u, n * u), dtype=complex)
    for j in range(n * n):
        for k in range(u * u):
            out[j * u * u + k] = np.kron(basis_b.elements[j], basis_c.elements[k])
    return out


def check_measurement(projectors, atol: float = MEASUREMENT_TOL) -> np.ndarray:
    """Validate a complete orthogonal rank-1 projective measurement.

    Returns the projectors as a stacked array; raises InvalidMeasurement.
    """
    P = np.asarray(projectors, dtype=complex)
    if P.ndim != 3 or P.shape[1] != P.shape[2]:
        raise InvalidMeasurement(f"expected stacked square projectors, got {P.shape}")
    dim = P.shape[1]
    if P.shape[0] != dim:
        raise InvalidMeasurement(
            f"rank-1 completeness needs {dim} projectors, got {P.shape[0]}"
        )
    for g, pi in enumerate(P):
        if qmatrix.hermiticity_error(pi) > atol or abs(np.trace(pi).real - 1.0) > atol:
            raise InvalidMeasurement(f"projector {g} is not Hermitian rank-1")
        if np.max(np.abs(pi @ pi - pi)) > atol:
            raise InvalidMeasurement(f"projector {g} is not idempotent")
    gram = np.einsum("gij,hji->gh", P, P).real
    if np.max(np.abs(gram - np.eye(dim))) > atol:
        raise InvalidMeasurement("projectors are not mutually orthogonal")
    if np.max(np.abs(P.sum(axis=0) - np.eye(dim))) > atol:
        raise InvalidMeasurement("projectors do not sum to the identity")
    return P


def measurement_expansion(
    projectors,
    basis_b: HermitianBasis,
    basis_c: HermitianBasis,
    atol: float = MEASUREMENT_TOL,
) -> np.ndarray:
    """F matrix of a measurement on H_B (x) H_C: f_{g,(jk)} = tr(Pi_g Y_j (x) Z_k)."""
    P = check_measurement(projectors, atol=atol)
    n, u = basis_b.dim, basis_c.dim
    if P.shape[1] != n * u:
        raise DimensionMismatch(
            f"projector dimension {P.shape[1]} != basis product {n * u}"
        )
    G = product_basis_stack(basis_b, basis_c)
    F = np.einsum("gij,kji->gk", P, G)
    residue = float(np.max(np.abs(F.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise NotHermitian(f"imaginary residue {residue:.3e} on F entries")
    return F.real
