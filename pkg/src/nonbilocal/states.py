"""Constructors and validation for the state families used throughout.

Basis conventions: qubit basis |0>, |1>; two-qubit ordering |00>, |01>,
|10>, |11>.  Bell states follow the standard naming
phi+- = (|00> +- |11>)/sqrt(2), psi+- = (|01> +- |10>)/sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmatrix
from .errors import (
    DimensionMismatch,
    InvalidWeights,
    NotNormalized,
    OutOfRange,
)

HERMITICITY_TOL = 1e-9
EIG_TOL = 1e-10
TRACE_TOL = 1e-9
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density operator with subsystem-dimension metadata."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    label: str | None = None

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class BilocalInput:
    """The two independent sources of the bilocal scenario."""

    rho_ab: DensityMatrix
    rho_cd: DensityMatrix


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_error: float
    min_eigenvalue: float
    trace_error: float
    hermitian_ok: bool
    psd_ok: bool
    trace_ok: bool
    dims_ok: bool

    @property
    def passed(self) -> bool:
        return self.hermitian_ok and self.psd_ok and self.trace_ok and self.dims_ok

    def failures(self) -> list[str]:
        out = []
        if not self.hermitian_ok:
            out.append(f"hermiticity deviation {self.hermiticity_error:.3e}")
        if not self.psd_ok:
            out.append(f"negative eigenvalue {self.min_eigenvalue:.3e}")
        if not self.trace_ok:
            out.append(f"trace deviation {self.trace_error:.3e}")
        if not self.dims_ok:
            out.append("product of dims does not match matrix dimension")
        return out


def validate(rho: DensityMatrix) -> ValidationReport:
    """Check hermiticity, positivity and unit trace; never raises."""
    M = np.asarray(rho.matrix)
    dims_ok = M.ndim == 2 and M.shape[0] == M.shape[1] == int(np.prod(rho.dims))
    herm_err = qmatrix.hermiticity_error(M) if M.ndim == 2 else float("inf")
    if dims_ok and herm_err <= HERMITICITY_TOL:
        min_eig = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])
    elif M.ndim == 2 and M.shape[0] == M.shape[1]:
        min_eig = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])
    else:
        min_eig = float("nan")
    tr_err = abs(float(np.trace(M).real) - 1.0) if M.ndim == 2 else float("inf")
    return ValidationReport(
        hermiticity_error=herm_err,
        min_eigenvalue=min_eig,
        trace_error=tr_err,
        hermitian_ok=herm_err <= HERMITICITY_TOL,
        psd_ok=np.isfinite(min_eig) and min_eig >= -EIG_TOL,
        trace_ok=tr_err <= TRACE_TOL,
        dims_ok=dims_ok,
    )


def density(matrix, dims, label: str | None = None) -> DensityMatrix:
    """Build a DensityMatrix and raise if validation fails."""
    rho = DensityMatrix(
        matrix=np.asarray(matrix, dtype=complex), dims=tuple(int(d) for d in dims),
        label=label,
    )
    report = validate(rho)
    if not report.passed:
        raise InvalidWeights("; ".join(report.failures()))
    return rho


def _proj(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


_INV_SQRT2 = 1.0 / np.sqrt(2.0)
BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) * _INV_SQRT2,
    "phi-": np.array([1, 0, 0, -1], dtype=complex) * _INV_SQRT2,
    "psi+": np.array([0, 1, 1, 0], dtype=complex) * _INV_SQRT2,
    "psi-": np.array([0, 1, -1, 0], dtype=complex) * _INV_SQRT2,
}
BELL_ORDER = ("phi+", "phi-", "psi+", "psi-")


def bell(kind: str) -> DensityMatrix:
    """One of the four Bell states as a rank-1 density matrix."""
    key = kind.lower()
    if key not in BELL_VECTORS:
        raise OutOfRange(f"unknown Bell state {kind!r}; choose from {BELL_ORDER}")
    return DensityMatrix(_proj(BELL_VECTORS[key]), (2, 2), label=f"bell:{key}")


def bell_diagonal(weights) -> DensityMatrix:
    """Mixture of the four Bell projectors, weight order (phi+, phi-, psi+, psi-)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise InvalidWeights("expected exactly four weights")
    if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InvalidWeights(f"weights must be nonnegative and sum to 1, got {w}")
    M = sum(wi * _proj(BELL_VECTORS[k]) for wi, k in zip(w, BELL_ORDER))
    return DensityMatrix(M, (2, 2), label="bell_diagonal")


def werner(v: float) -> DensityMatrix:
    """Werner state v |psi-><psi-| + (1-v)/4 I, v in [-1/3, 1]."""
    if not -1 / 3 - 1e-12 <= v <= 1 + 1e-12:
        raise OutOfRange(f"Werner parameter {v} outside [-1/3, 1]")
    lam = ((1 - v) / 4, (1 - v) / 4, (1 - v) / 4, (1 + 3 * v) / 4)
    rho = bell_diagonal(lam)
    return DensityMatrix(rho.matrix, (2, 2), label=f"werner:{v}")


def classical_separable() -> DensityMatrix:
    """(|00><00| + |11><11|)/2: the classical two-qubit separable state."""
    M = np.zeros((4, 4), dtype=complex)
    M[0, 0] = 0.5
    M[3, 3] = 0.5
    return DensityMatrix(M, (2, 2), label="classical_separable")


def quantum_classical(components, dim_b: int | None = None) -> DensityMatrix:
    """sum_k rho^A_k (x) p_k |k_B><k_B| from (rho_a, p, k) triples."""
    comps = []
    for rho_a, p, k in components:
        mat = rho_a.matrix if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a, dtype=complex)
        comps.append((mat, float(p), int(k)))
    probs = np.array([p for _, p, _ in comps])
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > WEIGHT_TOL:
        raise InvalidWeights(f"probabilities must be nonnegative and sum to 1, got {probs}")
    ks = [k for _, _, k in comps]
    if len(set(ks)) != len(ks):
        raise InvalidWeights("repeated basis index in components")
    da = comps[0][0].shape[0]
    db = dim_b if dim_b is not None else max(ks) + 1
    M = np.zeros((da * db, da * db), dtype=complex)
    for mat, p, k in comps:
        if mat.shape != (da, da):
            raise DimensionMismatch("component blocks must share the A dimension")
        e = np.zeros((db, db), dtype=complex)
        e[k, k] = 1.0
        M += p * np.kron(mat, e)
    return DensityMatrix(M, (da, db), label="quantum_classical")


def classical_quantum(components, dim_a: int | None = None) -> DensityMatrix:
    """sum_k p_k |k_A><k_A| (x) rho^B_k: the swap of quantum_classical."""
    qc = quantum_classical(components, dim_b=dim_a)
    da, db = qc.dims
    sw = swap_bipartite(qc)
    return DensityMatrix(sw.matrix, (db, da), label="classical_quantum")


def random_density(d: int, rank: int, seed) -> DensityMatrix:
    """Ginibre-induced random state: GG^dag normalized, G a d x rank complex Gaussian."""
    if not 1 <= rank <= d:
        raise OutOfRange(f"rank {rank} outside [1, {d}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    G = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))) / np.sqrt(2)
    M = G @ G.conj().T
    M /= np.trace(M).real
    return DensityMatrix(M, (d,), label="random")


def random_bipartite(da: int, db: int, rank: int, seed) -> DensityMatrix:
    """Random density matrix on a (da, db) bipartite space."""
    rho = random_density(da * db, rank, seed)
    return DensityMatrix(rho.matrix, (da, db), label="random")


def pure_from_schmidt(coefficients) -> DensityMatrix:
    """Rank-1 state sum_i c_i |ii> on dims (len(c), len(c))."""
    c = np.asarray(coefficients, dtype=float)
    if np.any(c < 0):
        raise NotNormalized("Schmidt coefficients must be nonnegative")
    if abs(np.sum(c**2) - 1.0) > WEIGHT_TOL:
        raise NotNormalized(f"sum of squared coefficients is {np.sum(c**2):.12f}")
    d = c.size
    psi = np.zeros(d * d, dtype=complex)
    for i, ci in enumerate(c):
        psi[i * d + i] = ci
    return DensityMatrix(_proj(psi), (d, d), label="pure_schmidt")


def marginal(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state of one subsystem of a bipartite density matrix."""
    M = qmatrix.partial_trace(rho.matrix, rho.dims, [keep])
    return DensityMatrix(M, (rho.dims[keep],))


def swap_bipartite(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the two subsystems of a bipartite state."""
    da, db = rho.dims
    T = rho.matrix.reshape(da, db, da, db).transpose(1, 0, 3, 2)
    return DensityMatrix(T.reshape(da * db, da * db), (db, da), label=rho.label)


def conjugate_local(rho: DensityMatrix, unitaries) -> DensityMatrix:
    """Apply (U_1 (x) ... (x) U_k) rho (.)^dag, one unitary per subsystem."""
    U = np.array([[1.0]], dtype=complex)
    for u in unitaries:
        U = np.kron(U, np.asarray(u, dtype=complex))
    if U.shape[0] != rho.dim:
        raise DimensionMismatch("unitary dims do not match state dims")
    return DensityMatrix(U @ rho.matrix @ U.conj().T, rho.dims, label=rho.label)
