"""Measurement optimization over the locally invariant von Neumann set.

A measurement leaves a reference marginal invariant exactly when its rank-1
projectors are built from per-eigenspace rotations of the marginal's
eigenbasis.  The search therefore parameterizes one unitary per degeneracy
block, draws Haar-random restarts, and refines each by derivative-free
coordinate descent on pairwise Givens rotations (angle line scans at
relative phases 0 and pi/2, 64-point grid plus golden-section polish).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import operator_basis, qmatrix, states
from .errors import DimensionMismatch
from .results import MeasureResult
from .states import BilocalInput, DensityMatrix

DEGENERACY_GAP_TOL = 1e-8
MEASUREMENT_CHECK_TOL = 1e-9
GRID_POINTS = 64
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_THETAS = np.linspace(-np.pi / 2, np.pi / 2, GRID_POINTS, endpoint=False)
_COS = np.cos(_THETAS)
_SIN = np.sin(_THETAS)


@dataclass
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    step_tolerance: float = 1e-10
    value_tolerance: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class BlockStructure:
    """Eigenbasis of the reference marginal, clustered into degeneracy blocks."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    blocks: tuple[tuple[int, ...], ...]

    @property
    def free_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) > 1)


@dataclass(frozen=True)
class InvariantMeasurement:
    """Rank-1 von Neumann measurement commuting with a reference marginal."""

    reference_dim: int
    block_eigenvalues: tuple[float, ...]
    blocks: tuple[tuple[int, ...], ...]
    block_unitaries: tuple[np.ndarray, ...]
    columns: np.ndarray  # column g spans projector g

    def projectors(self) -> np.ndarray:
        W = self.columns
        return np.einsum("ig,jg->gij", W, W.conj())

    def check(self, rho_ref: np.ndarray, atol: float = MEASUREMENT_CHECK_TOL) -> None:
        """Raise unless the projectors are complete, orthogonal and non-disturbing."""
        P = operator_basis.check_measurement(self.projectors(), atol=atol)
        post = np.einsum("gij,jk,gkl->il", P, rho_ref, P)
        err = float(np.max(np.abs(post - rho_ref)))
        if err > atol:
            raise DimensionMismatch(f"measurement disturbs the reference marginal by {err:.3e}")


def invariant_blocks(rho_ref, gap_tolerance: float = DEGENERACY_GAP_TOL) -> BlockStructure:
    """Cluster the reference marginal's eigenvalues into degeneracy blocks."""
    M = rho_ref.matrix if isinstance(rho_ref, DensityMatrix) else np.asarray(rho_ref)
    es = qmatrix.hermitian_eig(M)
    w = es.values
    scale = max(1.0, float(w[-1] - w[0]))
    blocks: list[list[int]] = [[0]]
    for i in range(1, w.size):
        if w[i] - w[i - 1] < gap_tolerance * scale:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return BlockStructure(
        eigenvalues=w,
        vectors=es.vectors,
        blocks=tuple(tuple(b) for b in blocks),
    )


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with R-diagonal phase correction."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R).copy()
    ph /= np.abs(ph)
    return Q * ph


def _make_objectives(M: np.ndarray, basis_stack: np.ndarray):
    K, d, _ = basis_stack.shape
    # G rows are the flattened basis elements so that F = O @ G^T with
    # O the flattened rank-1 projectors of the measurement columns
    G = basis_stack.reshape(K, d * d).T

    def expansion(W: np.ndarray) -> np.ndarray:
        """F matrices of one (d, d) or a batch (b, d, d) of column sets."""
        cols = np.swapaxes(W, -1, -2)  # (..., g, i)
        O = cols[..., :, :, None].conj() * cols[..., :, None, :]
        return (O.reshape(*O.shape[:-2], d * d) @ G).real

    def single(W: np.ndarray) -> float:
        F = expansion(W)
        return float(np.sum((F @ M) * F))

    def batch(Wb: np.ndarray) -> np.ndarray:
        F = expansion(Wb)
        return np.sum((F @ M) * F, axis=(1, 2))

    return single, batch


def _rotated(W: np.ndarray, p: int, q: int, theta: float, phase: complex) -> np.ndarray:
    out = W.copy()
    c, s = np.cos(theta), np.sin(theta)
    out[:, p] = c * W[:, p] + phase * s * W[:, q]
    out[:, q] = -np.conj(phase) * s * W[:, p] + c * W[:, q]
    return out


def _golden_section(f, a: float, b: float, tol: float):
    """Golden-section minimization of f on [a, b]; returns (x, f(x))."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _scan_pair(W, p, q, phase_angle, value, single, batch, config):
    """Line scan over the Givens angle for one column pair; monotone update."""
    phase = np.exp(1j * phase_angle)
    thetas, c, s = _THETAS, _COS, _SIN
    Wb = np.repeat(W[None, :, :], GRID_POINTS, axis=0)
    Wb[:, :, p] = c[:, None] * W[:, p] + (phase * s)[:, None] * W[:, q]
    Wb[:, :, q] = -(np.conj(phase) * s)[:, None] * W[:, p] + c[:, None] * W[:, q]
    vals = batch(Wb)
    i = int(np.argmin(vals))
    if vals[i] >= value and vals.max() - vals[i] < config.value_tolerance:
        # flat scan line: nothing to refine
        return value, W
    if vals[i] >= value:
        # the 1-D minimum may sit between grid points; refine around the
        # current point (theta = 0 is always on the grid)
        i = GRID_POINTS // 2
    h = np.pi / GRID_POINTS
    x, fx = _golden_section(
        lambda t: single(_rotated(W, p, q, t, phase)),
        thetas[i] - h,
        thetas[i] + h,
        config.step_tolerance,
    )
    candidates = [(value, 0.0), (float(vals[i]), float(thetas[i])), (fx, x)]
    best, theta = min(candidates, key=lambda c: c[0])
    if theta == 0.0:
        return value, W
    return best, _rotated(W, p, q, theta, phase)


def _refine(W, free_blocks, single, batch, config):
    value = single(W)
    scans = 0
    while scans < config.max_iterations:
        start = value
        for block in free_blocks:
            for p, q in itertools.combinations(block, 2):
                for phase_angle in (0.0, np.pi / 2):
                    value, W = _scan_pair(W, p, q, phase_angle, value, single, batch, config)
                    scans += 1
        if start - value < config.value_tolerance:
            break
    return value, W, scans


def minimize_invariant(
    M: np.ndarray,
    basis_stack: np.ndarray,
    block_struct: BlockStructure,
    config: OptimizerConfig,
):
    """Minimize tr(F M F^t) over invariant measurements.

    F is the basis expansion of the measurement built from per-block
    rotations of the reference eigenbasis.  Returns (min value,
    InvariantMeasurement, diagnostics).
    """
    single, batch = _make_objectives(M, basis_stack)
    V = block_struct.vectors
    free = block_struct.free_blocks
    d = V.shape[0]

    def pack(W, unitaries):
        return InvariantMeasurement(
            reference_dim=d,
            block_eigenvalues=tuple(
                float(np.mean(block_struct.eigenvalues[list(b)])) for b in block_struct.blocks
            ),
            blocks=block_struct.blocks,
            block_unitaries=tuple(unitaries),
            columns=W,
        )

    if not free:
        # nondegenerate reference marginal: the eigenbasis is the unique
        # admissible measurement, nothing to search
        W = V.copy()
        value = single(W)
        meas = pack(W, [np.eye(len(b), dtype=complex) for b in block_struct.blocks])
        diag = {"restarts": 0, "best": value, "median": value, "worst": value, "scans": 0}
        return value, meas, diag

    best_value = None
    best_meas = None
    restart_values = []
    total_scans = 0
    for r in range(config.restarts):
        rng = np.random.default_rng([int(config.seed), r])
        unitaries = []
        W = V.copy()
        for b in block_struct.blocks:
            if len(b) > 1:
                U = haar_unitary(len(b), rng)
            else:
                U = np.eye(1, dtype=complex)
            unitaries.append(U)
            W[:, list(b)] = W[:, list(b)] @ U
        value, W, scans = _refine(W, free, single, batch, config)
        restart_values.append(value)
        total_scans += scans
        if best_value is None or value < best_value:
            best_value = value
            # eigenbasis columns are orthonormal, so V_b^dag W_b recovers U_b
            best_meas = pack(
                W,
                [V[:, list(b)].conj().T @ W[:, list(b)] for b in block_struct.blocks],
            )
    rv = np.array(restart_values)
    diag = {
        "restarts": config.restarts,
        "best": float(rv.min()),
        "median": float(np.median(rv)),
        "worst": float(rv.max()),
        "scans": total_scans,
    }
    return float(best_value), best_meas, diag


def objective(rho_full: DensityMatrix, measurement: InvariantMeasurement) -> float:
    """Direct evaluation sum_g tr(sqrt(rho) P_g sqrt(rho) P_g).

    P_g embeds the measurement's projectors as I_m (x) Pi_g (x) I_v on a
    four-party state of dims (m, n, u, v).
    """
    if len(rho_full.dims) != 4:
        raise DimensionMismatch("expected a four-party state of dims (m, n, u, v)")
    m, n, u, v = rho_full.dims
    if measurement.reference_dim != n * u:
        raise DimensionMismatch(
            f"measurement dimension {measurement.reference_dim} != n*u = {n * u}"
        )
    S = qmatrix.psd_sqrt(rho_full.matrix)
    return sandwich_sum(S, measurement.projectors(), m, v)


def sandwich_sum(S: np.ndarray, projectors, dim_left: int, dim_right: int) -> float:
    """sum_g tr(S (I_l (x) Pi_g (x) I_r) S (I_l (x) Pi_g (x) I_r))."""
    total = 0.0
    eye_l = np.eye(dim_left)
    eye_r = np.eye(dim_right)
    for pi in projectors:
        P = np.kron(eye_l, np.kron(pi, eye_r))
        SP = S @ P
        total += float(np.trace(SP @ SP).real)
    return total


def _minbs_problem(inp: BilocalInput, gap_tolerance: float):
    """Assemble (M, basis stack, block structure, dims) for a MINBS search."""
    m, n = inp.rho_ab.dims
    u, v = inp.rho_cd.dims
    bm = operator_basis.gell_mann_basis(m)
    bn = operator_basis.gell_mann_basis(n)
    bu = operator_basis.gell_mann_basis(u)
    bv = operator_basis.gell_mann_basis(v)
    t_ab = operator_basis.correlation_matrix(inp.rho_ab, bm, bn)
    t_cd = operator_basis.correlation_matrix(inp.rho_cd, bu, bv)
    t_bcad = operator_basis.bilocal_correlation_matrix(t_ab, t_cd)
    M = t_bcad @ t_bcad.T
    stack = operator_basis.product_basis_stack(bn, bu)
    rho_bc = np.kron(
        states.marginal(inp.rho_ab, 1).matrix, states.marginal(inp.rho_cd, 0).matrix
    )
    blocks = invariant_blocks(rho_bc, gap_tolerance)
    return M, stack, blocks, (m, n, u, v)


def maximize_minbs(
    inp: BilocalInput,
    config: OptimizerConfig | None = None,
    gap_tolerance: float = DEGENERACY_GAP_TOL,
) -> MeasureResult:
    """Multi-start search for the nonbilocality value 1 - min tr(F M F^t)."""
    config = config or OptimizerConfig()
    M, stack, blocks, (m, n, u, v) = _minbs_problem(inp, gap_tolerance)
    min_value, meas, diag = minimize_invariant(M, stack, blocks, config)
    eig = np.linalg.eigvalsh(M)
    t2_upper = float(1.0 - np.sum(eig[: n * u]))
    value = min(max(1.0 - min_value, 0.0), 1.0)
    return MeasureResult(
        value=value,
        method="optimizer",
        optimal_measurement=meas,
        bounds={"t2_upper": t2_upper},
        diagnostics=diag,
    )


def maximize_min_s(
    rho: DensityMatrix,
    config: OptimizerConfig | None = None,
    gap_tolerance: float = DEGENERACY_GAP_TOL,
) -> MeasureResult:
    """Search over measurements on subsystem A that leave rho_A invariant."""
    config = config or OptimizerConfig()
    m, n = rho.dims
    bm = operator_basis.gell_mann_basis(m)
    bn = operator_basis.gell_mann_basis(n)
    t_ab = operator_basis.correlation_matrix(rho, bm, bn)
    M = t_ab @ t_ab.T
    blocks = invariant_blocks(states.marginal(rho, 0), gap_tolerance)
    min_value, meas, diag = minimize_invariant(M, bm.elements, blocks, config)
    value = min(max(1.0 - min_value, 0.0), 1.0)
    return MeasureResult(
        value=value,
        method="optimizer",
        optimal_measurement=meas,
        diagnostics=diag,
    )
