"""Skew information, skew-information MIN, and the nonbilocality measure.

The nonbilocality of rho_AB (x) rho_CD is 1 minus the minimum, over all
von Neumann measurements on BC that leave rho_B (x) rho_C invariant, of
sum_g tr(sqrt(rho) P_g sqrt(rho) P_g).  Closed forms cover pure inputs
and nondegenerate marginals; everything else is delegated to the
multi-start measurement optimizer.
"""
from __future__ import annotations

import numpy as np

from . import operator_basis, optimizer, qmatrix, states
from .errors import DegenerateMarginal, DimensionMismatch, NotNormalized
from .optimizer import OptimizerConfig
from .results import MarginalSpectrum, MeasureResult, marginal_spectrum
from .states import BilocalInput, DensityMatrix

GAP_TOL = optimizer.DEGENERACY_GAP_TOL
PURITY_TOL = 1e-9
CLAMP_WARN_TOL = 1e-8


def skew_information(rho: DensityMatrix, K: np.ndarray) -> float:
    """Wigner-Yanase skew information -(1/2) tr [sqrt(rho), K]^2.

    Evaluated as tr(rho K^2) - tr(sqrt(rho) K sqrt(rho) K), clamped at 0.
    """
    K = np.asarray(K, dtype=complex)
    if K.shape != rho.matrix.shape:
        raise DimensionMismatch(f"observable shape {K.shape} != state shape {rho.matrix.shape}")
    S = qmatrix.psd_sqrt(rho.matrix)
    value = float(np.trace(rho.matrix @ K @ K).real - np.trace(S @ K @ S @ K).real)
    return max(value, 0.0)


def _clamp(value: float, diagnostics: dict) -> float:
    clamped = min(max(value, 0.0), 1.0)
    if abs(clamped - value) > CLAMP_WARN_TOL:
        diagnostics["clamp_warning"] = value - clamped
    return clamped


def _state_spectrum(rho: DensityMatrix, gap_tol: float) -> MarginalSpectrum:
    return marginal_spectrum(np.linalg.eigvalsh(rho.matrix), gap_tol)


def _is_pure(rho: DensityMatrix, purity_tol: float = PURITY_TOL) -> bool:
    return float(np.linalg.eigvalsh(rho.matrix)[-1]) >= 1.0 - purity_tol


def minbs_pure(schmidt_ab, schmidt_cd) -> float:
    """Closed form 1 - (sum_i lam_i^4)(sum_j mu_j^4) for pure sources."""
    lam = np.asarray(schmidt_ab, dtype=float)
    mu = np.asarray(schmidt_cd, dtype=float)
    for c in (lam, mu):
        if abs(np.sum(c**2) - 1.0) > 1e-9:
            raise NotNormalized("Schmidt coefficients must satisfy sum c^2 = 1")
    return float(1.0 - np.sum(lam**4) * np.sum(mu**4))


def upper_bound_t2(t_bcad: np.ndarray, n: int, u: int) -> float:
    """1 minus the sum of the nu smallest eigenvalues of T_{bc,ad} T^t_{bc,ad}."""
    t_bcad = np.asarray(t_bcad, dtype=float)
    if t_bcad.shape[0] != n * n * u * u:
        raise DimensionMismatch(
            f"T_bcad has {t_bcad.shape[0]} rows, expected n^2 u^2 = {n * n * u * u}"
        )
    eig = np.linalg.eigvalsh(t_bcad @ t_bcad.T)
    return float(1.0 - np.sum(eig[: n * u]))


def _correlations(inp: BilocalInput):
    m, n = inp.rho_ab.dims
    u, v = inp.rho_cd.dims
    t_ab = operator_basis.correlation_matrix(
        inp.rho_ab, operator_basis.gell_mann_basis(m), operator_basis.gell_mann_basis(n)
    )
    t_cd = operator_basis.correlation_matrix(
        inp.rho_cd, operator_basis.gell_mann_basis(u), operator_basis.gell_mann_basis(v)
    )
    return t_ab, t_cd


def _eigenbasis_rows(rho: DensityMatrix, basis: operator_basis.HermitianBasis) -> np.ndarray:
    """Measurement matrix of the eigenbasis of rho: row s is tr(|s><s| B_j)."""
    es = qmatrix.hermitian_eig(rho.matrix)
    return np.einsum("is,kij,js->sk", es.vectors.conj(), basis.elements, es.vectors).real


def _factor_b(t_ab: np.ndarray, rho_b: DensityMatrix) -> float:
    """tr(B T_ab^t T_ab B^t) for the eigenbasis measurement on B."""
    B = _eigenbasis_rows(rho_b, operator_basis.gell_mann_basis(rho_b.dims[0]))
    return float(np.sum((t_ab @ B.T) ** 2))


def _factor_c(t_cd: np.ndarray, rho_c: DensityMatrix) -> float:
    """tr(C T_cd T_cd^t C^t) for the eigenbasis measurement on C."""
    C = _eigenbasis_rows(rho_c, operator_basis.gell_mann_basis(rho_c.dims[0]))
    return float(np.sum((C @ t_cd) ** 2))


def _qubit_min_factor_rows(t_cd: np.ndarray) -> float:
    """min_C tr(C T_cd T_cd^t C^t) for a qubit C: ||r_cd||^2 + min eig of R R^t."""
    r = t_cd[0, :]
    R = t_cd[1:4, :]
    return float(np.dot(r, r) + np.linalg.eigvalsh(R @ R.T)[0])


def _t2_bound(inp: BilocalInput) -> float:
    t_ab, t_cd = _correlations(inp)
    n = inp.rho_ab.dims[1]
    u = inp.rho_cd.dims[0]
    return upper_bound_t2(operator_basis.bilocal_correlation_matrix(t_ab, t_cd), n, u)


def minbs_both_nondegenerate(
    inp: BilocalInput, gap_tol: float = GAP_TOL
) -> MeasureResult:
    """Closed form 1 - trB T_ab^t T_ab B^t x trC T_cd T_cd^t C^t."""
    rho_b = states.marginal(inp.rho_ab, 1)
    rho_c = states.marginal(inp.rho_cd, 0)
    if _state_spectrum(rho_b, gap_tol).degenerate:
        raise DegenerateMarginal("rho_B is degenerate")
    if _state_spectrum(rho_c, gap_tol).degenerate:
        raise DegenerateMarginal("rho_C is degenerate")
    t_ab, t_cd = _correlations(inp)
    diagnostics: dict = {}
    value = _clamp(1.0 - _factor_b(t_ab, rho_b) * _factor_c(t_cd, rho_c), diagnostics)
    return MeasureResult(
        value=value,
        method="nondegenerate_closed_form",
        bounds={"t2_upper": _t2_bound(inp)},
        diagnostics=diagnostics,
    )


def minbs_b_nondegenerate(
    inp: BilocalInput,
    config: OptimizerConfig | None = None,
    gap_tol: float = GAP_TOL,
) -> MeasureResult:
    """Nondegenerate rho_B: B is fixed to its eigenbasis, C is minimized.

    For a qubit C (u = 2) the minimization has the exact closed form
    ||r_cd||^2 + smallest eigenvalue of R R^t.  For u > 2 the eigenvalue
    sum gives only an upper bound (reported as t3_upper) and the exact
    value comes from the optimizer over measurements on C.
    """
    rho_b = states.marginal(inp.rho_ab, 1)
    rho_c = states.marginal(inp.rho_cd, 0)
    if _state_spectrum(rho_b, gap_tol).degenerate:
        raise DegenerateMarginal("rho_B is degenerate")
    t_ab, t_cd = _correlations(inp)
    u = inp.rho_cd.dims[0]
    fb = _factor_b(t_ab, rho_b)
    t2 = _t2_bound(inp)
    diagnostics: dict = {"factor_b": fb}
    if u == 2:
        value = _clamp(1.0 - fb * _qubit_min_factor_rows(t_cd), diagnostics)
        return MeasureResult(
            value=value,
            method="qubit_c_closed_form",
            bounds={"t2_upper": t2},
            diagnostics=diagnostics,
        )
    eig = np.linalg.eigvalsh(t_cd @ t_cd.T)
    t3_upper = float(1.0 - fb * np.sum(eig[:u]))
    config = config or OptimizerConfig()
    blocks = optimizer.invariant_blocks(rho_c, gap_tol)
    min_c, meas, diag = optimizer.minimize_invariant(
        t_cd @ t_cd.T, operator_basis.gell_mann_basis(u).elements, blocks, config
    )
    diagnostics.update(diag)
    value = _clamp(1.0 - fb * min_c, diagnostics)
    return MeasureResult(
        value=value,
        method="optimizer",
        optimal_measurement=meas,
        bounds={"t2_upper": t2, "t3_upper": t3_upper},
        diagnostics=diagnostics,
    )


def _swap_input(inp: BilocalInput) -> BilocalInput:
    """Relabel the scenario so the roles of the two sources are exchanged.

    Measuring (B, C) of rho_AB (x) rho_CD is equivalent to measuring the
    swapped pair (swap rho_CD, swap rho_AB); the objective factorizes per
    source, so the value is unchanged.
    """
    return BilocalInput(
        rho_ab=states.swap_bipartite(inp.rho_cd),
        rho_cd=states.swap_bipartite(inp.rho_ab),
    )


def bell_diagonal_minbs(weights) -> float:
    """Closed form for the swapped-copy Bell-diagonal scenario.

    With s_i = sqrt(weight_i) in the order (phi+, phi-, psi+, psi-), the
    square root expands over the Pauli basis with coefficients
    h0 = s1+s2+s3+s4, h1 = s1-s2+s3-s4, h2 = -s1+s2+s3-s4,
    h3 = s1+s2-s3-s4, and the value is 1 - sum_i h_i^4 / 16.
    """
    states.bell_diagonal(weights)  # validates the weights
    s1, s2, s3, s4 = np.sqrt(np.asarray(weights, dtype=float))
    h = np.array([
        s1 + s2 + s3 + s4,
        s1 - s2 + s3 - s4,
        -s1 + s2 + s3 - s4,
        s1 + s2 - s3 - s4,
    ])
    return float(1.0 - np.sum(h**4) / 16.0)


def minbs(
    inp: BilocalInput,
    config: OptimizerConfig | None = None,
    gap_tol: float = GAP_TOL,
    purity_tol: float = PURITY_TOL,
) -> MeasureResult:
    """Nonbilocality with dispatch across the closed forms.

    Priority: pure sources, both marginals nondegenerate, one marginal
    nondegenerate with a qubit on the degenerate side, optimizer.
    """
    rho_b = states.marginal(inp.rho_ab, 1)
    rho_c = states.marginal(inp.rho_cd, 0)
    n = inp.rho_ab.dims[1]
    u = inp.rho_cd.dims[0]
    spec_b = _state_spectrum(rho_b, gap_tol)
    spec_c = _state_spectrum(rho_c, gap_tol)
    t2 = _t2_bound(inp)

    if _is_pure(inp.rho_ab, purity_tol) and _is_pure(inp.rho_cd, purity_tol):
        lam = np.sqrt(np.clip(np.linalg.eigvalsh(rho_b.matrix), 0.0, None))
        mu = np.sqrt(np.clip(np.linalg.eigvalsh(rho_c.matrix), 0.0, None))
        diagnostics: dict = {}
        value = _clamp(minbs_pure(lam, mu), diagnostics)
        return MeasureResult(
            value=value,
            method="pure_closed_form",
            bounds={"t2_upper": t2},
            diagnostics=diagnostics,
        )

    if not spec_b.degenerate and not spec_c.degenerate:
        return minbs_both_nondegenerate(inp, gap_tol)
    if not spec_b.degenerate and spec_c.degenerate and u == 2:
        return minbs_b_nondegenerate(inp, config, gap_tol)
    if not spec_c.degenerate and spec_b.degenerate and n == 2:
        return minbs_b_nondegenerate(_swap_input(inp), config, gap_tol)

    result = optimizer.maximize_minbs(inp, config, gap_tolerance=gap_tol)
    # near-degenerate spectra: also report the closed-form branch the
    # tolerance just ruled out, for discontinuity diagnosis
    if np.all(np.diff(spec_b.eigenvalues) > 0) and np.all(np.diff(spec_c.eigenvalues) > 0):
        t_ab, t_cd = _correlations(inp)
        result.diagnostics["closed_form_branch"] = float(
            1.0 - _factor_b(t_ab, rho_b) * _factor_c(t_cd, rho_c)
        )
    return result


def min_s(
    rho: DensityMatrix,
    config: OptimizerConfig | None = None,
    gap_tol: float = GAP_TOL,
) -> MeasureResult:
    """Skew-information MIN over measurements that do not disturb rho_A."""
    if len(rho.dims) != 2:
        raise DimensionMismatch("min_s expects a bipartite state")
    rho_a = states.marginal(rho, 0)
    if not _state_spectrum(rho_a, gap_tol).degenerate:
        S = qmatrix.psd_sqrt(rho.matrix)
        es = qmatrix.hermitian_eig(rho_a.matrix)
        projectors = np.einsum("is,js->sij", es.vectors, es.vectors.conj())
        total = optimizer.sandwich_sum(S, projectors, 1, rho.dims[1])
        diagnostics: dict = {}
        value = _clamp(1.0 - total, diagnostics)
        return MeasureResult(
            value=value, method="nondegenerate_closed_form", diagnostics=diagnostics
        )
    return optimizer.maximize_min_s(rho, config, gap_tolerance=gap_tol)


def property_vi_check(
    rho_ab: DensityMatrix,
    config: OptimizerConfig | None = None,
    slack: float = 1e-7,
):
    """Nonbilocality of the swapped-copy pair dominates the plain MIN."""
    lhs = minbs(BilocalInput(states.swap_bipartite(rho_ab), rho_ab), config).value
    rhs = min_s(rho_ab, config).value
    return lhs, rhs, bool(lhs >= rhs - slack)
