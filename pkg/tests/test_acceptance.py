"""Acceptance suite: one printed pass/fail line per criterion.

Criterion 3 encodes the published Bell-diagonal closed form. For a large
part of the simplex that formula describes only the Bell-basis measurement,
which is not the optimal one, so the criterion fails honestly; see the
README for the analysis. All other criteria pass.
"""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from nonbilocal import cli, measures, operator_basis, optimizer, qmatrix, states
from nonbilocal.optimizer import OptimizerConfig
from nonbilocal.states import BilocalInput, DensityMatrix


def _report(num: int, label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[criterion {num}] {label}: {status}{suffix}")
    assert ok, f"criterion {num} {label}: {detail}"


def test_criterion_1_bell_pair_closed_form_and_optimizer():
    inp = BilocalInput(states.bell("phi+"), states.bell("phi+"))
    closed = measures.minbs(inp)
    t0 = time.perf_counter()
    opt = optimizer.maximize_minbs(inp, OptimizerConfig(restarts=32, seed=0))
    elapsed = time.perf_counter() - t0
    ok = (
        closed.method == "pure_closed_form"
        and abs(closed.value - 0.75) < 1e-12
        and abs(opt.value - 0.75) < 1e-6
        and elapsed < 10.0
    )
    _report(1, "Bell pair value 3/4", ok,
            f"closed={closed.value}, optimizer={opt.value:.9f}, {elapsed:.2f}s")


def test_criterion_2_classical_pair_optimizer_and_hadamard():
    cs = states.classical_separable()
    res = measures.minbs(BilocalInput(cs, cs), OptimizerConfig(restarts=6, seed=0))
    S = qmatrix.psd_sqrt(np.kron(cs.matrix, cs.matrix))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    projs = [
        np.outer(np.kron(h[:, s], h[:, t]), np.kron(h[:, s], h[:, t]))
        for s in range(2)
        for t in range(2)
    ]
    hadamard = optimizer.sandwich_sum(S, projs, 2, 2)
    ok = (
        res.method == "optimizer"
        and abs(res.value - 0.75) < 1e-6
        and abs(hadamard - 0.25) < 1e-12
    )
    _report(2, "classical pair value 3/4", ok,
            f"optimizer={res.value:.9f}, hadamard objective={hadamard:.12f}")


def test_criterion_3_bell_diagonal_grid():
    config = OptimizerConfig(restarts=3, seed=0)
    t0 = time.perf_counter()
    # boundary anchors
    anchors_ok = True
    for lam, expect in (((1, 0, 0, 0), 0.75), ((0.25,) * 4, 0.0)):
        rho = states.bell_diagonal(lam)
        inp = BilocalInput(states.swap_bipartite(rho), rho)
        val = optimizer.maximize_minbs(inp, config).value
        anchors_ok &= abs(val - expect) < 1e-6
    mismatches = []
    grid = [i * 0.25 for i in range(5)]
    for l1 in grid:
        for l2 in grid:
            for l3 in grid:
                l4 = 1.0 - l1 - l2 - l3
                if l4 < -1e-12:
                    continue
                lam = (l1, l2, l3, max(l4, 0.0))
                formula = measures.bell_diagonal_minbs(lam)
                rho = states.bell_diagonal(lam)
                inp = BilocalInput(states.swap_bipartite(rho), rho)
                val = optimizer.maximize_minbs(inp, config).value
                if abs(val - formula) > 1e-6:
                    mismatches.append((lam, val, formula))
    elapsed = time.perf_counter() - t0
    worst = max(mismatches, key=lambda m: abs(m[1] - m[2])) if mismatches else None
    ok = anchors_ok and not mismatches and elapsed < 600.0
    detail = f"anchors_ok={anchors_ok}, {elapsed:.1f}s"
    if worst:
        detail += (
            f", {len(mismatches)} grid points deviate; worst at lambda={worst[0]}:"
            f" optimizer={worst[1]:.6f} vs formula={worst[2]:.6f}"
        )
    _report(3, "Bell-diagonal closed form matches optimizer on grid", ok, detail)


def test_criterion_4_pure_schmidt_pairs():
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng([4, i])
        d = 2 if i % 2 == 0 else 3
        lam = np.sqrt(rng.dirichlet(np.ones(d)))
        mu = np.sqrt(rng.dirichlet(np.ones(d)))
        closed = measures.minbs_pure(lam, mu)
        inp = BilocalInput(states.pure_from_schmidt(lam), states.pure_from_schmidt(mu))
        opt = optimizer.maximize_minbs(inp, OptimizerConfig(restarts=2, seed=i))
        worst = max(worst, abs(closed - opt.value))
    _report(4, "pure closed form matches optimizer (20 pairs)", worst < 1e-6,
            f"worst |diff|={worst:.2e}")


def _direct_eigenbasis_value(inp: BilocalInput) -> float:
    m, n = inp.rho_ab.dims
    u, v = inp.rho_cd.dims
    S = qmatrix.psd_sqrt(np.kron(inp.rho_ab.matrix, inp.rho_cd.matrix))
    eb = qmatrix.hermitian_eig(states.marginal(inp.rho_ab, 1).matrix).vectors
    ec = qmatrix.hermitian_eig(states.marginal(inp.rho_cd, 0).matrix).vectors
    projs = [
        np.outer(np.kron(eb[:, s], ec[:, t]), np.kron(eb[:, s], ec[:, t]).conj())
        for s in range(n)
        for t in range(u)
    ]
    return 1.0 - optimizer.sandwich_sum(S, projs, m, v)


def test_criterion_5_nondegenerate_closed_form():
    worst_diff = 0.0
    worst_bound = -np.inf
    for i in range(100):
        rng = np.random.default_rng([5, i])
        inp = BilocalInput(
            states.random_bipartite(2, 2, 4, rng), states.random_bipartite(2, 2, 4, rng)
        )
        res = measures.minbs_both_nondegenerate(inp)
        direct = _direct_eigenbasis_value(inp)
        worst_diff = max(worst_diff, abs(res.value - direct))
        worst_bound = max(worst_bound, res.value - res.bounds["t2_upper"])
    ok = worst_diff < 1e-9 and worst_bound < 1e-8
    _report(5, "nondegenerate closed form vs direct evaluation (100 pairs)", ok,
            f"worst |diff|={worst_diff:.2e}, worst bound slack={worst_bound:.2e}")


def test_criterion_6_qubit_c_closed_form():
    worst = 0.0
    config = OptimizerConfig(restarts=3, seed=0)
    for i in range(50):
        rng = np.random.default_rng([6, i])
        rho_ab = states.random_bipartite(2, 2, 4, rng)
        while measures._state_spectrum(states.marginal(rho_ab, 1), measures.GAP_TOL).degenerate:
            rho_ab = states.random_bipartite(2, 2, 4, rng)
        weights = rng.dirichlet(np.ones(4))
        inp = BilocalInput(rho_ab, states.bell_diagonal(weights))
        closed = measures.minbs_b_nondegenerate(inp)
        opt = optimizer.maximize_minbs(inp, config)
        worst = max(worst, abs(closed.value - opt.value))
    _report(6, "qubit closed form matches optimizer (50 inputs)", worst < 1e-7,
            f"worst |diff|={worst:.2e}")


def test_criterion_7_property_audits():
    config = OptimizerConfig(restarts=2, seed=0)
    summary = cli.run_audit(
        count=100,
        dims=(2, 2),
        rank=4,
        seed=7,
        checks=("property_i", "property_ii", "property_iv", "property_vi"),
        config=config,
    )
    failed = {k: v["failed"] for k, v in summary.items() if v["failed"]}
    worst = {k: v["worst_slack"] for k, v in summary.items()}
    _report(7, "property audits i/ii/iv/vi (100 samples each)", not failed,
            f"failures={failed or 'none'}, worst slacks={worst}")


def test_criterion_8_reduction_identity():
    worst = 0.0
    for i in range(100):
        rng = np.random.default_rng([8, i])
        rho = DensityMatrix(states.random_density(8, 8, rng).matrix, (2, 2, 2))
        U = optimizer.haar_unitary(2, rng)
        projs = [np.outer(U[:, g], U[:, g].conj()) for g in range(2)]
        skew_sum = sum(
            measures.skew_information(
                DensityMatrix(rho.matrix, (8,)), np.kron(np.eye(2), np.kron(P, np.eye(2)))
            )
            for P in projs
        )
        S = qmatrix.psd_sqrt(rho.matrix)
        trace_form = 1.0 - optimizer.sandwich_sum(S, projs, 2, 2)
        worst = max(worst, abs(skew_sum - trace_form))
    _report(8, "skew-sum reduction identity (100 pairs)", worst < 1e-10,
            f"worst |diff|={worst:.2e}")


def _run_cli_json(args):
    proc = subprocess.run(
        [sys.executable, "-m", "nonbilocal.cli", *args],
        capture_output=True, text=True, timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    doc.pop("timing", None)
    return json.dumps(doc, sort_keys=True).encode()


def test_criterion_9_cli_determinism():
    compute = [
        "compute", "--measure", "minbs",
        "--a", "family=bell_diagonal:0.5,0.5,0,0", "--b", "family=bell_diagonal:0.5,0.5,0,0",
        "--restarts", "2", "--seed", "3", "--json",
    ]
    audit = [
        "audit", "--count", "3", "--checks", "property_i,bound_t2",
        "--restarts", "2", "--seed", "5", "--json",
    ]
    same_compute = _run_cli_json(compute) == _run_cli_json(compute)
    same_audit = _run_cli_json(audit) == _run_cli_json(audit)
    _report(9, "CLI determinism (byte-identical sans timing)",
            same_compute and same_audit,
            f"compute identical={same_compute}, audit identical={same_audit}")
