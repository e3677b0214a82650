"""Command-line front end: compute, sweep, audit, validate.

State specs are either JSON files ({"dims": [...], "matrix": [[[re, im],
...], ...]} or {"family": ..., "params": {...}}) or inline strings like
"family=bell:phi+", "family=werner:0.5",
"family=bell_diagonal:0.4,0.3,0.2,0.1".

Exit codes: 0 success, 1 audit check failed, 2 invalid input,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, measures, operator_basis, optimizer, qmatrix, states
from .errors import QuantumError
from .optimizer import OptimizerConfig
from .states import BilocalInput, DensityMatrix

DEFAULT_SEED = 0

PRODUCT_SLACK = 1e-9
QC_SLACK = 1e-9
LOCAL_UNITARY_SLACK = 1e-7
PROPERTY_VI_SLACK = 1e-7
BOUND_SLACK = 1e-8
THM4_SLACK = 1e-9

ALL_CHECKS = (
    "property_i",
    "property_ii",
    "property_iv",
    "property_vi",
    "bound_t2",
    "thm4_consistency",
)


class InputError(Exception):
    """Bad user input: reported with exit code 2."""


# ---------------------------------------------------------------- state specs

def _matrix_from_pairs(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad matrix entries: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError("matrix must be a square nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _matrix_to_pairs(M: np.ndarray):
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def _family_state(name: str, params: dict) -> DensityMatrix:
    name = name.lower()
    if name == "bell":
        return states.bell(str(params.get("kind", "phi+")))
    if name == "bell_diagonal":
        return states.bell_diagonal(params["weights"])
    if name == "werner":
        return states.werner(float(params["v"]))
    if name == "classical_separable":
        return states.classical_separable()
    if name == "pure_schmidt":
        if "lam" in params:
            lam = float(params["lam"])
            return states.pure_from_schmidt([lam, np.sqrt(max(1 - lam**2, 0.0))])
        return states.pure_from_schmidt(params["coeffs"])
    if name == "quantum_classical":
        comps = [
            (_matrix_from_pairs(c["state"]), c["p"], c["k"]) for c in params["components"]
        ]
        return states.quantum_classical(comps)
    if name == "random":
        da = int(params.get("da", 2))
        db = int(params.get("db", 2))
        rank = int(params.get("rank", da * db))
        return states.random_bipartite(da, db, rank, int(params.get("seed", 0)))
    raise InputError(f"unknown state family {name!r}")


def _parse_inline(spec: str) -> DensityMatrix:
    body = spec[len("family="):]
    name, _, payload = body.partition(":")
    name = name.lower()
    params: dict = {}
    if payload:
        if name == "bell":
            params["kind"] = payload
        elif name == "werner":
            params["v"] = float(payload)
        elif name == "bell_diagonal":
            params["weights"] = [float(x) for x in payload.split(",")]
        elif name == "pure_schmidt":
            coeffs = [float(x) for x in payload.split(",")]
            params["coeffs" if len(coeffs) > 1 else "lam"] = (
                coeffs if len(coeffs) > 1 else coeffs[0]
            )
        elif name == "random":
            vals = [int(x) for x in payload.split(",")]
            keys = ("da", "db", "rank", "seed")
            params.update(dict(zip(keys, vals)))
        else:
            raise InputError(f"family {name!r} takes no inline parameters")
    return _family_state(name, params)


def resolve_state_spec(spec: str) -> DensityMatrix:
    """Inline family string or JSON file path -> validated DensityMatrix."""
    if spec.startswith("family="):
        rho = _parse_inline(spec)
    elif os.path.exists(spec):
        with open(spec) as fh:
            doc = json.load(fh)
        if "family" in doc:
            rho = _family_state(doc["family"], doc.get("params", {}))
        elif "matrix" in doc:
            if "dims" not in doc:
                raise InputError("matrix state files need a 'dims' field")
            M = _matrix_from_pairs(doc["matrix"])
            rho = DensityMatrix(M, tuple(int(d) for d in doc["dims"]))
        else:
            raise InputError("state file needs either 'family' or 'matrix'")
    else:
        raise InputError(f"state spec {spec!r} is neither family=... nor an existing file")
    report = states.validate(rho)
    if not report.passed:
        raise InputError("state validation failed: " + "; ".join(report.failures()))
    return rho


# ---------------------------------------------------------------- reporting

def _timing() -> dict:
    return {"timestamp": datetime.now(timezone.utc).isoformat()}


def _emit(report: dict, as_json: bool, stream=None) -> None:
    stream = stream or sys.stdout
    if as_json:
        json.dump(report, stream, sort_keys=True, indent=2)
        stream.write("\n")
    else:
        _emit_human(report, stream)


def _emit_human(doc: dict, stream, indent: str = "") -> None:
    for key in sorted(doc):
        val = doc[key]
        if isinstance(val, dict):
            stream.write(f"{indent}{key}:\n")
            _emit_human(val, stream, indent + "  ")
        else:
            stream.write(f"{indent}{key}: {val}\n")


def _measure_report(result, args, inputs: dict) -> dict:
    report = {
        "tool": "nonbilocal",
        "version": __version__,
        "inputs": inputs,
        "seed": args.seed,
        "measure": args.measure,
        "value": result.value,
        "method": result.method,
        "bounds": result.bounds or {},
        "diagnostics": {
            k: v for k, v in result.diagnostics.items() if isinstance(v, (int, float, str))
        },
    }
    if not args.no_timing:
        report["timing"] = _timing()
    return report


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed)


# ---------------------------------------------------------------- commands

def cmd_compute(args) -> int:
    t0 = time.perf_counter()
    rho_a = resolve_state_spec(args.a)
    inputs = {"a": args.a}
    if args.measure == "minbs":
        if not args.b:
            raise InputError("minbs needs two state specs (--a and --b)")
        rho_b = resolve_state_spec(args.b)
        inputs["b"] = args.b
        result = measures.minbs(BilocalInput(rho_a, rho_b), _config(args))
    elif args.measure == "min_s":
        result = measures.min_s(rho_a, _config(args))
    elif args.measure == "skew":
        if not args.observable:
            raise InputError("skew needs --observable pointing to a matrix file")
        with open(args.observable) as fh:
            doc = json.load(fh)
        K = _matrix_from_pairs(doc["matrix"] if "matrix" in doc else doc)
        inputs["observable"] = args.observable
        from .results import MeasureResult

        result = MeasureResult(
            value=measures.skew_information(rho_a, K), method="nondegenerate_closed_form"
        )
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown measure {args.measure}")
    report = _measure_report(result, args, inputs)
    if not args.no_timing:
        report["timing"]["wall_ms"] = (time.perf_counter() - t0) * 1e3
    _emit(report, args.json)
    return 0


def _sweep_state(args, x: float) -> DensityMatrix:
    params = {args.param: x}
    if args.family == "bell_diagonal" and args.param == "lam1":
        params = {"weights": [x, 1 - x, 0.0, 0.0]}
    return _family_state(args.family, params)


def cmd_sweep(args) -> int:
    grid = np.linspace(args.start, args.stop, args.steps)
    writer = csv.writer(sys.stdout)
    writer.writerow(["param", "value", "method", "t2_bound", "wall_ms"])
    for x in grid:
        t0 = time.perf_counter()
        rho = _sweep_state(args, float(x))
        if args.measure == "minbs":
            first = states.swap_bipartite(rho) if args.scenario == "swapped-pair" else rho
            result = measures.minbs(BilocalInput(first, rho), _config(args))
            t2 = result.bounds.get("t2_upper", "") if result.bounds else ""
        else:
            result = measures.min_s(rho, _config(args))
            t2 = ""
        wall = "" if args.no_timing else f"{(time.perf_counter() - t0) * 1e3:.3f}"
        writer.writerow([f"{x:.12g}", f"{result.value:.12g}", result.method, t2, wall])
    return 0


def _random_pair(dims, rank, rng) -> BilocalInput:
    m, n = dims
    return BilocalInput(
        states.random_bipartite(m, n, rank, rng), states.random_bipartite(m, n, rank, rng)
    )


def _direct_eigenbasis_objective(inp: BilocalInput) -> float:
    """Direct trace-sum objective with the product eigenbasis measurement on BC."""
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
    return optimizer.sandwich_sum(S, projs, m, v)


def _audit_one(check: str, dims, rank, rng, config) -> float:
    """Run one sample of a property check; returns the slack (<= 0 passes)."""
    m, n = dims
    if check == "property_i":
        inp = BilocalInput(
            states.DensityMatrix(
                np.kron(states.random_density(m, m, rng).matrix,
                        states.random_density(n, n, rng).matrix), (m, n)),
            states.DensityMatrix(
                np.kron(states.random_density(m, m, rng).matrix,
                        states.random_density(n, n, rng).matrix), (m, n)),
        )
        return measures.minbs(inp, config).value - PRODUCT_SLACK
    if check == "property_ii":
        probs = rng.dirichlet(np.ones(n))
        while np.min(np.abs(np.diff(np.sort(probs)))) < 1e-3:
            probs = rng.dirichlet(np.ones(n))
        qc = states.quantum_classical(
            [(states.random_density(m, m, rng).matrix, p, k) for k, p in enumerate(probs)]
        )
        probs2 = rng.dirichlet(np.ones(m))
        while np.min(np.abs(np.diff(np.sort(probs2)))) < 1e-3:
            probs2 = rng.dirichlet(np.ones(m))
        cq = states.classical_quantum(
            [(states.random_density(n, n, rng).matrix, p, k) for k, p in enumerate(probs2)]
        )
        return measures.minbs(BilocalInput(qc, cq), config).value - QC_SLACK
    if check == "property_iv":
        inp = _random_pair(dims, rank, rng)
        v1 = measures.minbs(inp, config).value
        conj = BilocalInput(
            states.conjugate_local(
                inp.rho_ab, [optimizer.haar_unitary(m, rng), optimizer.haar_unitary(n, rng)]
            ),
            states.conjugate_local(
                inp.rho_cd, [optimizer.haar_unitary(m, rng), optimizer.haar_unitary(n, rng)]
            ),
        )
        v2 = measures.minbs(conj, config).value
        return abs(v1 - v2) - LOCAL_UNITARY_SLACK
    if check == "property_vi":
        rho = states.random_bipartite(m, n, rank, rng)
        lhs, rhs, _ = measures.property_vi_check(rho, config)
        return (rhs - lhs) - PROPERTY_VI_SLACK
    if check == "bound_t2":
        inp = _random_pair(dims, rank, rng)
        result = measures.minbs(inp, config)
        return (result.value - result.bounds["t2_upper"]) - BOUND_SLACK
    if check == "thm4_consistency":
        inp = _random_pair(dims, rank, rng)
        closed = measures.minbs_both_nondegenerate(inp)
        direct = 1.0 - _direct_eigenbasis_objective(inp)
        t2_ok = closed.value <= closed.bounds["t2_upper"] + BOUND_SLACK
        slack = abs(closed.value - direct) - THM4_SLACK
        return slack if t2_ok else max(slack, 1.0)
    raise InputError(f"unknown check {check!r}")


def run_audit(count, dims, rank, seed, checks, config) -> dict:
    summary = {}
    for check in checks:
        fails = []
        worst = -np.inf
        for i in range(count):
            rng = np.random.default_rng([seed, i])
            slack = _audit_one(check, dims, rank, rng, config)
            worst = max(worst, slack)
            if slack > 0:
                fails.append(i)
        summary[check] = {
            "passed": count - len(fails),
            "failed": len(fails),
            "worst_slack": float(worst),
            "failing_seeds": fails[:20],
        }
    return summary


def cmd_audit(args) -> int:
    dims = tuple(int(x) for x in args.dims.split(","))
    if len(dims) != 2:
        raise InputError("--dims must be 'm,n'")
    checks = ALL_CHECKS if args.checks == "all" else tuple(args.checks.split(","))
    for c in checks:
        if c not in ALL_CHECKS:
            raise InputError(f"unknown check {c!r}; choose from {ALL_CHECKS}")
    rank = args.rank if args.rank else dims[0] * dims[1]
    config = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    t0 = time.perf_counter()
    summary = run_audit(args.count, dims, rank, args.seed, checks, config)
    report = {
        "tool": "nonbilocal",
        "version": __version__,
        "ensemble": {"count": args.count, "dims": list(dims), "rank": rank, "seed": args.seed},
        "checks": summary,
    }
    if not args.no_timing:
        report["timing"] = _timing()
        report["timing"]["wall_ms"] = (time.perf_counter() - t0) * 1e3
    _emit(report, args.json)
    return 1 if any(v["failed"] for v in summary.values()) else 0


def cmd_validate(args) -> int:
    if args.a.startswith("family="):
        rho = _parse_inline(args.a)
    else:
        with open(args.a) as fh:
            doc = json.load(fh)
        if "family" in doc:
            rho = _family_state(doc["family"], doc.get("params", {}))
        else:
            rho = DensityMatrix(_matrix_from_pairs(doc["matrix"]), tuple(doc["dims"]))
    report = states.validate(rho)
    doc = {
        "hermiticity_error": report.hermiticity_error,
        "min_eigenvalue": report.min_eigenvalue,
        "trace_error": report.trace_error,
        "passed": report.passed,
        "failures": report.failures(),
    }
    _emit(doc, args.json)
    return 0 if report.passed else 2


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonbilocal", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument(
            "--no-timing", action="store_true", help="omit timing fields (comparison mode)"
        )

    c = sub.add_parser("compute", help="compute one measure value")
    c.add_argument("--measure", choices=("skew", "min_s", "minbs"), required=True)
    c.add_argument("--a", required=True, help="state spec for the first source")
    c.add_argument("--b", help="state spec for the second source (minbs)")
    c.add_argument("--observable", help="observable matrix file (skew)")
    common(c)
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="sweep one family parameter, CSV output")
    s.add_argument("--family", required=True)
    s.add_argument("--param", required=True)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--measure", choices=("min_s", "minbs"), default="minbs")
    s.add_argument("--scenario", choices=("pair", "swapped-pair"), default="swapped-pair")
    common(s)
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("audit", help="property checks over a random ensemble")
    a.add_argument("--count", type=int, default=100)
    a.add_argument("--dims", default="2,2")
    a.add_argument("--rank", type=int, default=0, help="0 means full rank")
    a.add_argument("--checks", default="all")
    common(a)
    a.set_defaults(func=cmd_audit)

    v = sub.add_parser("validate", help="validate a state spec")
    v.add_argument("--a", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuantumError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
