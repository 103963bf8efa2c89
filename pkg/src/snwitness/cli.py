"""Command-line front end: classify, scan, lift, lower and verify.

Every command is a pure function of its arguments, input files and seed;
reports embed the seed so a published number can be reproduced from its own
report.  Exit codes: 0 success, 2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .checks import SUITES, suite_oracle
from .embedding import lift_operator, lift_state, lower_ensemble, lower_state
from .errors import SnWitnessError
from .families import (
    IsotropicWitnessSpec,
    ScanResult,
    make_isotropic_witness,
    threshold_scan,
)
from .hilbert import Dims, Operator, PureState
from .witness import (
    OptimizerConfig,
    WitnessClassification,
    classify_schmidt_witness,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class CliInputError(SnWitnessError):
    """Malformed command-line input or input file."""


# ---------------------------------------------------------------------------
# JSON representations


def _complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pair_to_complex(pair, where: str) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise CliInputError(f"{where}: expected a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def dims_to_json(dims: Dims) -> dict:
    return {"dA": dims.dA, "dB": dims.dB, "kA": dims.kA, "kB": dims.kB}


def dims_from_json(data, where: str = "dims") -> Dims:
    if not isinstance(data, dict):
        raise CliInputError(f"{where}: expected an object")
    try:
        return Dims(
            int(data["dA"]), int(data["dB"]), int(data.get("kA", 1)), int(data.get("kB", 1))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CliInputError(f"{where}: {exc}") from exc


def state_to_json(state: PureState) -> dict:
    return {
        "dims": dims_to_json(state.dims),
        "amplitudes": [_complex_to_pair(z) for z in state.amplitudes],
    }


def state_from_json(data: dict) -> PureState:
    dims = dims_from_json(data.get("dims"), "dims")
    raw = data.get("amplitudes")
    if not isinstance(raw, list):
        raise CliInputError("amplitudes: expected a list of [re, im] pairs")
    amps = np.array(
        [_pair_to_complex(pair, f"amplitudes[{i}]") for i, pair in enumerate(raw)]
    )
    if amps.shape != (dims.total,):
        raise CliInputError(
            f"amplitudes: expected {dims.total} entries, got {len(amps)}"
        )
    return PureState(dims, amps)


def operator_to_json(op: Operator) -> dict:
    return {
        "dims": dims_to_json(op.dims),
        "matrix": [[_complex_to_pair(z) for z in row] for row in op.matrix],
    }


def operator_from_json(data: dict) -> Operator:
    dims = dims_from_json(data.get("dims"), "dims")
    raw = data.get("matrix")
    n = dims.total
    if not isinstance(raw, list) or len(raw) != n:
        raise CliInputError(f"matrix: expected {n} rows")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise CliInputError(f"matrix[{i}]: expected {n} entries")
        rows.append([_pair_to_complex(pair, f"matrix[{i}][{j}]") for j, pair in enumerate(row)])
    matrix = np.array(rows)
    hermitian = bool(np.abs(matrix - matrix.conj().T).max() < 1e-10)
    return Operator(dims, matrix, hermitian=hermitian)


def load_payload(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CliInputError(f"{path}: expected a JSON object")
    return data


def classification_to_json(cls: WitnessClassification) -> dict:
    return {
        "verdict": cls.verdict,
        "k": cls.k,
        "minEigenvalue": cls.min_eigenvalue,
        "perLevelProductMin": {str(l): v for l, v in cls.per_level_product_min.items()},
        "detectedState": None
        if cls.detected_state is None
        else state_to_json(cls.detected_state),
        "converged": cls.converged,
    }


def scan_to_json(scan: ScanResult) -> dict:
    return {
        "rows": [
            {
                "a": row.a,
                "verdict": row.verdict,
                "k": row.k,
                "minEigenvalue": None if np.isnan(row.min_eigenvalue) else row.min_eigenvalue,
                "productMin": {str(l): v for l, v in row.product_min.items()},
                "restarts": row.restarts,
                "converged": row.converged,
                "error": row.error,
            }
            for row in scan.rows
        ],
        "boundaries": [
            {
                "leftVerdict": b.left_verdict,
                "rightVerdict": b.right_verdict,
                "aLow": b.a_low,
                "aHigh": b.a_high,
                "aStar": b.a_star,
                "width": b.width,
            }
            for b in scan.boundaries
        ],
    }


def scan_to_csv(scan: ScanResult) -> str:
    lines = ["a,verdict,k,min_eig,prodmin_l1,prodmin_l2,restarts,converged"]
    for row in scan.rows:
        cells = [
            repr(row.a),
            row.verdict,
            "" if row.k is None else str(row.k),
            "" if np.isnan(row.min_eigenvalue) else repr(row.min_eigenvalue),
            "" if 1 not in row.product_min else repr(row.product_min[1]),
            "" if 2 not in row.product_min else repr(row.product_min[2]),
            str(row.restarts),
            "true" if row.converged else "false",
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def build_report(command: str, inputs: dict, result, diagnostics: dict | None = None) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "result": result,
        "diagnostics": diagnostics or {},
        "version": __version__,
    }


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(report: dict, output: str | None):
    _emit(json.dumps(report, indent=2) + "\n", output)


# ---------------------------------------------------------------------------
# commands


def _config_from_args(args) -> OptimizerConfig:
    return OptimizerConfig(
        seed=args.seed, restarts=args.restarts, positivity_tol=args.tol
    )


def _load_operator_arg(args) -> tuple[Operator, dict]:
    if args.input:
        data = load_payload(args.input)
        if "matrix" not in data:
            raise CliInputError(f"{args.input}: missing field 'matrix'")
        return operator_from_json(data), {"input": args.input}
    if args.family != "isotropic":
        raise CliInputError(f"unknown family {args.family!r}")
    if args.a is None:
        raise CliInputError("--a is required with --family isotropic")
    spec = IsotropicWitnessSpec(args.a, args.dim)
    return make_isotropic_witness(spec), {"family": "isotropic", "a": args.a, "dim": args.dim}


def cmd_classify(args) -> int:
    operator, source = _load_operator_arg(args)
    config = _config_from_args(args)
    cls = classify_schmidt_witness(operator, args.max_k, config)
    report = build_report(
        "classify",
        {**source, "maxK": args.max_k, "config": config.to_json()},
        classification_to_json(cls),
    )
    _emit_report(report, args.output)
    return EXIT_OK if cls.converged else EXIT_NUMERICAL


def cmd_scan(args) -> int:
    if args.steps < 1:
        raise CliInputError(f"--steps must be >= 1, got {args.steps}")
    if not 0 <= args.a_from < 1 or not 0 <= args.a_to < 1 or args.a_to < args.a_from:
        raise CliInputError("scan grid must satisfy 0 <= a-from <= a-to < 1")
    grid = np.linspace(args.a_from, args.a_to, args.steps)
    config = _config_from_args(args)
    scan = threshold_scan(
        grid,
        d=args.dim,
        config=config,
        max_k=args.max_k,
        bisect=args.bisect,
        bisect_tol=args.bisect_tol,
    )
    if any(row.error for row in scan.rows):
        code = EXIT_NUMERICAL
    elif not all(row.converged for row in scan.rows):
        code = EXIT_NUMERICAL
    else:
        code = EXIT_OK
    if args.format == "csv":
        _emit(scan_to_csv(scan), args.output)
        return code
    report = build_report(
        "scan",
        {
            "aFrom": args.a_from,
            "aTo": args.a_to,
            "steps": args.steps,
            "dim": args.dim,
            "maxK": args.max_k,
            "bisect": args.bisect,
            "bisectTol": args.bisect_tol,
            "config": config.to_json(),
        },
        scan_to_json(scan),
    )
    _emit_report(report, args.output)
    return code


def cmd_lift(args) -> int:
    data = load_payload(args.input)
    if "amplitudes" in data:
        state = state_from_json(data)
        lifted = lift_state(state, args.k)
        payload = state_to_json(lifted.state)
        diagnostics = {
            "kind": "state",
            "sourceRank": lifted.source_rank,
            "blockCount": lifted.block_count,
            "normSquared": float(lifted.state.norm() ** 2),
        }
    elif "matrix" in data:
        operator = operator_from_json(data)
        lifted_op = lift_operator(operator, args.k)
        payload = operator_to_json(lifted_op.operator)
        diagnostics = {
            "kind": "operator",
            "trace": lifted_op.operator.trace().real,
        }
    else:
        raise CliInputError(f"{args.input}: missing field 'amplitudes' or 'matrix'")
    report = build_report(
        "lift", {"input": args.input, "k": args.k}, payload, diagnostics
    )
    _emit_report(report, args.output)
    return EXIT_OK


def cmd_lower(args) -> int:
    data = load_payload(args.input)
    if "amplitudes" in data:
        state = state_from_json(data)
        lowered = lower_state(state, args.k)
        payload = state_to_json(lowered)
        diagnostics = {"kind": "state", "normSquared": float(lowered.norm() ** 2)}
    elif "matrix" in data:
        operator = operator_from_json(data)
        evals, evecs = np.linalg.eigh(operator.matrix)
        ensemble = [
            (float(w), PureState(operator.dims, np.ascontiguousarray(evecs[:, i])))
            for i, w in enumerate(evals)
            if w > 1e-12
        ]
        lowered_op = lower_ensemble(ensemble, args.k)
        payload = operator_to_json(lowered_op)
        diagnostics = {"kind": "operator", "trace": lowered_op.trace().real}
    else:
        raise CliInputError(f"{args.input}: missing field 'amplitudes' or 'matrix'")
    report = build_report(
        "lower", {"input": args.input, "k": args.k}, payload, diagnostics
    )
    _emit_report(report, args.output)
    return EXIT_OK


def _parse_dims(text: str) -> Dims:
    try:
        a, b = text.lower().split("x")
        return Dims(int(a), int(b))
    except (ValueError, SnWitnessError) as exc:
        raise CliInputError(f"--dims must look like 2x3, got {text!r}") from exc


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise CliInputError(
            f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}"
        )
    if args.suite == "oracle":
        dims = _parse_dims(args.dims)
        config = OptimizerConfig(seed=args.seed, restarts=args.restarts)
        result = suite_oracle(args.trials, args.seed, dims=dims, config=config)
    else:
        result = SUITES[args.suite](args.trials, args.seed, d=args.dim)
    report = build_report(
        "verify",
        {"suite": args.suite, "trials": args.trials, "seed": args.seed},
        result,
    )
    _emit_report(report, args.output)
    return EXIT_OK if result["pass"] else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="optimizer seed")
    parser.add_argument("--restarts", type=int, default=64, help="see-saw restarts")
    parser.add_argument(
        "--tol", type=float, default=1e-7, help="positivity tolerance for verdicts"
    )
    parser.add_argument("--output", default=None, help="write the report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snwitness",
        description="Construct, classify and optimize Schmidt-number witnesses.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", help="classify an operator")
    p.add_argument("--input", default=None, help="operator JSON file")
    p.add_argument("--family", default="isotropic", help="built-in family name")
    p.add_argument("--a", type=float, default=None, help="family parameter")
    p.add_argument("--dim", type=int, default=3, help="local dimension")
    p.add_argument("--max-k", type=int, default=None, dest="max_k")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", help="classify the isotropic family on a grid")
    p.add_argument("--a-from", type=float, required=True, dest="a_from")
    p.add_argument("--a-to", type=float, required=True, dest="a_to")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--max-k", type=int, default=None, dest="max_k")
    p.add_argument("--bisect", action="store_true", help="bisect verdict boundaries")
    p.add_argument("--bisect-tol", type=float, default=5e-3, dest="bisect_tol")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("lift", help="lift a state or operator JSON file")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True, help="ancilla dimension")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("lower", help="lower a state or operator JSON file")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True, help="ancilla dimension")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("verify", help="run a named identity suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dim", type=int, default=3, help="local dimension for the suites")
    p.add_argument("--dims", default="2x2", help="bipartite dims for the oracle suite")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SnWitnessError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
