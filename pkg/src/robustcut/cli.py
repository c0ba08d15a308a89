"""Command-line front end: ``robustcut solve problem.json [flags]``.

Problem files are JSON objects::

    {
      "n": 2, "k": 0,
      "c": [-1, -1], "lower": [0, 0], "upper": [10, 10],
      "certain":   [{"coeffs": [1, 0], "rhs": 8}],
      "uncertain": [{"a": [1, 1], "beta": 1, "sigma": [[1, 0], [0, 1]], "b": 10}]
    }

``certain`` may be omitted.  Exit codes: 0 converged (OptimalExact or
EpsFeasible), 1 bad input, 2 RobustInfeasible, 3 IterationLimit.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import verify
from .cutting_plane import CutMode, SolveReport, SolverConfig, SolveStatus, solve_robust
from .errors import ParseError, RobustCutError
from .model import RobustProblem, validate_problem

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3

_EXIT_CODES = {
    SolveStatus.OPTIMAL_EXACT: EXIT_OK,
    SolveStatus.EPS_FEASIBLE: EXIT_OK,
    SolveStatus.ROBUST_INFEASIBLE: EXIT_INFEASIBLE,
    SolveStatus.ITERATION_LIMIT: EXIT_LIMIT,
}

TRACE_HEADER = ["iteration", "master_objective", "max_violation", "cuts_added"]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _vector(value: Any, where: str) -> list[float]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array of numbers")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _matrix(value: Any, where: str) -> list[list[float]]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array of arrays")
    return [_vector(row, f"{where}[{i}]") for i, row in enumerate(value)]


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def problem_from_dict(doc: Any) -> RobustProblem:
    """Check the JSON document's shape, then validate it as a problem."""
    top = "problem"
    fields = {
        "n": _integer(_require(doc, "n", top), "n"),
        "k": _integer(_require(doc, "k", top), "k"),
        "c": _vector(_require(doc, "c", top), "c"),
        "lower": _vector(_require(doc, "lower", top), "lower"),
        "upper": _vector(_require(doc, "upper", top), "upper"),
    }
    certain = doc.get("certain", [])
    if not isinstance(certain, list):
        raise ParseError("certain: expected an array")
    fields["certain"] = [
        {"coeffs": _vector(_require(row, "coeffs", f"certain[{i}]"), f"certain[{i}].coeffs"),
         "rhs": _number(_require(row, "rhs", f"certain[{i}]"), f"certain[{i}].rhs")}
        for i, row in enumerate(certain)
    ]
    uncertain = _require(doc, "uncertain", top)
    if not isinstance(uncertain, list):
        raise ParseError("uncertain: expected an array")
    parsed = []
    for i, row in enumerate(uncertain):
        where = f"uncertain[{i}]"
        parsed.append({
            "a": _vector(_require(row, "a", where), f"{where}.a"),
            "beta": _number(_require(row, "beta", where), f"{where}.beta"),
            "sigma": _matrix(_require(row, "sigma", where), f"{where}.sigma"),
            "b": _number(_require(row, "b", where), f"{where}.b"),
        })
    fields["uncertain"] = parsed
    return validate_problem(fields)


def parse_problem(path: str | Path) -> RobustProblem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return problem_from_dict(doc)


def problem_to_dict(problem: RobustProblem) -> dict:
    return {
        "n": problem.n,
        "k": problem.k,
        "c": problem.c.tolist(),
        "lower": problem.lower.tolist(),
        "upper": problem.upper.tolist(),
        "certain": [{"coeffs": r.coeffs.tolist(), "rhs": r.rhs} for r in problem.certain],
        "uncertain": [{"a": u.a.tolist(), "beta": u.beta, "sigma": u.sigma.tolist(), "b": u.b}
                      for u in problem.uncertain],
    }


def write_problem(problem: RobustProblem, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")


def write_trace(report: SolveReport, n: int, path: str | Path) -> None:
    """One CSV row per iteration; floats use repr so reruns are byte-identical."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER + [f"x_{j}" for j in range(n)])
        for t in report.trace:
            writer.writerow([t.iteration, repr(float(t.master_objective)),
                             repr(float(t.max_violation)), t.cuts_added]
                            + [repr(float(v)) for v in t.x])


def format_report(report: SolveReport) -> str:
    lines = [f"status: {report.status.value}", f"iterations: {report.iterations}"]
    if report.x is not None:
        lines.append(f"objective: {report.objective:.12g}")
        lines.append("x: " + " ".join(f"{v:.12g}" for v in report.x))
    lines.append(f"cuts: {len(report.cuts)}")
    if report.trace:
        lines.append(f"max violation: {report.trace[-1].max_violation:.3e}")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exit code 2 collides with RobustInfeasible
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustcut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    solve = sub.add_parser("solve", help="solve a robust problem file")
    solve.add_argument("problem", help="JSON problem file")
    solve.add_argument("--eps", type=float, default=1e-6, help="stopping tolerance on max g_i(x)")
    solve.add_argument("--max-iter", type=int, default=1000)
    solve.add_argument("--cut-mode", choices=[m.value for m in CutMode],
                       default=CutMode.VIOLATED_ONLY.value)
    solve.add_argument("--trace", metavar="PATH", help="write the iteration trace as CSV")
    solve.add_argument("--oracle", choices=["grid", "enumerate", "none"], default="none",
                       help="cross-check the result with an independent oracle")
    solve.add_argument("--seed", type=int, default=0, help="seed for sampling oracles")
    solve.add_argument("--grid-resolution", type=int, default=501)
    solve.add_argument("--samples", type=int, default=100_000,
                       help="sphere samples per constraint in the oracle audit")
    solve.add_argument("-v", "--verbose", action="store_true")
    return parser


def _run_oracle(args, problem: RobustProblem, report: SolveReport) -> None:
    try:
        if args.oracle == "grid":
            ref = verify.reference_solve_grid(problem, args.grid_resolution)
        else:
            ref = verify.reference_solve_enumerate(problem)
    except (RobustCutError, ValueError) as exc:
        print(f"oracle ({args.oracle}): unavailable: {exc}")
        return
    line = f"oracle ({args.oracle}): {ref:.12g}"
    if report.objective is not None:
        line += f" (difference {ref - report.objective:.3e})"
    print(line)
    if report.x is None:
        return
    for i, con in enumerate(problem.uncertain):
        sampled = verify.sample_ellipsoid_max(con, report.x, args.samples, args.seed + i)
        print(f"support audit [{i}]: sampled {sampled.value - con.b:.6e}, "
              f"analytic {verify.support_value(con, report.x) - con.b:.6e}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        problem = parse_problem(args.problem)
        config = SolverConfig(eps=args.eps, max_iterations=args.max_iter,
                              cut_mode=CutMode(args.cut_mode))
    except (RobustCutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        report = solve_robust(problem, config)
    except RobustCutError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_report(report))
    if args.trace:
        write_trace(report, problem.n, args.trace)
    if args.oracle != "none":
        _run_oracle(args, problem, report)
    return _EXIT_CODES[report.status]


if __name__ == "__main__":
    sys.exit(main())
