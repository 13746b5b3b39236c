"""Command-line front end.

Subcommands:

* ``certify <instance.json>`` -- print the contraction certificate; exit 0
  when certified, 2 when violated, 3 when inconclusive.
* ``solve <instance.json> --x0 <point> [--eps E]`` -- run the Picard orbit
  and print the trace plus Cauchy diagnostics (for gauges in class G2).
* ``fuzz --seed S --trials N [--break MODE]`` -- run the fuzz loop and print
  its report; exit 0 iff no violations.
* ``report <trace.json>`` -- human-readable summary of a solve output.

Malformed input exits 1 with a diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .contraction import certify_condition_G, operator_from_json, validate_operator
from .errors import GphiError
from .gauges import (
    certify_gauge_class,
    certify_phi,
    epsilon0,
    gauge_from_json,
    log_grid,
    phi_from_json,
)
from .harness import FuzzConfig, fuzz
from .solver import picard_iterate, verify_cauchy_bound
from .spaces import FiniteSpace, space_from_json

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gphi",
        description="certify gauged contractions and iterate them to their fixed points")
    parser.add_argument("--tol", type=float, default=1e-10,
                        help="solver convergence tolerance")
    parser.add_argument("--budget", type=int, default=10 ** 6,
                        help="iteration budget for certifications and thresholds")
    parser.add_argument("--grid-density", type=int, default=512,
                        help="grid points per decade for certification grids")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", help="certify the contraction condition")
    p_cert.add_argument("instance")
    p_cert.add_argument("--mode", choices=["auto", "exhaustive", "random"],
                        default="auto")
    p_cert.add_argument("--seed", type=int, default=0)
    p_cert.add_argument("--samples", type=int, default=4096)

    p_solve = sub.add_parser("solve", help="run the Picard orbit")
    p_solve.add_argument("instance")
    p_solve.add_argument("--x0", required=True)
    p_solve.add_argument("--eps", type=float, default=None)
    p_solve.add_argument("--max-iter", type=int, default=10_000)

    p_fuzz = sub.add_parser("fuzz", help="random-instance theorem fuzzing")
    p_fuzz.add_argument("--seed", type=int, default=0)
    p_fuzz.add_argument("--trials", type=int, default=100)
    p_fuzz.add_argument("--break", dest="break_mode", default="none",
                        choices=["none", "drop-contraction", "drop-phi"])
    p_fuzz.add_argument("--max-points", type=int, default=8)
    p_fuzz.add_argument("--scale", type=float, default=1.0)

    p_report = sub.add_parser("report", help="summarize a solve/trace JSON file")
    p_report.add_argument("trace")

    return parser


def _load_instance(path: str):
    with open(path) as fh:
        obj = json.load(fh)
    space = space_from_json(obj["space"])
    T = operator_from_json(obj["operator"])
    validate_operator(space, T)
    G = gauge_from_json(obj["G"])
    phi = phi_from_json(obj["phi"])
    return space, T, G, phi


def _cmd_certify(args) -> int:
    space, T, G, phi = _load_instance(args.instance)
    cert = certify_condition_G(space, T, G, phi, mode=args.mode,
                               seed=args.seed, samples=args.samples)
    print(json.dumps(cert.to_json(), indent=2, sort_keys=True))
    return {"certified": EXIT_OK, "violated": EXIT_VIOLATED,
            "inconclusive": EXIT_INCONCLUSIVE}[cert.verdict]


def _parse_point(space, text: str):
    if isinstance(space, FiniteSpace):
        return int(text)
    return float(text)


def _cmd_solve(args, tol: float, budget: int, per_decade: int) -> int:
    space, T, G, phi = _load_instance(args.instance)
    x0 = _parse_point(space, args.x0)
    trace = picard_iterate(space, T, x0, max_iter=args.max_iter, tol=tol)
    out = {"trace": trace.to_json()}

    grid = log_grid(per_decade=per_decade)
    cls = certify_gauge_class(G, grid)
    out["gauge_class"] = cls.to_json()
    out["phi_certificate"] = certify_phi(
        phi, grid=[0.01, 0.1, 1.0, 10.0, 100.0], budget=budget).to_json()
    if cls.in_g2 == "yes":
        eps = args.eps if args.eps is not None else epsilon0(G, grid) / 2.0
        out["eps"] = eps
        try:
            diag = verify_cauchy_bound(space, trace, G, phi, eps,
                                       n_budget=budget, m_budget=budget)
            out["diagnostics"] = diag.to_json()
        except GphiError as exc:
            out["diagnostics_error"] = f"{type(exc).__name__}: {exc}"
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    config = FuzzConfig(seed=args.seed, trials=args.trials,
                        break_mode=args.break_mode,
                        max_points=args.max_points, scale=args.scale)
    report = fuzz(config)
    print(report.to_json_str())
    return EXIT_OK if not report.violations else EXIT_VIOLATED


def _cmd_report(args) -> int:
    with open(args.trace) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("trace document must be a JSON object")
    trace = obj.get("trace", obj)
    if not isinstance(trace, dict) or "orbit" not in trace:
        raise ValueError("document carries no trace")
    lines = []
    space = trace.get("space", {})
    kind = "finite" if "dist" in space else "interval"
    lines.append(f"space: {kind}, constant s = {space.get('s', 2.0 ** (space.get('p', 1.0) - 1.0))}")
    lines.append(f"start point: {trace['x0']}")
    lines.append(f"iterations recorded: {len(trace['orbit'])} "
                 f"(stop at k = {trace['k_stop']}, reason: {trace['stop_reason']})")
    lines.append(f"fixed point: {trace['fixed_point']}")
    if trace.get("cycle"):
        lines.append(f"cycle detected: {trace['cycle']}")
    if trace["step_dists"]:
        lines.append(f"last step distance: {trace['step_dists'][-1]}")
    diag = obj.get("diagnostics")
    if diag:
        lines.append("cauchy diagnostics: "
                     f"eps = {diag['eps']}, n = {diag['n']}, m = {diag['m']}, "
                     f"m0 = {diag['m0']}, bound = {diag['bound']}, "
                     f"max observed = {diag['max_observed']}, holds = {diag['holds']}")
    if obj.get("diagnostics_error"):
        lines.append(f"diagnostics unavailable: {obj['diagnostics_error']}")
    print("\n".join(lines))
    return EXIT_OK


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if args.command == "certify":
            return _cmd_certify(args)
        if args.command == "solve":
            return _cmd_solve(args, args.tol, args.budget, args.grid_density)
        if args.command == "fuzz":
            return _cmd_fuzz(args)
        if args.command == "report":
            return _cmd_report(args)
        parser.error(f"unknown command {args.command!r}")
    except (GphiError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
