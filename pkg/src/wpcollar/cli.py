"""Command-line front end: sweep, solve-map, operator-check, report.

Exit codes: 0 success, 1 config error (including argument parsing),
2 solver failure (and any failed operator check), 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .bvp import operator_checks
from .errors import ConfigError, ReportParseError, SolverError
from .harmonic import first_integral_residual, hopf_differential, solve_cylinder_map
from .sweep import (
    SweepConfig,
    exponent_verdicts,
    load_config_file,
    parse_report,
    run_sweep,
    write_csv,
    write_json,
)

__all__ = ["main"]

DEFAULT_LENGTHS = "0.3,0.2,0.1,0.05,0.025"
DEFAULT_GRID = 4096


class _Parser(argparse.ArgumentParser):
    # argparse wants to exit(2) on usage errors; route them to the
    # config-error path instead so the exit-code contract holds
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="wpcollar",
        description="Curvature of the pinching plane over a two-cylinder collar model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run an l-sweep and emit csv/json")
    sw.add_argument("--lengths", help=f"comma-separated descending lengths (default {DEFAULT_LENGTHS})")
    sw.add_argument("--grid", help=f"nodes per cylinder (default {DEFAULT_GRID})")
    sw.add_argument("--c1", help="coupling amplitude (default 1)")
    sw.add_argument("--a1", help="own-square boundary value (default 1)")
    sw.add_argument("--b1", help="coupled-square boundary value at a (default 1)")
    sw.add_argument("--b2", help="coupled-square boundary value at b (default 1)")
    sw.add_argument("--bc-mode", help="mixed | dirichlet (default mixed)")
    sw.add_argument("--offset", help="compact-part inner-product offset (default 0)")
    sw.add_argument("--out", help="output path (default: print to stdout)")
    sw.add_argument("--format", help="csv | json (default csv)")
    sw.add_argument("--workers", help="concurrent reports (default 1)")
    sw.add_argument("--config", help="flat key=value file; flags override it")
    sw.set_defaults(func=_cmd_sweep)

    sm = sub.add_parser("solve-map", help="solve one cylinder harmonic map")
    sm.add_argument("l", type=float, help="source core length in (0,1)")
    sm.add_argument("L", type=float, help="target core length in (0,1)")
    sm.set_defaults(func=_cmd_solve_map)

    oc = sub.add_parser("operator-check", help="run the operator oracle battery")
    oc.add_argument("l", type=float, help="core length in (0,1)")
    oc.add_argument("--grid", type=int, default=DEFAULT_GRID, help="node count for the battery")
    oc.set_defaults(func=_cmd_operator_check)

    rp = sub.add_parser("report", help="summarize a sweep file with exponent verdicts")
    rp.add_argument("path", help="csv or json file produced by sweep")
    rp.set_defaults(func=_cmd_report)
    return parser


def _sweep_settings(args) -> tuple[SweepConfig, int]:
    file_map = load_config_file(args.config) if args.config else {}

    def pick(key: str, flag_value, default):
        if flag_value is not None:
            return flag_value
        return file_map.get(key, default)

    lengths_text = str(pick("lengths", args.lengths, DEFAULT_LENGTHS))
    lengths = [p for p in re.split(r"[,\s]+", lengths_text.strip()) if p]
    config = SweepConfig(
        lengths=lengths,
        grid_size=pick("grid", args.grid, DEFAULT_GRID),
        profile_c1=pick("c1", args.c1, 1.0),
        a1=pick("a1", args.a1, 1.0),
        b1=pick("b1", args.b1, 1.0),
        b2=pick("b2", args.b2, 1.0),
        bc_mode=pick("bc-mode", args.bc_mode, "mixed"),
        compact_offset=pick("offset", args.offset, 0.0),
        output_path=pick("out", args.out, None),
        format=pick("format", args.format, "csv"),
    )
    raw = pick("workers", args.workers, 1)
    try:
        workers = int(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"workers must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return config, workers


def _cmd_sweep(args) -> int:
    config, workers = _sweep_settings(args)
    result = run_sweep(config, workers=workers)
    text = write_csv(result) if config.format == "csv" else write_json(result)
    if config.output_path:
        Path(config.output_path).write_text(text, encoding="utf-8")
        print(f"wrote {len(result.reports)} rows to {config.output_path}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve_map(args) -> int:
    m = solve_cylinder_map(args.l, args.L)
    residual = first_integral_residual(m)
    hopf = hopf_differential(m)
    print(f"c0({args.l}, {args.L}) = {m.c0!r}")
    print(f"boundary-condition residual = {m.bc_residual:.6e}")
    print(f"first-integral residual = {residual:.6e}")
    print(f"hopf constant c0/4 = {hopf!r}")
    print(
        json.dumps(
            {
                "l": args.l,
                "L": args.L,
                "c0": m.c0,
                "bcResidual": m.bc_residual,
                "firstIntegralResidual": residual,
                "hopf": hopf,
                "gridSize": m.grid.n,
            }
        )
    )
    return 0


def _cmd_operator_check(args) -> int:
    checks = operator_checks(args.l, n=args.grid)
    failed = sum(not c.passed for c in checks)
    for c in checks:
        status = "pass" if c.passed else "FAIL"
        print(f"{status}  {c.name:<38} error={c.error:.3e}  tol={c.tol:g}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed at l = {args.l}, n = {args.grid}")
    return 2 if failed else 0


def _cmd_report(args) -> int:
    parsed = parse_report(args.path)
    header = f"{'l':>10}  {'K':>14}  {'R':>14}  {'Pi':>14}  {'lemma7Bound':>14}"
    print(header)
    for row in parsed.rows:
        print(
            f"{float(row['l']):>10.6g}  {float(row['K']):>14.6e}  {float(row['R']):>14.6e}  "
            f"{float(row['Pi']):>14.6e}  {float(row['lemma7Bound']):>14.6e}"
        )
    verdicts = exponent_verdicts(parsed.fits)
    for name in ("K", "lemma7Bound", "Pi"):
        fit = parsed.fits.get(name)
        if fit is None:
            print(f"{name}: no fit -> {verdicts[name]}")
        else:
            print(f"{name}: slope={fit.slope:+.4f} residual={fit.residual:.2e} -> {verdicts[name]}")
    for w in parsed.warnings:
        print(f"warning: {w}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ReportParseError as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
