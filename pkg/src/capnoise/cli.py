"""Command-line interface.

    capnoise run <scenario-file> --out <dir> [--grid-ppd N]
    capnoise selftest
    capnoise aweight --freq <Hz>

Exit codes: 0 success, 1 selftest failure, 2 parse/validation error,
3 infeasible servo design, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ParseError
from .scenario import load_scenario
from .weighting import a_weight, a_weight_db

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_PARSE = 2
EXIT_DESIGN = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capnoise",
        description="Self-noise simulation and DC-servo design for capacitive sensor front ends",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a scenario file and write reports")
    run.add_argument("scenario", type=Path, help="scenario configuration file")
    run.add_argument("--out", type=Path, required=True, help="output directory")
    run.add_argument(
        "--grid-ppd", type=int, default=None, metavar="N",
        help="override the scenario's grid resolution (points per decade)",
    )

    sub.add_parser("selftest", help="run the embedded regression suite")

    aweight = sub.add_parser("aweight", help="print the A-weighting at one frequency")
    aweight.add_argument("--freq", type=float, required=True, help="frequency in Hz")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    from .report import run_scenario

    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if args.grid_ppd is not None:
        if args.grid_ppd < 1:
            print("error: --grid-ppd must be >= 1", file=sys.stderr)
            return EXIT_PARSE
        scenario = replace(scenario, points_per_decade=args.grid_ppd)

    try:
        bundle = run_scenario(scenario, args.out)
    except OSError as exc:
        print(f"error: writing reports failed: {exc}", file=sys.stderr)
        return EXIT_IO

    for label, path in bundle.nsd_paths.items():
        print(f"wrote {path}")
    for path in (bundle.servo_report_path, bundle.dba_table_path, bundle.summary_path):
        if path is not None:
            print(f"wrote {path}")
    for path in bundle.figure_paths:
        print(f"wrote {path}")
    if bundle.design_failed:
        print(f"error: servo design infeasible: {bundle.design_error}", file=sys.stderr)
        return EXIT_DESIGN
    return EXIT_OK


def _cmd_selftest() -> int:
    from .selftest import format_table, run_selftest, selftest_passed

    checks = run_selftest()
    print(format_table(checks))
    return EXIT_OK if selftest_passed(checks) else EXIT_SELFTEST


def _cmd_aweight(args: argparse.Namespace) -> int:
    if args.freq <= 0.0:
        print("error: --freq must be positive", file=sys.stderr)
        return EXIT_PARSE
    weight = float(a_weight(args.freq))
    print(f"{args.freq:g} Hz: weight {weight:.6f} ({float(a_weight_db(args.freq)):+.2f} dB)")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "selftest":
        return _cmd_selftest()
    return _cmd_aweight(args)


if __name__ == "__main__":
    raise SystemExit(main())
