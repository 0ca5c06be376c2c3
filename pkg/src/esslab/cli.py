"""Command-line entry point.

    esslab <experiment> [--n 4,16,256] [--grid lo:hi:step] [--replicates R]
           [--seed S] [--scenario 1|2|3] [--out path.csv] [--workers W]
    esslab diagnose --in samples.csv [--integrand identity|tail:A] [--out report.csv]
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .diagnostics import REPORT_CSV_HEADER


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}")
    return experiments.grid_values(lo, hi, step)


def _parse_n(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n must be comma-separated ints, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esslab",
        description="Importance-sampling ESS experiments and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in experiments.RUNNERS:
        p = sub.add_parser(name, help=f"regenerate the {name} experiment CSV")
        p.add_argument("--n", type=_parse_n, default=None,
                       help="comma-separated per-run sample counts")
        if name != "mis-scenario":
            p.add_argument("--grid", type=_parse_grid, default=None,
                           help="sweep grid as lo:hi:step")
        else:
            p.add_argument("--scenario", type=int, choices=(1, 2, 3), default=1)
        p.add_argument("--replicates", type=int, default=experiments.DEFAULT_REPLICATES)
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--out", default=None, help="output CSV path (default <experiment>.csv)")
        p.add_argument("--workers", type=int, default=1)

    d = sub.add_parser("diagnose", help="diagnostic report for an x,log_w CSV")
    d.add_argument("--in", dest="input", required=True, help="input CSV of x,log_w")
    d.add_argument("--integrand", default=None, help="'identity' or 'tail:<alpha>'")
    d.add_argument("--out", default=None, help="write the report row to this CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "diagnose":
        h = None if args.integrand is None else experiments.parse_integrand(args.integrand)
        report = experiments.diagnose(args.input, integrand=h, out=args.out)
        print(REPORT_CSV_HEADER)
        print(report.csv_row())
        return 0

    overrides = {
        "replicates": args.replicates,
        "master_seed": args.seed,
        "out": args.out if args.out is not None else f"{args.command}.csv",
        "workers": args.workers,
    }
    if args.n is not None:
        overrides["n_values"] = args.n
    if getattr(args, "grid", None) is not None:
        overrides["grid"] = args.grid
    if args.command == "mis-scenario":
        overrides["scenario"] = args.scenario

    cfg = experiments.default_config(args.command, **overrides)
    experiments.RUNNERS[args.command](cfg)
    print(f"wrote {cfg.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
