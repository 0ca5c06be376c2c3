"""CLI: figures --spec <1..6> --in <csv> --out <png> [--title T]."""

from __future__ import annotations

import argparse

from .render import FIGURE_IDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures", description="Render esslab experiment CSVs as PNG figures"
    )
    parser.add_argument("--spec", type=int, required=True, choices=FIGURE_IDS,
                        help="figure id (1-6)")
    parser.add_argument("--in", dest="input", required=True, help="input CSV")
    parser.add_argument("--out", dest="output", required=True, help="output PNG")
    parser.add_argument("--title", default=None, help="override the figure title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = render(FigureSpec(args.spec, args.input, args.output, title=args.title))
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
