"""Command line: ``figures <kind> --in <csv> [--in <csv> ...] --out <png|svg>``."""

from __future__ import annotations

import argparse
import sys

from .plotting import FIGURE_KINDS, FigureSpec, SchemaError, plot


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from neelwall result CSVs",
    )
    parser.add_argument("kind", help=f"one of: {', '.join(FIGURE_KINDS)}")
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True,
        metavar="CSV", help="input CSV (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.inputs),
        output=args.out,
        title=args.title,
    )
    try:
        path = plot(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
