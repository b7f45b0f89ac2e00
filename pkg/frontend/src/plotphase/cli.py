"""plot-phase: render a phase-diagram figure from sweep + threshold CSVs."""

from __future__ import annotations

import argparse
import sys

from .render import MissingColumnError, PlotSpec, render_phase


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-phase",
        description="Heatmap of sweep success rates with threshold overlays")
    parser.add_argument("--sweep", help="trial rows CSV (optional)")
    parser.add_argument("--thresholds", required=True, help="envelope CSV")
    parser.add_argument("--family", default="", help="figure label")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=130)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(sweep_csv=args.sweep, thresholds_csv=args.thresholds,
                    family=args.family, out=args.out, dpi=args.dpi)
    try:
        path = render_phase(spec)
    except MissingColumnError as exc:
        print(f"plot-phase: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"plot-phase: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
