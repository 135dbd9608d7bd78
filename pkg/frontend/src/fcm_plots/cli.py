"""Command line front end: fcm-plots --figure figN --csv <path> --out <path>."""

import argparse
import sys

from . import __version__
from .csvio import CsvFormatError
from .figures import FIGURE_EXPERIMENTS, FIGURES, FigureSpec, render

__all__ = ["main", "build_parser"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fcm-plots",
        description="Render figures from fcm-crlb CSV tables: "
                    + ", ".join("%s (%s)" % (f, FIGURE_EXPERIMENTS[f]) for f in FIGURES)
                    + ".",
    )
    parser.add_argument("--version", action="version", version="fcm-plots " + __version__)
    parser.add_argument("--figure", required=True, choices=FIGURES,
                        help="which figure to render")
    parser.add_argument("--csv", required=True, help="input CSV table")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--yscale", choices=("log", "linear"), default="",
                        help="override the figure's default y scale")
    parser.add_argument("--xscale", choices=("log", "linear"), default="",
                        help="override the figure's default x scale")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(figure=args.figure, csv_path=args.csv,
                          out_path=args.out, yscale=args.yscale,
                          xscale=args.xscale)
        render(spec)
    except (CsvFormatError, OSError, ValueError) as e:
        print("fcm-plots: error: %s" % e, file=sys.stderr)
        return 2
    print("%s: %s -> %s" % (args.figure, args.csv, args.out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
