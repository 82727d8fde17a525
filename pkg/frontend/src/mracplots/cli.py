"""plots: render figures from trace CSVs.

overlay  one axes comparing alpha across several traces
panels   four-panel diagnostic view of a single run
"""

import argparse
import sys

from .figures import plot_four_panel, plot_overlay
from .traceframe import TraceError, load_trace


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plots", description="Figure rendering for simulation trace CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_over = sub.add_parser("overlay", help="step-response comparison overlay")
    p_over.add_argument("csv", nargs="+", help="trace CSV files")
    p_over.add_argument("--out", default="overlay.png", help="output image path")
    p_pan = sub.add_parser("panels", help="four-panel adaptive-run view")
    p_pan.add_argument("csv", help="trace CSV file")
    p_pan.add_argument("--out", default="panels.png", help="output image path")
    args = parser.parse_args(argv)
    try:
        if args.command == "overlay":
            plot_overlay([load_trace(p) for p in args.csv], args.out)
        else:
            plot_four_panel(load_trace(args.csv), args.out)
    except (TraceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} and {args.out}.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
