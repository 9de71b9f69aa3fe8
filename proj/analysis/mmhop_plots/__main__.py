import argparse
import sys
from pathlib import Path

from .render import KINDS, PlotSpec, render
from .runs import PlotError


def main(argv=None):
    ap = argparse.ArgumentParser(prog="mmhop_plots")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("plot", help="render a chart and its data table")
    p.add_argument("--in", dest="in_dir", required=True, type=Path)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--policies", default="", help="comma-separated; default all")
    p.add_argument("--flow", type=int, default=0)
    args = ap.parse_args(argv)

    policies = [s for s in args.policies.split(",") if s]
    try:
        render(PlotSpec(args.in_dir, args.kind, args.out, policies, args.flow))
    except PlotError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
