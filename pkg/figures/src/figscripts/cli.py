"""Command line for figure rendering.

Two subcommands mirror the two figure styles: ``convergence`` and
``pointwise``.  Styling overrides arrive as a JSON object mapping method
names to matplotlib line keyword arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .plots import FigureSpec, SchemaError, plot_convergence, plot_pointwise


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="scatquad-figures")
    sub = parser.add_subparsers(dest="command", required=True)

    p_conv = sub.add_parser("convergence", help="error-vs-degree panel")
    p_conv.add_argument("--csv", action="append", required=True,
                        help="harness CSV (repeatable)")
    p_conv.add_argument("--out", required=True, help="output image path")
    p_conv.add_argument("--style", default="{}",
                        help='JSON: {"method": {"color": ..., "marker": ...}}')
    p_conv.add_argument("--linear-y", action="store_true")

    p_pw = sub.add_parser("pointwise", help="pointwise error/estimate panel")
    p_pw.add_argument("--csv", required=True)
    p_pw.add_argument("--out", required=True)
    p_pw.add_argument("--linear-y", action="store_true")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "convergence":
            spec = FigureSpec(csv_paths=args.csv, out_path=args.out,
                              log_y=not args.linear_y,
                              styles=json.loads(args.style))
            plot_convergence(spec)
        else:
            plot_pointwise(args.csv, args.out, log_y=not args.linear_y)
    except (SchemaError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
