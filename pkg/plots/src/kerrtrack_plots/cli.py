"""Command line for rendering kerrtrack run directories.

    plots render --run <dir> [--panel tracking|portrait|detuning|sweep-heatmap]
                 [--time S ...] [--format png|svg] [--out <dir>]

Without an explicit panel list, every panel supported by the files present
in the run directory is rendered.  Exit codes: 0 success, 2 bad arguments
or unreadable run data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import RunDataError
from .panels import FigureSpec, render

PANELS = ("tracking", "portrait", "detuning", "sweep-heatmap")

_PANEL_FILES = {"tracking": "trajectory.csv",
                "portrait": "portrait_fixed_points.csv",
                "detuning": "detuning.csv",
                "sweep-heatmap": "sweep.csv"}


def detect_panels(run_dir: Path) -> list[str]:
    found = [p for p, f in _PANEL_FILES.items() if (run_dir / f).exists()]
    if not found:
        raise RunDataError(f"no renderable files found in {run_dir}")
    return found


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="render figures from kerrtrack run files")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--run", type=Path, required=True,
                   help="run directory written by the kerrtrack CLI")
    p.add_argument("--panel", action="append", choices=PANELS,
                   help="panel to render (repeatable; default: all available)")
    p.add_argument("--time", action="append", type=float,
                   help="portrait snapshot time in s (repeatable)")
    p.add_argument("--format", choices=("png", "svg"), default="png")
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (default: <run>/plots)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        panels = args.panel or detect_panels(args.run)
        spec = FigureSpec(run_dir=args.run, panels=panels, fmt=args.format,
                          times=args.time, out_dir=args.out)
        for path in render(spec):
            print(path)
        return 0
    except (RunDataError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():  # console script
    sys.exit(main())
