"""qtm-fig: render qtm dataset CSVs into static figures.

Usage: ``qtm-fig <figure-kind> --data <csv> [--data <csv>]... --out <image>
[--summary <json>]``. Only CSVs with full provenance headers are accepted.

Exit codes: 0 success, 1 schema/validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, RenderReport, render
from .io import SchemaError


def _build_parser():
    parser = argparse.ArgumentParser(prog="qtm-fig", description=__doc__.split("\n")[0])
    parser.add_argument("kind", choices=sorted(FIGURE_KINDS), help="figure kind")
    parser.add_argument("--data", action="append", required=True,
                        help="dataset CSV (repeat for overlays)")
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument("--summary", default=None,
                        help="JSON summary for annotations (optional)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, data_paths=tuple(args.data),
                      out_path=args.out, summary_path=args.summary)
    try:
        report: RenderReport = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    for name, value in sorted(report.markers.items()):
        print(f"{name} = {value!r}")
    print(f"wrote {report.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
