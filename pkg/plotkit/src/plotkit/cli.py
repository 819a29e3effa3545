"""Command line front end for the figure renderer."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import __version__
from .figures import FIGURES, DataError, SchemaError
from .render import available_figures, render_figure


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render SVG figures from simulate CSV/JSON artifacts.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "figure",
        choices=(*FIGURES, "all"),
        metavar="figure-id",
        help=f"one of {', '.join(FIGURES)}, or 'all' for every id with data",
    )
    parser.add_argument(
        "--data",
        required=True,
        help="directory holding <figure-id>/ artifact trees",
    )
    parser.add_argument("--out", required=True, help="directory for rendered SVGs")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.figure == "all":
        targets = available_figures(args.data)
        if not targets:
            print(
                f"render_figures: error: no figure data under {args.data}",
                file=sys.stderr,
            )
            return 1
    else:
        targets = [args.figure]
    status = 0
    for figure_id in targets:
        try:
            path = render_figure(figure_id, args.data, args.out)
        except (DataError, SchemaError, OSError, ValueError) as error:
            print(f"render_figures: error: {figure_id}: {error}", file=sys.stderr)
            status = 1
        else:
            print(path)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
