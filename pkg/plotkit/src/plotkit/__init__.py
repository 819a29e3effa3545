"""Offline figure rendering for simulator sweep artifacts.

Reads the CSV files and JSON sidecars written by the ``simulate``
command line tool and renders publication-style SVG analogues, one per
figure id (fig2a .. fig8b).  The package embeds no physics: figures are
regenerated from the artifact contents alone, inputs are never written.
"""

from .figures import (
    FIGURES,
    DataError,
    FigureSpec,
    SchemaError,
    Series,
    discover_series,
    has_data,
    load_table,
)
from .render import available_figures, render_figure, render_many

__version__ = "0.1.0"

__all__ = [
    "FIGURES",
    "DataError",
    "FigureSpec",
    "SchemaError",
    "Series",
    "available_figures",
    "discover_series",
    "has_data",
    "load_table",
    "render_figure",
    "render_many",
    "__version__",
]
