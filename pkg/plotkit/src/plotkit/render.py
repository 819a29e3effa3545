"""SVG rendering of simulator sweep artifacts.

One image per figure id, axes labeled in the sweep's units.  Rendering
is read-only with respect to its inputs and byte-deterministic: text is
embedded as SVG text, element ids are salted with the figure id, and no
timestamp metadata is written, so a rerun reproduces the file exactly.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

from matplotlib import pyplot as plt

from .figures import FIGURES, DataError, FigureSpec, Series, discover_series, has_data

__all__ = ["available_figures", "render_figure", "render_many"]

_RC = {
    "axes.linewidth": 0.8,
    "figure.figsize": (4.4, 3.3),
    "font.size": 10.0,
    "legend.frameon": False,
    "lines.linewidth": 1.4,
    "svg.fonttype": "none",
}

# line style cycle mirroring the usual solid/dashed/dash-dot/dotted sets
_DASHES = ("-", "--", "-.", ":")

_AXES = {
    "spectrum": ("Δ₂/γ", "T₂"),
    "switch": ("|G|²/γ²", "T₂"),
    "cavity": ("input intensity (γ²)", "output intensity (γ²)"),
    "pulse": ("τ (μs)", "normalized intensity"),
    "sa-rsa": ("|g(0)|²/γ²", "T"),
}


def _single(spec: FigureSpec, series: Sequence[Series]) -> Series:
    if len(series) != 1:
        raise DataError(
            f"{spec.figure_id} renders a single run; found {len(series)} series"
        )
    return series[0]


def _draw(ax, spec: FigureSpec, series: Sequence[Series]) -> None:
    if spec.kind in ("spectrum", "switch"):
        x_name, y_name = spec.columns
        for k, item in enumerate(series):
            ax.plot(
                item.table[x_name],
                item.table[y_name],
                _DASHES[k % len(_DASHES)],
                label=item.label,
            )
        if len(series) > 1:
            ax.legend()
    elif spec.kind == "cavity":
        for k, item in enumerate(series):
            ax.plot(
                item.table["input_intensity"],
                item.table["output_intensity"],
                _DASHES[k % len(_DASHES)],
                linewidth=0.9,
                marker=".",
                markersize=2.5,
                label=item.label,
            )
        if len(series) > 1:
            ax.legend()
    elif spec.kind == "pulse":
        table = _single(spec, series).table
        ax.plot(table["tau_us"], table["input_norm"], "-", label="vacuum")
        ax.plot(table["tau_us"], table["output_norm"], ":", label="medium")
        ax.legend()
    else:  # sa-rsa
        table = _single(spec, series).table
        axis = table["probe_intensity_over_gamma2"]
        ax.plot(axis, table["T_off"], "-", label="control off")
        ax.plot(axis, table["T_on"], "--", label="control on")
        ax.set_xscale("log")
        ax.legend()


def render_figure(figure_id: str, data_dir, out_dir) -> Path:
    """Render one figure id from the data tree; returns the SVG path."""
    try:
        spec = FIGURES[figure_id]
    except KeyError:
        known = ", ".join(FIGURES)
        raise ValueError(f"unknown figure id {figure_id!r}; expected one of {known}") from None
    series = discover_series(data_dir, spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / f"{figure_id}.svg"
    with plt.rc_context({**_RC, "svg.hashsalt": figure_id}):
        fig, ax = plt.subplots()
        try:
            _draw(ax, spec, series)
            xlabel, ylabel = _AXES[spec.kind]
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.set_title(figure_id)
            fig.tight_layout()
            fig.savefig(target, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return target


def render_many(figure_ids: Sequence[str], data_dir, out_dir) -> List[Path]:
    return [render_figure(figure_id, data_dir, out_dir) for figure_id in figure_ids]


def available_figures(data_dir) -> List[str]:
    """Figure ids with at least one artifact under the data directory."""
    return [figure_id for figure_id in FIGURES if has_data(data_dir, figure_id)]
