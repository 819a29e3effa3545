"""Artifact contracts and table loading for the figure renderer.

Every figure id maps to one CSV artifact family written by the
``simulate`` command line tool.  Loading is strict: the header row must
match the contracted columns exactly, and files without data rows are
rejected.  Nothing in this module interprets the numbers.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

__all__ = [
    "FIGURES",
    "DataError",
    "FigureSpec",
    "SchemaError",
    "Series",
    "discover_series",
    "has_data",
    "load_table",
]


class SchemaError(Exception):
    """A CSV header does not match the contracted columns."""


class DataError(Exception):
    """An artifact is missing, empty, or numerically malformed."""


@dataclass(frozen=True)
class FigureSpec:
    """Rendering contract for one figure id.

    ``series_key`` names the drives entry (read from the CSV's JSON
    sidecar) whose value labels a curve when several runs of the same
    figure are overlaid; ``series_symbol`` is the legend symbol for it.
    """

    figure_id: str
    artifact: str
    columns: Tuple[str, ...]
    kind: str
    series_key: Optional[str] = None
    series_symbol: Optional[str] = None


_SPECTRUM = ("delta2_over_gamma", "T2")
_SWITCH = ("control_intensity_over_gamma2", "T2")
_CAVITY = ("x_over_gamma", "input_intensity", "output_intensity")
_PULSE = ("tau_us", "input_norm", "output_norm")
_SA_RSA = ("probe_intensity_over_gamma2", "T_off", "T_on")

FIGURES: Dict[str, FigureSpec] = {
    "fig2a": FigureSpec("fig2a", "spectrum.csv", _SPECTRUM, "spectrum", "probe", "G2"),
    "fig2b": FigureSpec("fig2b", "spectrum.csv", _SPECTRUM, "spectrum", "probe", "G2"),
    "fig3": FigureSpec("fig3", "switch.csv", _SWITCH, "switch", "coupling", "G1"),
    "fig4a": FigureSpec("fig4a", "pulse.csv", _PULSE, "pulse"),
    "fig4b": FigureSpec("fig4b", "pulse.csv", _PULSE, "pulse"),
    "fig6a": FigureSpec("fig6a", "cavity.csv", _CAVITY, "cavity", "coupling", "G1"),
    "fig6b": FigureSpec("fig6b", "cavity.csv", _CAVITY, "cavity", "coupling", "G1"),
    "fig8a": FigureSpec("fig8a", "sa_rsa.csv", _SA_RSA, "sa-rsa"),
    "fig8b": FigureSpec("fig8b", "sa_rsa.csv", _SA_RSA, "sa-rsa"),
}


@dataclass(frozen=True)
class Series:
    """One loaded artifact: a legend label and its column arrays."""

    label: str
    table: Dict[str, np.ndarray]


def load_table(path, columns) -> Dict[str, np.ndarray]:
    """Read a contracted CSV into per-column float arrays."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"{path}: missing artifact") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataError(f"{path}: empty file")
    header = tuple(lines[0].split(","))
    if header != tuple(columns):
        missing = [name for name in columns if name not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {', '.join(missing)}; "
                f"header is {lines[0]!r}"
            )
        raise SchemaError(
            f"{path}: header {lines[0]!r} does not match contract "
            f"{','.join(columns)!r}"
        )
    body = [line for line in lines[1:] if line.strip()]
    if not body:
        raise DataError(f"{path}: no data rows")
    try:
        data = np.loadtxt(io.StringIO("\n".join(body)), delimiter=",", ndmin=2)
    except ValueError as error:
        raise DataError(f"{path}: malformed numeric row ({error})") from None
    if data.shape[1] != len(columns):
        raise DataError(
            f"{path}: rows carry {data.shape[1]} fields, header has {len(columns)}"
        )
    return {name: data[:, k] for k, name in enumerate(columns)}


def _series_label(csv_path: Path, spec: FigureSpec, fallback: str) -> str:
    """Label a curve from the sidecar's echoed drives, if readable."""
    if spec.series_key is None:
        return fallback
    sidecar = csv_path.with_suffix(".json")
    try:
        doc = json.loads(sidecar.read_text(encoding="utf-8"))
        value = float(doc["config"]["drives"][spec.series_key])
    except (OSError, ValueError, KeyError, TypeError):
        return fallback
    return f"{spec.series_symbol} = {value:g}"


def discover_series(data_dir, spec: FigureSpec) -> List[Series]:
    """Locate and load every run of a figure under the data directory.

    Layout: either ``<data>/<figure-id>/<artifact>`` for a single run or
    ``<data>/<figure-id>/<series>/<artifact>`` with one subdirectory per
    overlaid run; series are ordered by subdirectory name.
    """
    base = Path(data_dir) / spec.figure_id
    flat = base / spec.artifact
    if flat.is_file():
        return [Series(_series_label(flat, spec, base.name), load_table(flat, spec.columns))]
    found: List[Series] = []
    if base.is_dir():
        for child in sorted(entry for entry in base.iterdir() if entry.is_dir()):
            candidate = child / spec.artifact
            if candidate.is_file():
                found.append(
                    Series(
                        _series_label(candidate, spec, child.name),
                        load_table(candidate, spec.columns),
                    )
                )
    if not found:
        raise DataError(
            f"no data for {spec.figure_id}: expected {flat} or "
            f"{base}/<series>/{spec.artifact}"
        )
    return found


def has_data(data_dir, figure_id: str) -> bool:
    """True when at least one artifact for the figure id is present."""
    spec = FIGURES[figure_id]
    base = Path(data_dir) / figure_id
    if (base / spec.artifact).is_file():
        return True
    if not base.is_dir():
        return False
    return any(
        (entry / spec.artifact).is_file() for entry in base.iterdir() if entry.is_dir()
    )
