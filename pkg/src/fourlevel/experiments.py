"""Parameter sweeps built on steady-state propagation.

Three sweep families: probe transmission versus probe detuning, versus
control intensity (absorptive switching), and versus probe intensity on
the Y scheme (saturable / reverse-saturable absorption).  Every sweep
point is an independent propagation at fixed entry amplitudes, so
results never depend on chunking or thread count.

The detuning and switching sweeps measure a weak probe against strong
coupling and control beams, and treat those strong beams as undepleted:
only the probe amplitude changes across the cell.  Letting the strong
beams attenuate drags the dressed-state features off their matched
positions (the switching minimum lands below the coupling intensity and
the spectral doublet pulls inward), so the sweeps zero every source
term except the probe's.  The saturable-absorption sweep keeps all
source terms: there the probe is the strong beam and its depletion is
the effect under study.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .atoms import AtomicSystem, DriveSet, Scheme
from .errors import ParameterError, ResolutionError, UndefinedTransmissionError
from .propagation import FIELD_NAMES, MediumSpec, propagate_sweep

#: Observables a sweep can report alongside its axis.  Transmission is
#: always that of the probed beam; the rho-derived columns are evaluated
#: at the exit fields.
OBSERVABLES = ("T2", "T", "abs_rho32", "pop1", "pop2", "pop3", "pop4")

_RHO32 = 4 * 2 + 1


@dataclass(frozen=True)
class SweepResult:
    """One sweep axis plus equally long named output columns."""

    axis_name: str
    axis: np.ndarray
    columns: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        axis = np.asarray(self.axis, dtype=float)
        if axis.ndim != 1 or axis.size == 0:
            raise ParameterError("sweep axis must be a nonempty 1-d array")
        if not np.isfinite(axis).all():
            raise ParameterError("sweep axis contains non-finite values")
        if axis.size > 1 and np.any(np.diff(axis) <= 0.0):
            raise ParameterError("sweep axis must increase strictly")
        columns = {}
        for name, values in self.columns.items():
            values = np.asarray(values)
            if values.shape != axis.shape:
                raise ParameterError(
                    f"column {name!r} has shape {values.shape}, axis {axis.shape}"
                )
            columns[name] = values
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "columns", columns)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise ParameterError(
                f"no column {name!r}; available: {sorted(self.columns)}"
            ) from None


def _undepleted_medium(system: AtomicSystem, medium: MediumSpec) -> MediumSpec:
    # probe beam sources: (2,3) on the ladder, (1,2)+(2,3) shared on Y
    keep = {(2, 3)} if system.scheme is Scheme.LADDER4 else {(1, 2), (2, 3)}
    eta = {ch: (val if ch in keep else 0.0) for ch, val in medium.eta.items()}
    return replace(medium, eta=eta)


def _observable_columns(
    names: Sequence[str],
    trans_name: str,
    trans: np.ndarray,
    states: np.ndarray,
) -> Dict[str, np.ndarray]:
    columns = {}
    for name in names:
        if name == trans_name:
            columns[name] = trans
        elif name == "abs_rho32":
            columns[name] = np.abs(states[:, _RHO32])
        elif name in ("pop1", "pop2", "pop3", "pop4"):
            level = int(name[3]) - 1
            columns[name] = states[:, 4 * level + level].real
        else:
            raise ParameterError(
                f"unknown observable {name!r}; allowed: {OBSERVABLES}"
            )
    return columns


def _run_sweep(
    system: AtomicSystem,
    deltas: np.ndarray,
    entry: np.ndarray,
    medium: MediumSpec,
    control_source: str,
    threads: int,
    probe_index: int,
    observables: Sequence[str],
    trans_name: str,
    axis_name: str,
    axis: np.ndarray,
) -> SweepResult:
    for name in observables:
        if name not in OBSERVABLES or (name in ("T2", "T") and name != trans_name):
            raise ParameterError(f"unknown observable {name!r}; allowed: {OBSERVABLES}")
    entry_probe = np.abs(entry[:, probe_index])
    if np.any(entry_probe == 0.0):
        raise UndefinedTransmissionError(
            "transmission undefined: a sweep point has zero probe entry amplitude"
        )
    want_state = any(name != trans_name for name in observables)
    result = propagate_sweep(
        system, deltas, entry, medium, control_source, threads, want_state
    )
    exits, states = result if want_state else (result, None)
    trans = np.abs(exits[:, probe_index]) ** 2 / entry_probe**2
    columns = _observable_columns(observables, trans_name, trans, states)
    return SweepResult(axis_name, axis, columns)


def probe_spectrum(
    system: AtomicSystem,
    drives: DriveSet,
    medium: MediumSpec,
    delta2_grid: np.ndarray,
    control_source: str = "rho43",
    threads: int = 1,
    observables: Sequence[str] = ("T2",),
) -> SweepResult:
    """Probe transmission versus probe detuning at fixed entry fields.

    The amplitudes and the other two detunings are taken from
    ``drives``; ``drives.delta2`` is ignored in favor of the grid.
    Coupling and control are undepleted: only the probe propagates.
    """
    grid = np.asarray(delta2_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("delta2 grid must be nonempty")
    medium = _undepleted_medium(system, medium)
    names = FIELD_NAMES[system.scheme]
    probe_index = names.index("probe")
    if system.scheme is Scheme.LADDER4:
        entry_row = [drives.coupling, drives.probe, drives.control]
    else:
        entry_row = [drives.probe, drives.control]
    deltas = np.column_stack(
        [np.full(grid.size, drives.delta1), grid, np.full(grid.size, drives.delta)]
    )
    entry = np.tile(np.array(entry_row, dtype=complex), (grid.size, 1))
    return _run_sweep(
        system, deltas, entry, medium, control_source, threads,
        probe_index, observables, "T2", "delta2_over_gamma", grid,
    )


def switching_curve(
    system: AtomicSystem,
    drives: DriveSet,
    medium: MediumSpec,
    control_intensity_grid: np.ndarray,
    control_source: str = "rho43",
    threads: int = 1,
    observables: Sequence[str] = ("T2",),
) -> SweepResult:
    """Probe transmission versus control intensity ``|G|^2``.

    Meant for a weak resonant probe; the control entry amplitude is the
    positive square root of each grid value and ``drives.control`` is
    ignored.  Coupling and control are undepleted: only the probe
    propagates, so the transmission minimum sits where the control
    intensity matches the coupling intensity.
    """
    grid = np.asarray(control_intensity_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("control intensity grid must be nonempty")
    if np.any(grid < 0.0):
        raise ParameterError("control intensities must be >= 0")
    medium = _undepleted_medium(system, medium)
    names = FIELD_NAMES[system.scheme]
    probe_index = names.index("probe")
    amps = np.sqrt(grid).astype(complex)
    probe_col = np.full(grid.size, drives.probe, dtype=complex)
    if system.scheme is Scheme.LADDER4:
        coupling_col = np.full(grid.size, drives.coupling, dtype=complex)
        entry = np.column_stack([coupling_col, probe_col, amps])
    else:
        entry = np.column_stack([probe_col, amps])
    deltas = np.tile([drives.delta1, drives.delta2, drives.delta], (grid.size, 1))
    return _run_sweep(
        system, deltas, entry, medium, control_source, threads,
        probe_index, observables, "T2", "control_intensity_over_gamma2", grid,
    )


def sa_rsa_curve(
    system: AtomicSystem,
    drives: DriveSet,
    medium: MediumSpec,
    intensity_grid: np.ndarray,
    control_on: bool,
    control_source: str = "rho43",
    threads: int = 1,
    observables: Sequence[str] = ("T",),
) -> SweepResult:
    """Net probe transmission versus entry probe intensity (Y scheme).

    ``drives.control`` sets the control amplitude when ``control_on``;
    the shared-beam amplitude is the square root of each grid value.
    """
    if system.scheme is not Scheme.YPSILON4:
        raise ParameterError("SA/RSA sweeps are defined on the Y scheme only")
    grid = np.asarray(intensity_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("probe intensity grid must be nonempty")
    if np.any(grid <= 0.0):
        raise ParameterError("probe intensities must be > 0")
    control = complex(drives.control) if control_on else 0.0
    entry = np.column_stack(
        [np.sqrt(grid).astype(complex), np.full(grid.size, control, dtype=complex)]
    )
    deltas = np.tile([drives.delta1, drives.delta2, drives.delta], (grid.size, 1))
    return _run_sweep(
        system, deltas, entry, medium, control_source, threads,
        0, observables, "T", "probe_intensity_over_gamma2", grid,
    )


def spectrum_extrema(
    result: SweepResult, column: str
) -> List[Tuple[float, float, str]]:
    """Interior local extrema of a sweep column.

    Each extremum is located by strict three-point comparison and then
    refined by the vertex of the parabola through the triple (exact for
    quadratic data, robust on nonuniform axes).  Returns
    ``(axis_location, column_value, kind)`` tuples with kind ``"min"``
    or ``"max"``.
    """
    y = np.asarray(result.column(column), dtype=float)
    x = result.axis
    if x.size < 3:
        raise ResolutionError("extremum search needs at least 3 grid points")
    return parabolic_extrema(x, y)


def parabolic_extrema(
    x: np.ndarray, y: np.ndarray
) -> List[Tuple[float, float, str]]:
    """Three-point extrema of ``y(x)`` with parabolic refinement."""
    found = []
    for i in range(1, x.size - 1):
        if y[i] < y[i - 1] and y[i] < y[i + 1]:
            kind = "min"
        elif y[i] > y[i - 1] and y[i] > y[i + 1]:
            kind = "max"
        else:
            continue
        x0, x1, x2 = x[i - 1], x[i], x[i + 1]
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        slope01 = (y1 - y0) / (x1 - x0)
        slope12 = (y2 - y1) / (x2 - x1)
        curvature = (slope12 - slope01) / (x2 - x0)
        if curvature == 0.0:
            vertex, value = x1, y1
        else:
            vertex = 0.5 * (x0 + x1) - slope01 / (2.0 * curvature)
            vertex = min(max(vertex, x0), x2)
            value = y0 + slope01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1)
        found.append((float(vertex), float(value), kind))
    return found
