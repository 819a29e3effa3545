"""Spatial propagation of the driving fields through the medium.

The envelopes obey first-order equations in z whose source terms are
atomic coherences: on the ladder each field is fed by the coherence of
its own transition (dG1/dz = i eta12 rho21, dG2/dz = i eta23 rho32,
dG/dz = i eta34 rho43), while on the Y scheme the shared beam collects
both lower transitions, dg/dz = i (eta12 rho21 + eta23 rho32), and the
control propagates as dG/dz = i eta24 rho43 by default (the quoted
source; ``control_source="rho42"`` switches to the 4-2 coherence that
the control transition itself carries).

The coherences are closed quasi-statically: at every integrator stage
the atoms sit in the steady state of the local field values, with the
detunings held fixed along z.  Integration is classical fixed-step
fourth-order Runge-Kutta; accuracy is checked by doubling the step
count, never by adaptive control, so grids are reproducible.

All amplitudes are in gamma units, z in cm, eta in gamma per cm.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Mapping, Tuple

import numpy as np

from .atoms import (
    AtomicSystem,
    DriveSet,
    Scheme,
    generator_tensor,
    transition_amplitudes,
)
from .errors import (
    AccuracyError,
    ConvergenceError,
    DegenerateSteadyStateError,
    ParameterError,
    PropagationError,
    UndefinedTransmissionError,
)
from .steady import _coeff_batch, solve_steady_batch

#: Field names carried through each medium, in state-vector order.
FIELD_NAMES: Dict[Scheme, Tuple[str, ...]] = {
    Scheme.LADDER4: ("coupling", "probe", "control"),
    Scheme.YPSILON4: ("probe", "control"),
}

#: Allowed source coherences for the Y-scheme control equation.
CONTROL_SOURCES = ("rho43", "rho42")

# vec(rho) indices of the coherences that source the fields
_RHO21 = 4 * 1 + 0
_RHO32 = 4 * 2 + 1
_RHO43 = 4 * 3 + 2
_RHO42 = 4 * 3 + 1

#: Sweep points per work unit; fixed so that thread count never alters
#: which elements are solved together (bit-stable parallel output).
CHUNK = 512


@dataclass(frozen=True)
class MediumSpec:
    """Homogeneous medium: length in cm, coupling constants, z steps.

    ``eta`` maps driven transitions ``(lower, upper)`` (1-based) to
    coupling constants in gamma per cm; the set of keys must match the
    decay channels of the scheme it is used with.
    """

    length: float
    eta: Mapping[Tuple[int, int], float]
    steps: int = 2000

    def __post_init__(self) -> None:
        length = float(self.length)
        if not math.isfinite(length) or length <= 0.0:
            raise ParameterError(f"medium length must be finite and > 0, got {self.length}")
        if int(self.steps) != self.steps or self.steps < 100:
            raise ParameterError(f"steps must be an integer >= 100, got {self.steps}")
        clean = {}
        for pair in sorted(self.eta):
            low, up = pair
            if not (1 <= low < up <= 4):
                raise ParameterError(f"eta channel {pair} is not a (lower, upper) level pair")
            value = float(self.eta[pair])
            if not math.isfinite(value) or value < 0.0:
                raise ParameterError(f"eta{low}{up} must be finite and >= 0, got {value}")
            clean[pair] = value
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "eta", clean)


@dataclass(frozen=True)
class FieldProfile:
    """Complex field envelopes sampled along the propagation axis."""

    z: np.ndarray
    amplitudes: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 1 or z.size < 2:
            raise ParameterError("z grid must be one-dimensional with >= 2 points")
        if z[0] != 0.0 or np.any(np.diff(z) <= 0.0):
            raise ParameterError("z grid must increase strictly from 0")
        amplitudes = {}
        for name, values in self.amplitudes.items():
            values = np.asarray(values, dtype=complex)
            if values.shape != z.shape:
                raise ParameterError(f"field {name!r} has {values.shape}, z grid {z.shape}")
            amplitudes[name] = values
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def length(self) -> float:
        return float(self.z[-1])

    def entry(self, field: str) -> complex:
        return complex(self._field(field)[0])

    def exit(self, field: str) -> complex:
        return complex(self._field(field)[-1])

    def _field(self, field: str) -> np.ndarray:
        try:
            return self.amplitudes[field]
        except KeyError:
            raise ParameterError(
                f"unknown field {field!r}; profile carries {sorted(self.amplitudes)}"
            ) from None


def _eta_vector(system: AtomicSystem, medium: MediumSpec) -> np.ndarray:
    """Coupling constants ordered like the driven transitions."""
    channels = sorted(system.decays)
    if set(medium.eta) != set(channels):
        raise ParameterError(
            f"medium eta channels {sorted(medium.eta)} do not match the "
            f"{system.scheme.value} transitions {channels}"
        )
    if system.scheme is Scheme.LADDER4:
        order = [(1, 2), (2, 3), (3, 4)]
    else:
        order = [(1, 2), (2, 3), (2, 4)]
    return np.array([medium.eta[pair] for pair in order], dtype=float)


def _entry_state(system: AtomicSystem, drives: DriveSet) -> np.ndarray:
    if system.scheme is Scheme.LADDER4:
        return np.array(
            [drives.coupling, drives.probe, drives.control], dtype=complex
        )
    return np.array([drives.probe, drives.control], dtype=complex)


def _check_control_source(control_source: str) -> None:
    if control_source not in CONTROL_SOURCES:
        raise ParameterError(
            f"control_source must be one of {CONTROL_SOURCES}, got {control_source!r}"
        )


def _local_states(
    system: AtomicSystem,
    tensor: np.ndarray,
    deltas: np.ndarray,
    fields: np.ndarray,
) -> np.ndarray:
    """Steady vec(rho) rows at the local field values, shape (B, 16)."""
    if system.scheme is Scheme.LADDER4:
        amps = fields
    else:
        amps = np.column_stack([fields[:, 0], fields[:, 0], fields[:, 1]])
    return solve_steady_batch(tensor, _coeff_batch(deltas, amps))


def _sources(
    system: AtomicSystem,
    eta: np.ndarray,
    rho: np.ndarray,
    control_source: str,
) -> np.ndarray:
    """dA/dz rows for a batch of local steady states."""
    if system.scheme is Scheme.LADDER4:
        return 1j * np.column_stack(
            [eta[0] * rho[:, _RHO21], eta[1] * rho[:, _RHO32], eta[2] * rho[:, _RHO43]]
        )
    shared = eta[0] * rho[:, _RHO21] + eta[1] * rho[:, _RHO32]
    control = eta[2] * rho[:, _RHO43 if control_source == "rho43" else _RHO42]
    return 1j * np.column_stack([shared, control])


def propagate_batch(
    system: AtomicSystem,
    deltas: np.ndarray,
    entry: np.ndarray,
    medium: MediumSpec,
    control_source: str = "rho43",
    want_state: bool = False,
):
    """Exit amplitudes for a stack of independent sweep points.

    deltas: real (B, 3) rows of (delta1, delta2, delta), fixed along z.
    entry: complex (B, nf) entry amplitudes in field order
        (coupling, probe, control) on the ladder, (probe, control) on
        the Y scheme.

    Returns the (B, nf) exit amplitudes; with ``want_state`` also the
    (B, 16) steady vec(rho) at the exit fields.  Every row is computed
    independently, so chunking a sweep cannot change any result.
    """
    _check_control_source(control_source)
    deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
    fields = np.atleast_2d(np.asarray(entry, dtype=complex)).copy()
    n_fields = len(FIELD_NAMES[system.scheme])
    if deltas.shape[1] != 3 or fields.shape != (deltas.shape[0], n_fields):
        raise ParameterError(
            f"expected deltas (B, 3) and entry (B, {n_fields}), "
            f"got {deltas.shape} and {fields.shape}"
        )
    tensor = generator_tensor(system)
    eta = _eta_vector(system, medium)
    h = medium.length / medium.steps

    if not eta.any():
        # vacuum: the sources vanish identically and the fields pass
        # through unchanged
        if want_state:
            return fields, _local_states(system, tensor, deltas, fields)
        return fields

    def deriv(local: np.ndarray, z: float) -> np.ndarray:
        try:
            rho = _local_states(system, tensor, deltas, local)
        except (ConvergenceError, DegenerateSteadyStateError) as exc:
            raise PropagationError(f"steady state failed at z = {z:.6g} cm: {exc}", z=z) from exc
        return _sources(system, eta, rho, control_source)

    for n in range(medium.steps):
        z = n * h
        k1 = deriv(fields, z)
        k2 = deriv(fields + (0.5 * h) * k1, z + 0.5 * h)
        k3 = deriv(fields + (0.5 * h) * k2, z + 0.5 * h)
        k4 = deriv(fields + h * k3, z + h)
        fields += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(fields).all():
            raise PropagationError(f"field amplitudes diverged at z = {(n + 1) * h:.6g} cm", z=(n + 1) * h)

    if want_state:
        return fields, _local_states(system, tensor, deltas, fields)
    return fields


def propagate_sweep(
    system: AtomicSystem,
    deltas: np.ndarray,
    entry: np.ndarray,
    medium: MediumSpec,
    control_source: str = "rho43",
    threads: int = 1,
    want_state: bool = False,
):
    """Chunked (optionally threaded) version of :func:`propagate_batch`.

    Work is split into fixed slices of ``CHUNK`` sweep points and
    reassembled in grid order; because each point is independent the
    output is byte-identical for every thread count.
    """
    deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
    entry = np.atleast_2d(np.asarray(entry, dtype=complex))
    total = deltas.shape[0]
    slices = [slice(lo, min(lo + CHUNK, total)) for lo in range(0, total, CHUNK)]

    exit_fields = np.empty_like(entry)
    states = np.empty((total, 16), dtype=complex) if want_state else None

    def run(piece: slice):
        return propagate_batch(
            system, deltas[piece], entry[piece], medium, control_source, want_state
        )

    if int(threads) <= 1 or len(slices) == 1:
        results = [run(piece) for piece in slices]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(run, slices))
    for piece, result in zip(slices, results):
        if want_state:
            exit_fields[piece], states[piece] = result
        else:
            exit_fields[piece] = result
    if want_state:
        return exit_fields, states
    return exit_fields


def propagate(
    system: AtomicSystem,
    drives_at_entry: DriveSet,
    medium: MediumSpec,
    control_source: str = "rho43",
) -> FieldProfile:
    """Integrate one set of entry drives through the medium.

    Returns the full z-resolved :class:`FieldProfile` (steps + 1 grid
    points).  Raises PropagationError if the atomic steady state is
    unsolvable anywhere along z.
    """
    _check_control_source(control_source)
    tensor = generator_tensor(system)
    eta = _eta_vector(system, medium)
    deltas = np.array([[drives_at_entry.delta1, drives_at_entry.delta2, drives_at_entry.delta]])
    names = FIELD_NAMES[system.scheme]
    state = _entry_state(system, drives_at_entry)[None, :]

    h = medium.length / medium.steps
    z = np.linspace(0.0, medium.length, medium.steps + 1)
    z[-1] = medium.length
    trajectory = np.empty((medium.steps + 1, state.shape[1]), dtype=complex)
    trajectory[0] = state[0]

    if not eta.any():
        trajectory[:] = state[0]
        return FieldProfile(z, dict(zip(names, trajectory.T.copy())))

    def deriv(local: np.ndarray, at: float) -> np.ndarray:
        try:
            rho = _local_states(system, tensor, deltas, local)
        except (ConvergenceError, DegenerateSteadyStateError) as exc:
            raise PropagationError(f"steady state failed at z = {at:.6g} cm: {exc}", z=at) from exc
        return _sources(system, eta, rho, control_source)

    for n in range(medium.steps):
        at = n * h
        k1 = deriv(state, at)
        k2 = deriv(state + (0.5 * h) * k1, at + 0.5 * h)
        k3 = deriv(state + (0.5 * h) * k2, at + 0.5 * h)
        k4 = deriv(state + h * k3, at + h)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(state).all():
            raise PropagationError(f"field amplitudes diverged at z = {(n + 1) * h:.6g} cm", z=(n + 1) * h)
        trajectory[n + 1] = state[0]

    return FieldProfile(z, dict(zip(names, trajectory.T.copy())))


def transmission(profile: FieldProfile, field: str = "probe") -> float:
    """Exit-to-entry intensity ratio ``|X(L)|^2 / |X(0)|^2``."""
    values = profile._field(field)
    entry = abs(complex(values[0]))
    if entry == 0.0:
        raise UndefinedTransmissionError(
            f"transmission of {field!r} undefined: entry amplitude is zero"
        )
    return float(abs(complex(values[-1])) ** 2 / entry**2)


def exit_change(coarse: np.ndarray, fine: np.ndarray, entry: np.ndarray) -> float:
    """Largest relative change between two exit-amplitude stacks.

    Each amplitude is scaled by the larger of its entry and exit
    magnitudes, so fields that decay to nothing are not judged against
    a vanishing denominator.
    """
    coarse = np.asarray(coarse, dtype=complex)
    fine = np.asarray(fine, dtype=complex)
    entry = np.asarray(entry, dtype=complex)
    scale = np.maximum(np.abs(entry), np.maximum(np.abs(coarse), np.abs(fine)))
    diff = np.abs(fine - coarse)
    mask = scale > 0.0
    if not mask.any():
        return 0.0
    return float((diff[mask] / scale[mask]).max())


def refine_until_converged(
    system: AtomicSystem,
    drives_at_entry: DriveSet,
    medium: MediumSpec,
    rel_tol: float = 1e-6,
    max_refinements: int = 6,
    control_source: str = "rho43",
) -> FieldProfile:
    """Double the z step count until the exit amplitudes settle.

    Returns the profile of the first grid whose halved step changes no
    exit amplitude by more than ``rel_tol`` (relative, per
    :func:`exit_change`).  Raises AccuracyError when ``max_refinements``
    doublings are exhausted.
    """
    if rel_tol <= 0.0:
        raise ParameterError(f"rel_tol must be > 0, got {rel_tol}")
    profile = propagate(system, drives_at_entry, medium, control_source)
    entry = _entry_state(system, drives_at_entry)
    names = FIELD_NAMES[system.scheme]
    current = np.array([profile.exit(name) for name in names])
    for _ in range(max_refinements):
        medium = replace(medium, steps=2 * medium.steps)
        finer = propagate(system, drives_at_entry, medium, control_source)
        nxt = np.array([finer.exit(name) for name in names])
        if exit_change(current, nxt, entry) < rel_tol:
            return finer
        profile, current = finer, nxt
    raise AccuracyError(
        f"exit amplitudes did not settle to {rel_tol:g} within "
        f"{max_refinements} step-doublings (reached {medium.steps} steps)"
    )
