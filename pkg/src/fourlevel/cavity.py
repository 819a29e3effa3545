"""Steady-state response of a unidirectional ring cavity around the cell.

Only the probe beam circulates; coupling and control enter fresh on
every pass and are treated as undepleted inside the cell.  The curve is
parametrized by the circulating entry amplitude x, so every point is a
single forward propagation and the multivalued input-output relation of
a bistable cavity is traced exactly, with no fixed-point iteration.
For each x the medium gives the exit amplitude A(L), and the mirror
boundary conditions yield

    input  = (x - R e^{-i phase} A(L)) / sqrt(T)
    output = sqrt(T) A(L)

Turning points of input(x) are sharpened by golden-section search in
log x, and their input intensities are the switching thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .atoms import AtomicSystem, DriveSet, Scheme
from .errors import ParameterError, ResolutionError
from .experiments import _undepleted_medium, parabolic_extrema
from .propagation import FIELD_NAMES, MediumSpec, propagate_sweep

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CavitySpec:
    """Mirror parameters of the ring cavity.

    ``cooperation`` is optional bookkeeping: when set, sweeps verify it
    against the medium through C = eta23 L / (gamma23 T).
    """

    reflectance: float
    transmittance: float
    phase: float = 0.0
    cooperation: Optional[float] = None

    def __post_init__(self) -> None:
        r, t = float(self.reflectance), float(self.transmittance)
        if not (0.0 <= r < 1.0):
            raise ParameterError(f"reflectance must be in [0, 1), got {r}")
        if not (0.0 < t <= 1.0):
            raise ParameterError(f"transmittance must be in (0, 1], got {t}")
        if abs(r + t - 1.0) > 1e-12:
            raise ParameterError(f"mirrors must satisfy R + T = 1, got {r + t}")
        if not np.isfinite(self.phase):
            raise ParameterError("cavity phase must be finite")
        if self.cooperation is not None and not self.cooperation > 0.0:
            raise ParameterError("cooperation parameter must be > 0")
        object.__setattr__(self, "reflectance", r)
        object.__setattr__(self, "transmittance", t)
        object.__setattr__(self, "phase", float(self.phase))


def cooperation_to_mirror(
    cooperation: float,
    medium: MediumSpec,
    gamma23: float,
    phase: float = 0.0,
) -> CavitySpec:
    """Mirror pair realizing a cooperation parameter with this medium.

    The absorption coefficient on the probe transition is 2 eta23 /
    gamma23, so C = alpha L / (2 T) fixes T = eta23 L / (C gamma23).
    """
    if not cooperation > 0.0:
        raise ParameterError("cooperation parameter must be > 0")
    if not gamma23 > 0.0:
        raise ParameterError("gamma23 must be > 0")
    t = medium.eta[(2, 3)] * medium.length / (cooperation * gamma23)
    if not (0.0 < t <= 1.0):
        raise ParameterError(
            f"cooperation {cooperation} needs transmittance {t:.4g}, "
            "outside (0, 1]; raise C or weaken the medium"
        )
    return CavitySpec(1.0 - t, t, phase, float(cooperation))


@dataclass(frozen=True)
class BistabilityCurve:
    """Input and output intensities along the circulating-amplitude axis."""

    x: np.ndarray
    input_intensity: np.ndarray
    output_intensity: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ParameterError("x grid must be a nonempty 1-d array")
        if not np.isfinite(x).all() or np.any(x <= 0.0):
            raise ParameterError("circulating amplitudes must be finite and > 0")
        if x.size > 1 and np.any(np.diff(x) <= 0.0):
            raise ParameterError("x grid must increase strictly")
        cols = []
        for name in ("input_intensity", "output_intensity"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != x.shape:
                raise ParameterError(f"{name} must match the x grid shape")
            cols.append(values)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "input_intensity", cols[0])
        object.__setattr__(self, "output_intensity", cols[1])


def _response(
    system: AtomicSystem,
    drives: DriveSet,
    cavity: CavitySpec,
    medium: MediumSpec,
    x: np.ndarray,
    control_source: str,
    threads: int,
):
    """Input/output intensities for circulating entry amplitudes x."""
    names = FIELD_NAMES[system.scheme]
    probe_index = names.index("probe")
    amps = x.astype(complex)
    if system.scheme is Scheme.LADDER4:
        entry = np.column_stack(
            [np.full(x.size, drives.coupling, dtype=complex), amps,
             np.full(x.size, drives.control, dtype=complex)]
        )
    else:
        entry = np.column_stack(
            [amps, np.full(x.size, drives.control, dtype=complex)]
        )
    deltas = np.tile([drives.delta1, drives.delta2, drives.delta], (x.size, 1))
    exits = propagate_sweep(system, deltas, entry, medium, control_source, threads)
    exit_probe = exits[:, probe_index]
    feedback = cavity.reflectance * np.exp(-1j * cavity.phase)
    root_t = np.sqrt(cavity.transmittance)
    entry_amp = (amps - feedback * exit_probe) / root_t
    return np.abs(entry_amp) ** 2, cavity.transmittance * np.abs(exit_probe) ** 2


def _golden_passes(evaluate, x, finput, foutput, iterations):
    """Extra samples from golden-section search around each turning point.

    Works in log x (the grids are log spaced); one batched propagation
    per iteration covers every bracket.
    """
    slopes = np.diff(finput)
    brackets = []
    for i in range(1, x.size - 1):
        if slopes[i - 1] * slopes[i] < 0.0:
            sign = 1.0 if slopes[i - 1] > 0.0 else -1.0
            brackets.append([np.log(x[i - 1]), np.log(x[i + 1]), sign])
    if not brackets:
        return np.empty(0), np.empty(0), np.empty(0)
    xs_all, fin_all, fout_all = [], [], []

    def batch(us):
        pts = np.exp(np.asarray(us))
        fin, fout = evaluate(pts)
        xs_all.append(pts)
        fin_all.append(fin)
        fout_all.append(fout)
        return fin

    state = []
    probes = []
    for ua, ub, sign in brackets:
        uc = ub - _INVPHI * (ub - ua)
        ud = ua + _INVPHI * (ub - ua)
        state.append([ua, ub, uc, ud, sign])
        probes.extend([uc, ud])
    values = batch(probes)
    fc = values[0::2].copy()
    fd = values[1::2].copy()
    for _ in range(iterations):
        probes = []
        for k, (ua, ub, uc, ud, sign) in enumerate(state):
            if sign * fc[k] > sign * fd[k]:
                ub, ud, fd[k] = ud, uc, fc[k]
                uc = ub - _INVPHI * (ub - ua)
                probes.append(uc)
            else:
                ua, uc, fc[k] = uc, ud, fd[k]
                ud = ua + _INVPHI * (ub - ua)
                probes.append(ud)
            state[k] = [ua, ub, uc, ud, sign]
        values = batch(probes)
        for k, (ua, ub, uc, ud, sign) in enumerate(state):
            if sign * fc[k] > sign * fd[k]:
                fc[k] = values[k]
            else:
                fd[k] = values[k]
    return (
        np.concatenate(xs_all),
        np.concatenate(fin_all),
        np.concatenate(fout_all),
    )


def cavity_sweep(
    system: AtomicSystem,
    drives: DriveSet,
    cavity: CavitySpec,
    medium: MediumSpec,
    x_grid: np.ndarray,
    control_source: str = "rho43",
    threads: int = 1,
    refine: bool = True,
    refine_iterations: int = 8,
) -> BistabilityCurve:
    """Trace the cavity input-output curve over circulating amplitudes.

    ``drives.probe`` is ignored: the grid supplies the circulating
    probe entry amplitude.  With ``refine`` on, turning points of the
    input intensity are bracketed and resampled by golden-section
    search, and the extra points are merged into the returned curve.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ParameterError("x grid must be a nonempty 1-d array")
    if np.any(x <= 0.0) or np.any(np.diff(x) <= 0.0):
        raise ParameterError("x grid must be positive and strictly increasing")
    if cavity.cooperation is not None:
        gamma23 = system.decays[(2, 3)]
        implied = medium.eta[(2, 3)] * medium.length / (
            cavity.cooperation * gamma23
        )
        if abs(implied - cavity.transmittance) > 1e-9 * cavity.transmittance:
            raise ParameterError(
                f"cavity cooperation {cavity.cooperation} implies transmittance "
                f"{implied:.6g}, spec has {cavity.transmittance:.6g}"
            )
    medium = _undepleted_medium(system, medium)

    def evaluate(points):
        return _response(
            system, drives, cavity, medium, points, control_source, threads
        )

    finput, foutput = evaluate(x)
    if refine:
        extra_x, extra_in, extra_out = _golden_passes(
            evaluate, x, finput, foutput, refine_iterations
        )
        if extra_x.size:
            x = np.concatenate([x, extra_x])
            finput = np.concatenate([finput, extra_in])
            foutput = np.concatenate([foutput, extra_out])
            x, keep = np.unique(x, return_index=True)
            finput = finput[keep]
            foutput = foutput[keep]
    return BistabilityCurve(x, finput, foutput)


def bistability_thresholds(
    curve: BistabilityCurve,
) -> Optional[Dict[str, float]]:
    """Switching thresholds from the turning points of input(x).

    The upper threshold is the input intensity at the first local
    maximum (end of the lower branch), the lower threshold the first
    local minimum beyond it.  Returns None when input(x) is monotone.
    """
    if curve.x.size < 5:
        raise ResolutionError("threshold search needs at least 5 curve points")
    extrema = parabolic_extrema(curve.x, curve.input_intensity)
    if not extrema:
        return None
    upper = next((v for _, v, kind in extrema if kind == "max"), None)
    lower = None
    if upper is not None:
        seen_max = False
        for _, value, kind in extrema:
            if kind == "max" and not seen_max:
                seen_max = True
            elif kind == "min" and seen_max:
                lower = value
                break
    return {"lower": lower, "upper": upper}
