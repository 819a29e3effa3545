"""Gaussian probe-pulse transmission through the driven medium.

The pulse is defined in the frequency domain,

    eps(omega) = eps0 / (sigma sqrt(pi)) exp(-omega^2 / sigma^2),

whose exact inverse transform is the time envelope
(eps0 / 2 pi) exp(-t^2 / sigma_t^2) with sigma_t = 2 / sigma.  Each
spectral component is narrow enough (kHz against MHz atomic rates) to
be transmitted with the steady-state transfer function H(omega) built
from one propagation per frequency-grid point; multiplying the spectrum
by H and transforming back gives the transmitted envelope.  Coupling
and control are undepleted, as in the other weak-probe sweeps.

All quantities are in units of gamma: sigma and omega in gamma, times
in 1/gamma, amplitudes as Rabi amplitudes in gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .atoms import AtomicSystem, DriveSet, Scheme
from .errors import ParameterError, ResolutionError
from .experiments import _undepleted_medium
from .propagation import FIELD_NAMES, MediumSpec, propagate_sweep

#: relative spectral/temporal tail allowed at the grid edge before the
#: discrete transform is declared aliased
_TAIL = 1e-12

#: relative change of H(0) between half and full entry amplitude above
#: which the run is flagged as outside the linear-response regime
_LINEAR_TOL = 1e-2


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian pulse plus the dual grids it is sampled on.

    ``peak`` is the peak Rabi amplitude of the time envelope; the
    frequency normalization is eps0 = 2 pi peak, so the spectrum
    integrates to eps0.  The frequency grid holds ``points`` samples
    centered on the carrier, spanning ``span`` to each side; the time
    grid is its exact discrete-transform dual.
    """

    sigma: float
    peak: float = 0.1
    points: int = 4096
    span: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ParameterError(f"pulse width must be > 0, got {self.sigma}")
        if not self.peak > 0.0:
            raise ParameterError(f"peak amplitude must be > 0, got {self.peak}")
        if int(self.points) != self.points or self.points < 4096:
            raise ParameterError("frequency grid needs at least 4096 points")
        object.__setattr__(self, "points", int(self.points))
        span = 8.0 * self.sigma if self.span is None else float(self.span)
        if span < 6.0 * self.sigma:
            raise ParameterError("frequency grid must span at least 6 sigma")
        object.__setattr__(self, "span", span)

    @property
    def sigma_t(self) -> float:
        return 2.0 / self.sigma

    @property
    def epsilon0(self) -> float:
        return 2.0 * np.pi * self.peak

    @property
    def domega(self) -> float:
        return 2.0 * self.span / self.points

    @property
    def dt(self) -> float:
        return 2.0 * np.pi / (self.points * self.domega)

    def frequency_grid(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.domega

    def time_grid(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.dt


def to_time(spectrum: np.ndarray, domega: float) -> np.ndarray:
    """Centered discrete version of (1/2pi) int eps(w) e^{-iwt} dw."""
    swapped = np.fft.ifftshift(np.asarray(spectrum, dtype=complex))
    return np.fft.fftshift(np.fft.fft(swapped)) * (domega / (2.0 * np.pi))


def to_frequency(trace: np.ndarray, dt: float) -> np.ndarray:
    """Centered discrete version of int eps(t) e^{+iwt} dt."""
    swapped = np.fft.ifftshift(np.asarray(trace, dtype=complex))
    return np.fft.fftshift(np.fft.ifft(swapped)) * (dt * trace.size)


def gaussian_envelope(spec: PulseSpec):
    """Sampled spectrum and its exact discrete time-domain transform.

    Raises ResolutionError when the time grid is too short to hold the
    envelope (the transform would wrap around).
    """
    omega = spec.frequency_grid()
    spectrum = (
        spec.epsilon0 / (spec.sigma * np.sqrt(np.pi))
        * np.exp(-((omega / spec.sigma) ** 2))
    )
    t_edge = (spec.points // 2) * spec.dt
    if np.exp(-((t_edge / spec.sigma_t) ** 2)) > _TAIL:
        needed = spec.sigma_t * np.sqrt(-np.log(_TAIL))
        raise ResolutionError(
            f"time grid reaches {t_edge:.4g}/gamma but the envelope needs "
            f"{needed:.4g}; raise the point count or shrink the span"
        )
    return spectrum, to_time(spectrum, spec.domega)


@dataclass(frozen=True)
class PulseResult:
    """Input and transmitted envelopes on the retarded-time axis."""

    tau: np.ndarray
    input_trace: np.ndarray
    output_trace: np.ndarray
    peak_ratio: float
    transfer_center: complex
    regime_warning: bool


def _transfer(
    system: AtomicSystem,
    drives: DriveSet,
    medium: MediumSpec,
    detunings: np.ndarray,
    amplitude: float,
    control_source: str,
    threads: int,
) -> np.ndarray:
    """Complex probe amplitude ratio exit/entry per probe detuning."""
    names = FIELD_NAMES[system.scheme]
    probe_index = names.index("probe")
    count = detunings.size
    probe_col = np.full(count, amplitude, dtype=complex)
    if system.scheme is Scheme.LADDER4:
        entry = np.column_stack(
            [np.full(count, drives.coupling, dtype=complex), probe_col,
             np.full(count, drives.control, dtype=complex)]
        )
    else:
        entry = np.column_stack(
            [probe_col, np.full(count, drives.control, dtype=complex)]
        )
    deltas = np.column_stack(
        [np.full(count, drives.delta1), detunings, np.full(count, drives.delta)]
    )
    exits = propagate_sweep(
        system, deltas, entry, medium, control_source, threads
    )
    return exits[:, probe_index] / amplitude


def pulse_transmission(
    spec: PulseSpec,
    system: AtomicSystem,
    drives: DriveSet,
    medium: MediumSpec,
    control_source: str = "rho43",
    threads: int = 1,
) -> PulseResult:
    """Send the pulse through the medium around carrier ``drives.delta2``.

    Every spectral sample rides the steady-state transfer function at
    its own probe detuning; the returned traces share the retarded-time
    axis tau = t - L/c in units of 1/gamma.  ``regime_warning`` flags a
    transfer function that changes by more than 1e-2 relative when the
    entry amplitude is halved, i.e. a pulse outside linear response.
    """
    medium = _undepleted_medium(system, medium)
    spectrum, input_trace = gaussian_envelope(spec)
    omega = spec.frequency_grid()
    transfer = _transfer(
        system, drives, medium, drives.delta2 + omega,
        spec.peak, control_source, threads,
    )
    output_trace = to_time(spectrum * transfer, spec.domega)
    peak_ratio = float(
        np.abs(output_trace).max() ** 2 / np.abs(input_trace).max() ** 2
    )
    center = np.array([drives.delta2])
    h_full, h_half = (
        _transfer(system, drives, medium, center, amp, control_source, threads)[0]
        for amp in (spec.peak, 0.5 * spec.peak)
    )
    warned = abs(abs(h_half) - abs(h_full)) > _LINEAR_TOL * abs(h_full)
    return PulseResult(
        tau=spec.time_grid(),
        input_trace=input_trace,
        output_trace=output_trace,
        peak_ratio=peak_ratio,
        transfer_center=complex(h_full),
        regime_warning=bool(warned),
    )
