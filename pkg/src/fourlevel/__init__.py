"""Coherent control of nonlinear absorption in four-level atomic media.

Steady-state density matrices of driven ladder and Y-type four-level
schemes, field propagation through homogeneous media under quasi-static
closure, and the derived experiments: transmission spectra, all-optical
switching, Gaussian pulse transfer, ring-cavity bistability and
saturable/reverse-saturable absorption, plus a config/CLI layer that
writes deterministic CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from .atoms import AtomicSystem, DriveSet, Scheme, dephasing_rates, liouvillian
from .cavity import (
    BistabilityCurve,
    CavitySpec,
    bistability_thresholds,
    cavity_sweep,
    cooperation_to_mirror,
)
from .config import (
    CavityBlock,
    GridSpec,
    PulseBlock,
    RunConfig,
    emit_config,
    parse_config,
    preset,
    preset_names,
)
from .errors import (
    AccuracyError,
    ConfigError,
    ConvergenceError,
    DegenerateSteadyStateError,
    ParameterError,
    PropagationError,
    ResolutionError,
    StepSizeError,
    UndefinedTransmissionError,
)
from .experiments import (
    SweepResult,
    parabolic_extrema,
    probe_spectrum,
    sa_rsa_curve,
    spectrum_extrema,
    switching_curve,
)
from .propagation import (
    CONTROL_SOURCES,
    FIELD_NAMES,
    FieldProfile,
    MediumSpec,
    propagate,
    propagate_sweep,
    refine_until_converged,
    transmission,
)
from .pulse import (
    PulseResult,
    PulseSpec,
    gaussian_envelope,
    pulse_transmission,
    to_frequency,
    to_time,
)
from .steady import (
    relaxation_horizon,
    steady_state,
    steady_state_residual,
    susceptibility_element,
    time_evolve,
)

__all__ = [
    "__version__",
    "AtomicSystem",
    "DriveSet",
    "Scheme",
    "dephasing_rates",
    "liouvillian",
    "BistabilityCurve",
    "CavitySpec",
    "bistability_thresholds",
    "cavity_sweep",
    "cooperation_to_mirror",
    "CavityBlock",
    "GridSpec",
    "PulseBlock",
    "RunConfig",
    "emit_config",
    "parse_config",
    "preset",
    "preset_names",
    "AccuracyError",
    "ConfigError",
    "ConvergenceError",
    "DegenerateSteadyStateError",
    "ParameterError",
    "PropagationError",
    "ResolutionError",
    "StepSizeError",
    "UndefinedTransmissionError",
    "SweepResult",
    "parabolic_extrema",
    "probe_spectrum",
    "sa_rsa_curve",
    "spectrum_extrema",
    "switching_curve",
    "CONTROL_SOURCES",
    "FIELD_NAMES",
    "FieldProfile",
    "MediumSpec",
    "propagate",
    "propagate_sweep",
    "refine_until_converged",
    "transmission",
    "PulseResult",
    "PulseSpec",
    "gaussian_envelope",
    "pulse_transmission",
    "to_frequency",
    "to_time",
    "relaxation_horizon",
    "steady_state",
    "steady_state_residual",
    "susceptibility_element",
    "time_evolve",
]
