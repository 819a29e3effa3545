"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical or numerical parameter is out of its allowed range."""


class ConfigError(ValueError):
    """A run configuration document is malformed or inconsistent."""


class DegenerateSteadyStateError(RuntimeError):
    """The relaxation structure does not single out a steady state."""


class ConvergenceError(RuntimeError):
    """A solver finished without meeting its residual tolerance."""


class StepSizeError(RuntimeError):
    """A time step violates the integrator stability bound or blew up."""


class PropagationError(RuntimeError):
    """Field integration failed at a specific depth in the medium."""

    def __init__(self, message: str, z: float = float("nan")):
        super().__init__(message)
        self.z = z


class AccuracyError(RuntimeError):
    """Grid refinement stopped before reaching the requested accuracy."""


class ResolutionError(RuntimeError):
    """A sampling grid is too coarse for the requested operation."""


class UndefinedTransmissionError(ValueError):
    """Transmission is undefined because the entry amplitude vanishes."""
