"""Exception hierarchy. The CLI maps these onto exit codes."""


class LabError(Exception):
    """Base class for all errors raised by this package."""


class SolverError(LabError):
    """An integrator could not meet its tolerance (step size underflow, NaN)."""


class BlowUpError(SolverError):
    """The hyperbolic run left the regime where a global decaying solution exists."""


class GridMismatchError(LabError):
    """Two trajectories that must share a sample grid do not."""


class RegimeError(LabError):
    """Initial data are in the wrong regime for the requested audit."""


class ConfigError(LabError):
    """An experiment configuration failed to parse or validate."""
