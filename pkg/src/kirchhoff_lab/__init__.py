"""Spectral simulation and estimate audits for the damped degenerate Kirchhoff
equation ``eps u'' + u' + |A^{1/2} u|^{2 gamma} A u = 0`` and its parabolic limit."""

from .errors import (
    BlowUpError,
    ConfigError,
    GridMismatchError,
    LabError,
    RegimeError,
    SolverError,
)
from .spectral import (
    InitialData,
    MuNuProfile,
    SpectralOperator,
    apply_power,
    classify,
    compute_theta0,
    weighted_norm,
)
from .parabolic import ParabolicTrajectory, derivatives, solve_direct, solve_profile
from .hyperbolic import (
    ComponentSeries,
    HyperbolicTrajectory,
    components,
    energy,
    solve_hyperbolic,
)
from .remainders import RemainderSeries, build_remainders, corrector

__all__ = [
    "BlowUpError",
    "ComponentSeries",
    "ConfigError",
    "GridMismatchError",
    "HyperbolicTrajectory",
    "InitialData",
    "LabError",
    "MuNuProfile",
    "ParabolicTrajectory",
    "RegimeError",
    "RemainderSeries",
    "SolverError",
    "SpectralOperator",
    "apply_power",
    "build_remainders",
    "classify",
    "components",
    "compute_theta0",
    "corrector",
    "derivatives",
    "energy",
    "solve_direct",
    "solve_hyperbolic",
    "solve_profile",
    "weighted_norm",
]

__version__ = "0.1.0"
