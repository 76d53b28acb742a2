"""Directions of extreme behaviour from maxima of the cumulant function.

The cumulant function ``G(r, theta) = log E exp(r * theta . X)`` of a
centered random vector, maximized over unit directions at a fixed radius,
recovers the first principal component as ``r -> 0`` and the directions of
the heaviest tails as ``r`` grows.
"""

from .core import CumulantProfile, DataMatrix, angle_between, axis_angle, center, normalize
from .cumulant import (
    cumulant_gradient,
    cumulant_profile,
    effective_sample_size,
    empirical_cumulant,
    standard_error,
)
from .estimator import CumulantMaxima
from .exceptions import (
    DegenerateDirection,
    DegenerateModelWarning,
    DegenerateProjection,
    DegenerateSpectrumWarning,
    HeavyTailWarning,
    InsufficientData,
    MCFError,
    NonConvergence,
    NotCentered,
    NotPositiveDefinite,
    NumericalError,
    OutsideDomain,
    ParseError,
    StandardizedInputWarning,
)
from .optimizer import MCFResult, Maximum, OptimizerConfig, auto_radius, deduplicate, maximize_at_radius, mcf
from .pca import EigenPair, leading_eigenpair, sample_covariance
from .tail import TailDominanceReport, find_tail_crossing, marginal_density, verify_theorem1

__version__ = "0.1.0"

__all__ = [
    "CumulantMaxima",
    "CumulantProfile",
    "DataMatrix",
    "EigenPair",
    "MCFResult",
    "Maximum",
    "OptimizerConfig",
    "TailDominanceReport",
    "angle_between",
    "auto_radius",
    "axis_angle",
    "center",
    "cumulant_gradient",
    "cumulant_profile",
    "deduplicate",
    "effective_sample_size",
    "empirical_cumulant",
    "find_tail_crossing",
    "leading_eigenpair",
    "marginal_density",
    "maximize_at_radius",
    "mcf",
    "normalize",
    "sample_covariance",
    "standard_error",
    "verify_theorem1",
    "MCFError",
    "InsufficientData",
    "NotCentered",
    "DegenerateDirection",
    "DegenerateProjection",
    "NumericalError",
    "NotPositiveDefinite",
    "OutsideDomain",
    "NonConvergence",
    "ParseError",
    "DegenerateSpectrumWarning",
    "HeavyTailWarning",
    "DegenerateModelWarning",
    "StandardizedInputWarning",
]
