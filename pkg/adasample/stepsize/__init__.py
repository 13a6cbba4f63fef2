"""Adaptive step sizes and decrease diagnostics."""

from .adaptive import (
    DEFAULT_BOOTSTRAP_STEP,
    FallbackBuffer,
    adaptive_step,
    curvature_along,
    inflate_curvature,
)
from .records import StepRecord
from .theory import (
    ConvergenceConstants,
    convergence_constants,
    decrease_gap,
    guaranteed_decrease,
    idealized_sample_bounds,
    omega,
    omega_quadratic_floor,
    success_probability,
)

__all__ = [
    "DEFAULT_BOOTSTRAP_STEP",
    "FallbackBuffer",
    "adaptive_step",
    "curvature_along",
    "inflate_curvature",
    "StepRecord",
    "ConvergenceConstants",
    "convergence_constants",
    "decrease_gap",
    "guaranteed_decrease",
    "idealized_sample_bounds",
    "omega",
    "omega_quadratic_floor",
    "success_probability",
]
