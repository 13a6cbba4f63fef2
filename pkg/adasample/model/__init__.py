"""Regularized logistic regression oracles."""

from .logistic import (
    ModelState,
    PerSampleGradients,
    ProblemConstants,
    accuracy,
    default_lambda,
    estimate_constants,
    grad,
    hvp,
    loss,
    loss_and_grad,
    per_sample_curvature,
    per_sample_grads,
)

__all__ = [
    "ModelState",
    "PerSampleGradients",
    "ProblemConstants",
    "accuracy",
    "default_lambda",
    "estimate_constants",
    "grad",
    "hvp",
    "loss",
    "loss_and_grad",
    "per_sample_curvature",
    "per_sample_grads",
]
