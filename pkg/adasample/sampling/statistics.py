"""Batch-size test statistics and the sizes they propose.

Each test compares a variance estimate against a threshold; when it fails,
the proposal is the batch size at which the same estimate would pass.
Proposals are ceilinged and clamped to ``[current size, max_batch]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import DegenerateGradientError, SamplingError

__all__ = [
    "GradientSample",
    "DenseGradients",
    "as_gradient_sample",
    "DEGENERATE_NORM",
    "acute_angle_statistic",
    "raw_grad_size",
    "grad_size_proposal",
    "hessian_statistic",
    "raw_hess_size",
    "hess_size_proposal",
    "norm_test_proposal",
    "inner_product_test_proposal",
    "augmented_inner_product_test_proposal",
    "clamp_proposal",
]

# Gradient norms below this are treated as converged.
DEGENERATE_NORM = 1e-12


@runtime_checkable
class GradientSample(Protocol):
    """Per-sample gradients exposing the reductions the tests need."""

    @property
    def size(self) -> int: ...

    def dots(self, v: np.ndarray) -> np.ndarray: ...

    def squared_norms(self) -> np.ndarray: ...


@dataclass(frozen=True, slots=True)
class DenseGradients:
    """Per-sample gradients given as the rows of a dense array."""

    matrix: np.ndarray

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def dots(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def squared_norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.matrix, self.matrix)


def as_gradient_sample(grads: GradientSample | np.ndarray) -> GradientSample:
    if isinstance(grads, GradientSample):
        return grads
    matrix = np.atleast_2d(np.asarray(grads, dtype=np.float64))
    return DenseGradients(matrix)


def clamp_proposal(raw: float, current: int, max_batch: int | None) -> int:
    """Ceil ``raw`` and clamp it to ``[current, max_batch]``."""

    if not math.isfinite(raw):
        proposal = max_batch if max_batch is not None else current
    else:
        # round first so values like 64.00000000000001 do not ceil up
        proposal = math.ceil(round(raw, 9))
    proposal = max(proposal, current)
    if max_batch is not None:
        proposal = min(proposal, max(max_batch, current))
    return int(proposal)


def _require_batch(sample: GradientSample) -> int:
    size = sample.size
    if size < 2:
        raise SamplingError(f"variance tests need at least 2 samples, got {size}")
    return size


def _norm_or_degenerate(v: np.ndarray, name: str) -> float:
    norm = float(np.linalg.norm(v))
    if not norm > DEGENERATE_NORM:
        raise DegenerateGradientError(f"{name} has norm {norm:.3e}")
    return norm


def _angle_residual_sum(sample: GradientSample, g_k: np.ndarray, g_avg: np.ndarray) -> float:
    """Sum over samples of ||g_i/||g_k|| - (g_i.u / ||g_k||) u||^2, u = g_avg/||g_avg||."""

    g_norm = _norm_or_degenerate(g_k, "sampled gradient")
    avg_norm = _norm_or_degenerate(g_avg, "running-average gradient")
    unit = np.asarray(g_avg, dtype=np.float64) / avg_norm
    along = sample.dots(unit)
    residual = np.maximum(sample.squared_norms() - along**2, 0.0)
    return float(residual.sum()) / g_norm**2


def acute_angle_statistic(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    g_avg: np.ndarray,
) -> float:
    """Approximate acute-angle statistic; the test passes when it is <= p nu^2."""

    sample = as_gradient_sample(grads)
    size = _require_batch(sample)
    return _angle_residual_sum(sample, g_k, g_avg) / (size * (size - 1))


def raw_grad_size(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    g_avg: np.ndarray,
    p: float,
    nu: float,
) -> float:
    """Unrounded gradient batch size that would pass the acute-angle test."""

    sample = as_gradient_sample(grads)
    size = _require_batch(sample)
    return _angle_residual_sum(sample, g_k, g_avg) / ((size - 1) * p * nu**2)


def grad_size_proposal(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    g_avg: np.ndarray,
    p: float,
    nu: float,
    *,
    max_batch: int | None = None,
) -> int:
    sample = as_gradient_sample(grads)
    raw = raw_grad_size(sample, g_k, g_avg, p, nu)
    return clamp_proposal(raw, sample.size, max_batch)


def _curvature_spread(curvatures: np.ndarray, delta_hat_sq: float) -> tuple[int, float]:
    values = np.asarray(curvatures, dtype=np.float64).ravel()
    if values.size < 2:
        raise SamplingError(f"the curvature test needs at least 2 samples, got {values.size}")
    if not delta_hat_sq > 0:
        raise DegenerateGradientError(f"non-positive sampled curvature {delta_hat_sq:.3e}")
    return values.size, float(np.sum((values - delta_hat_sq) ** 2))


def hessian_statistic(curvatures: np.ndarray, delta_hat_sq: float) -> float:
    """Curvature-precision statistic; the test passes when it is <= p eps^2."""

    size, spread = _curvature_spread(curvatures, delta_hat_sq)
    return spread / (size * (size - 1) * delta_hat_sq**2)


def raw_hess_size(curvatures: np.ndarray, delta_hat_sq: float, p: float, eps: float) -> float:
    size, spread = _curvature_spread(curvatures, delta_hat_sq)
    return spread / (eps**2 * (size - 1) * p * delta_hat_sq**2)


def hess_size_proposal(
    curvatures: np.ndarray,
    delta_hat_sq: float,
    p: float,
    eps: float,
    *,
    max_batch: int | None = None,
) -> int:
    raw = raw_hess_size(curvatures, delta_hat_sq, p, eps)
    return clamp_proposal(raw, np.asarray(curvatures).size, max_batch)


def norm_test_proposal(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    theta: float,
    *,
    max_batch: int | None = None,
) -> tuple[float, int]:
    """Norm test: sample variance / (|S| ||g_S||^2) against theta^2."""

    sample = as_gradient_sample(grads)
    size = _require_batch(sample)
    g_norm = _norm_or_degenerate(g_k, "sampled gradient")
    spread = (
        float(sample.squared_norms().sum())
        - 2.0 * float(sample.dots(g_k).sum())
        + size * g_norm**2
    )
    variance = max(spread, 0.0) / (size - 1)
    statistic = variance / (size * g_norm**2)
    raw = variance / (theta**2 * g_norm**2)
    return statistic, clamp_proposal(raw, size, max_batch)


def _inner_product_parts(sample: GradientSample, g_k: np.ndarray) -> tuple[int, float, float]:
    size = _require_batch(sample)
    g_norm = _norm_or_degenerate(g_k, "sampled gradient")
    variance = float(np.var(sample.dots(g_k), ddof=1))
    return size, g_norm, variance


def inner_product_test_proposal(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    theta: float,
    *,
    max_batch: int | None = None,
) -> tuple[float, int]:
    """Inner-product test: variance of g_i . g_S / (|S| ||g_S||^4) against theta^2."""

    sample = as_gradient_sample(grads)
    size, g_norm, variance = _inner_product_parts(sample, g_k)
    statistic = variance / (size * g_norm**4)
    raw = variance / (theta**2 * g_norm**4)
    return statistic, clamp_proposal(raw, size, max_batch)


def augmented_inner_product_test_proposal(
    grads: GradientSample | np.ndarray,
    g_k: np.ndarray,
    theta: float,
    *,
    nu: float | None = None,
    max_batch: int | None = None,
) -> tuple[float, int]:
    """Inner-product test plus the orthogonality variance condition.

    The orthogonality part bounds the spread of the components of g_i
    orthogonal to g_S by nu^2 (nu defaults to theta). The returned
    statistic is the larger of the two, expressed against theta^2.
    """

    nu = theta if nu is None else nu
    sample = as_gradient_sample(grads)
    size, g_norm, variance = _inner_product_parts(sample, g_k)
    along = sample.dots(g_k)
    orthogonal = np.maximum(sample.squared_norms() - along**2 / g_norm**2, 0.0).sum()
    inner_stat = variance / (size * g_norm**4)
    orth_stat = float(orthogonal) / ((size - 1) * size * g_norm**2)
    statistic = max(inner_stat, orth_stat * theta**2 / nu**2)
    raw = max(
        variance / (theta**2 * g_norm**4),
        float(orthogonal) / ((size - 1) * nu**2 * g_norm**2),
    )
    return statistic, clamp_proposal(raw, size, max_batch)
