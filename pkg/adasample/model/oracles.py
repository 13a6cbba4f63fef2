"""Central finite-difference references for the analytic oracles."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..data.dataset import SparseDataset, Subset
from .logistic import ModelState, grad, loss

__all__ = [
    "finite_difference_grad",
    "finite_difference_hvp",
    "hvp_step",
    "relative_error",
]

GradientFn = Callable[[ModelState, SparseDataset, Subset], np.ndarray]


def finite_difference_grad(
    state: ModelState,
    data: SparseDataset,
    subset: Subset = None,
    *,
    step: float | None = None,
) -> np.ndarray:
    """Central-difference gradient of ``loss``, one coordinate at a time."""

    h = step if step is not None else 1e-6 * (1.0 + float(np.linalg.norm(state.x)))
    x0 = np.array(state.x)
    estimate = np.empty_like(x0)
    for j in range(x0.shape[0]):
        forward = x0.copy()
        backward = x0.copy()
        forward[j] += h
        backward[j] -= h
        f_plus = loss(state.moved(forward), data, subset)
        f_minus = loss(state.moved(backward), data, subset)
        estimate[j] = (f_plus - f_minus) / (2.0 * h)
    return estimate


def hvp_step(state: ModelState, v: np.ndarray) -> float:
    """Step 1e-4 (1 + ||x||) / ||v|| used for Hessian-vector differences."""

    v_norm = float(np.linalg.norm(v))
    if v_norm == 0.0:
        return 0.0
    return 1e-4 * (1.0 + float(np.linalg.norm(state.x))) / v_norm


def finite_difference_hvp(
    state: ModelState,
    data: SparseDataset,
    subset: Subset,
    v: np.ndarray,
    *,
    gradient: GradientFn = grad,
) -> np.ndarray:
    """Central difference of the gradient along ``v``."""

    v = np.asarray(v, dtype=np.float64)
    h = hvp_step(state, v)
    if h == 0.0:
        return np.zeros_like(state.x)
    g_plus = gradient(state.moved(state.x + h * v), data, subset)
    g_minus = gradient(state.moved(state.x - h * v), data, subset)
    return (g_plus - g_minus) / (2.0 * h)


def relative_error(estimate: np.ndarray, reference: np.ndarray, floor: float = 1e-12) -> float:
    """Return ||estimate - reference|| / max(||estimate||, ||reference||, floor)."""

    scale = max(float(np.linalg.norm(estimate)), float(np.linalg.norm(reference)), floor)
    return float(np.linalg.norm(np.asarray(estimate) - np.asarray(reference))) / scale
