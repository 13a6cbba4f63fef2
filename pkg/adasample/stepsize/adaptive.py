"""Curvature-based step size with the median fallback."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..data.dataset import SparseDataset, Subset
from ..errors import StepSizeError
from ..model.logistic import ModelState, hvp

__all__ = [
    "DEFAULT_BOOTSTRAP_STEP",
    "FallbackBuffer",
    "adaptive_step",
    "curvature_along",
    "inflate_curvature",
]

logger = logging.getLogger(__name__)

DEFAULT_BOOTSTRAP_STEP = 1e-3


@dataclass(slots=True)
class FallbackBuffer:
    """The last ``capacity`` accepted step sizes."""

    capacity: int = 20
    recent_steps: deque[float] = field(init=False)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise StepSizeError("fallback buffer capacity must be positive")
        self.recent_steps = deque(maxlen=self.capacity)

    def __len__(self) -> int:
        return len(self.recent_steps)

    def push(self, step: float) -> None:
        if not (math.isfinite(step) and step > 0):
            raise StepSizeError(f"only finite positive steps are buffered, got {step}")
        self.recent_steps.append(float(step))

    def median(self) -> float:
        """Median of the buffered steps; even lengths average the middle pair."""

        if not self.recent_steps:
            raise StepSizeError("fallback buffer is empty")
        return float(np.median(np.fromiter(self.recent_steps, dtype=np.float64)))


def inflate_curvature(delta_hat: float, eps: float) -> float:
    """delta_hat / sqrt(1 - eps)."""

    return delta_hat / math.sqrt(1.0 - eps)


def adaptive_step(
    rho: float,
    delta_hat: float,
    eps: float,
    buffer: FallbackBuffer,
    *,
    default_step: float = DEFAULT_BOOTSTRAP_STEP,
) -> tuple[float, bool]:
    """Return ``(t, fallback)`` for one iteration.

    With rho > 0 and delta_hat > 0 the step is
    rho / ((rho + d) d) for d = delta_hat / sqrt(1 - eps), and it is pushed
    onto ``buffer``. Otherwise the buffer median is used, or 1/delta_hat
    (``default_step`` when delta_hat <= 0) while the buffer is empty.
    """

    if not (math.isfinite(rho) and math.isfinite(delta_hat)):
        raise StepSizeError(f"non-finite step inputs rho={rho} delta_hat={delta_hat}")
    if not 0.0 <= eps < 1.0:
        raise StepSizeError(f"eps must lie in [0, 1), got {eps}")

    if rho > 0 and delta_hat > 0:
        scaled = inflate_curvature(delta_hat, eps)
        step = rho / ((rho + scaled) * scaled)
        buffer.push(step)
        return step, False

    if len(buffer):
        step = buffer.median()
    elif delta_hat > 0:
        step = 1.0 / delta_hat
    else:
        step = default_step
    logger.debug("Fallback step %.6g (rho=%.3e, delta_hat=%.3e)", step, rho, delta_hat)
    return step, True


def curvature_along(
    state: ModelState, data: SparseDataset, subset: Subset, d: np.ndarray
) -> float:
    """Return d . H_S d; the caller takes the square root."""

    d = np.asarray(d, dtype=np.float64)
    return float(d @ hvp(state, data, subset, d))
