from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["StepRecord"]


@dataclass(frozen=True, slots=True)
class StepRecord:
    """Everything measured during one optimizer iteration.

    ``delta_hat`` and ``delta_hat_eps`` are NaN for fixed-step runs, and
    ``loss`` is the full-dataset objective when it was evaluated.
    """

    iteration: int
    samples_seen: int
    batch_size: int
    rho: float
    delta_hat: float
    delta_hat_eps: float
    t: float
    eta: float
    fallback: bool
    grad_norm_avg: float
    p_current: float
    angle_stat: float
    hessian_stat: float
    loss: float | None = None

    @property
    def safe(self) -> bool:
        """True when an adaptive step stays inside 1 / delta_hat_eps."""

        if self.fallback or math.isnan(self.delta_hat_eps):
            return True
        return self.t * self.delta_hat_eps < 1.0
