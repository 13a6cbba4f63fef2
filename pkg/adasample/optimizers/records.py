from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..model.logistic import ModelState
from ..schemas.config import OptimizerConfig
from ..stepsize.records import StepRecord

__all__ = ["RunStatus", "RunLog"]

RunStatus = Literal["max_iters", "converged"]


@dataclass(slots=True)
class RunLog:
    """Result of one optimizer run."""

    config: OptimizerConfig
    lam: float
    records: list[StepRecord]
    final_state: ModelState
    final_loss: float
    status: RunStatus = "max_iters"
    # (iteration from which the rate applies, frozen rate)
    frozen_lrs: list[tuple[int, float]] = field(default_factory=list)
    # largest ||g_avg|| seen during the run
    gamma: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def total_samples(self) -> int:
        return self.records[-1].samples_seen if self.records else 0

    @property
    def batch_sizes(self) -> list[int]:
        return [record.batch_size for record in self.records]

    def median_step(self, *, adaptive_only: bool = True) -> float:
        """Median step size, over non-fallback steps when ``adaptive_only``."""

        steps = [
            record.t
            for record in self.records
            if not (adaptive_only and record.fallback)
        ]
        if not steps:
            return math.nan
        return float(np.median(steps))
