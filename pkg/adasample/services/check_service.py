"""Compare the analytic oracles against central finite differences."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..core.settings import AppSettings, get_settings
from ..core.startup import CHECK_STREAM, make_rng
from ..data.dataset import SparseDataset
from ..model.logistic import ModelState, default_lambda, grad, hvp
from ..model.oracles import finite_difference_grad, finite_difference_hvp, relative_error

__all__ = ["CheckReport", "CheckService", "corrupted_grad"]

logger = logging.getLogger(__name__)

_SUBSET_SIZE = 64


def corrupted_grad(state: ModelState, data: SparseDataset, subset=None) -> np.ndarray:
    """Gradient scaled by 1.001, for exercising the failure path."""

    return 1.001 * grad(state, data, subset)


@dataclass(slots=True)
class CheckReport:
    grad_error: float
    hvp_error: float
    states: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.grad_error <= self.tolerance and self.hvp_error <= self.tolerance


class CheckService:
    """Run the gradient and Hessian-vector checks over random states."""

    def __init__(self, settings: AppSettings | None = None) -> None:
        self.settings = settings or get_settings()

    def run(
        self,
        data: SparseDataset,
        *,
        lam: float | None = None,
        states: int | None = None,
        seed: int = 0,
        tolerance: float | None = None,
        corrupt_gradient: bool = False,
    ) -> CheckReport:
        """Return the worst relative errors; the first state is x = 0.

        Even-numbered states use the full dataset, odd ones a random subset.
        """

        lam = default_lambda(data) if lam is None else lam
        count = states or self.settings.check_states
        tolerance = tolerance or self.settings.check_tolerance
        gradient = corrupted_grad if corrupt_gradient else grad
        rng = make_rng(seed, CHECK_STREAM)
        scale = 1.0 / np.sqrt(data.n_features)

        worst_grad = 0.0
        worst_hvp = 0.0
        for index in range(count):
            x = np.zeros(data.n_features) if index == 0 else rng.normal(scale=scale, size=data.n_features)
            state = ModelState(x, lam)
            subset = None
            if index % 2 == 1:
                subset = rng.integers(0, data.n_samples, size=min(_SUBSET_SIZE, data.n_samples))
            v = rng.standard_normal(data.n_features)

            grad_error = relative_error(
                gradient(state, data, subset), finite_difference_grad(state, data, subset)
            )
            hvp_error = relative_error(
                hvp(state, data, subset, v),
                finite_difference_hvp(state, data, subset, v, gradient=gradient),
            )
            logger.debug("state %d: grad %.3e hvp %.3e", index, grad_error, hvp_error)
            worst_grad = max(worst_grad, grad_error)
            worst_hvp = max(worst_hvp, hvp_error)

        report = CheckReport(worst_grad, worst_hvp, count, tolerance)
        logger.info(
            "Oracle check over %d states: grad %.3e, hvp %.3e (%s)",
            count,
            worst_grad,
            worst_hvp,
            "pass" if report.passed else "FAIL",
        )
        return report
