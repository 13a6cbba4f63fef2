"""Batch controller: per-iteration resampling and the batch-size update."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..data.dataset import SparseDataset
from ..errors import DegenerateGradientError, SamplingError
from ..model.logistic import ModelState, per_sample_curvature, per_sample_grads
from .schedules import PSchedule, p_at
from .statistics import (
    acute_angle_statistic,
    augmented_inner_product_test_proposal,
    grad_size_proposal,
    hess_size_proposal,
    hessian_statistic,
    inner_product_test_proposal,
    norm_test_proposal,
)

__all__ = [
    "BatchTest",
    "BatchController",
    "TestReport",
    "resample",
    "update_batch",
    "update_running_average",
    "decay_p",
]

logger = logging.getLogger(__name__)

BatchTest = Literal["acute_angle", "norm", "inner_product", "augmented"]


@dataclass(slots=True)
class TestReport:
    """Outcome of one batch-size update."""

    __test__ = False

    angle_statistic: float
    angle_threshold: float
    hessian_statistic: float
    hessian_threshold: float
    proposed_grad_size: int
    proposed_hess_size: int
    passed: bool
    converged: bool = False
    test: BatchTest = "acute_angle"

    @property
    def proposed_size(self) -> int:
        return max(self.proposed_grad_size, self.proposed_hess_size)


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise SamplingError(f"{name} must lie in (0, 1), got {value}")


@dataclass(slots=True)
class BatchController:
    """Mutable sampling state of one run: S_k, p, nu, eps and g_avg."""

    current_indices: np.ndarray
    n_samples: int
    p: float
    nu: float
    eps: float
    max_batch: int
    beta_avg: float = 0.9
    p_decay_factor: float = 0.9
    p_decay_every: int = 10
    p_schedule: PSchedule = "geometric"
    theta: float | None = None
    g_avg: np.ndarray | None = None
    gamma: float = 0.0
    p0: float = field(init=False)

    def __post_init__(self) -> None:
        self.current_indices = np.asarray(self.current_indices, dtype=np.intp).ravel()
        for name in ("p", "nu", "eps"):
            _check_unit_interval(name, getattr(self, name))
        if not 0.0 <= self.beta_avg < 1.0:
            raise SamplingError(f"beta_avg must lie in [0, 1), got {self.beta_avg}")
        if not 0.0 < self.p_decay_factor <= 1.0:
            raise SamplingError("p_decay_factor must lie in (0, 1]")
        if self.p_decay_every < 1:
            raise SamplingError("p_decay_every must be a positive integer")
        if not 1 <= self.max_batch <= self.n_samples:
            raise SamplingError(
                f"max_batch must lie in [1, {self.n_samples}], got {self.max_batch}"
            )
        size = self.current_indices.size
        if not 1 <= size <= self.max_batch:
            raise SamplingError(f"batch size {size} outside [1, {self.max_batch}]")
        if self.current_indices.min() < 0 or self.current_indices.max() >= self.n_samples:
            raise SamplingError("batch indices out of range")
        if self.theta is not None and not self.theta > 0:
            raise SamplingError("theta must be positive")
        self.p0 = self.p

    @classmethod
    def create(
        cls,
        n_samples: int,
        init_batch: int,
        rng: np.random.Generator,
        *,
        p: float = 0.1,
        nu: float = 0.1,
        eps: float = 0.01,
        max_batch: int | None = None,
        **options,
    ) -> "BatchController":
        """Draw the initial batch uniformly with replacement."""

        limit = n_samples if max_batch is None else max_batch
        if not 1 <= init_batch <= limit:
            raise SamplingError(f"init_batch must lie in [1, {limit}], got {init_batch}")
        indices = _draw(rng, n_samples, init_batch)
        return cls(
            current_indices=indices,
            n_samples=n_samples,
            p=p,
            nu=nu,
            eps=eps,
            max_batch=limit,
            **options,
        )

    @property
    def batch_size(self) -> int:
        return int(self.current_indices.size)

    @property
    def threshold_theta(self) -> float:
        return self.nu if self.theta is None else self.theta


def _draw(rng: np.random.Generator, n_samples: int, count: int) -> np.ndarray:
    if not isinstance(rng, np.random.Generator):
        raise SamplingError(f"expected a numpy Generator, got {type(rng).__name__}")
    return rng.integers(0, n_samples, size=count, dtype=np.intp)


def resample(controller: BatchController, rng: np.random.Generator) -> np.ndarray:
    """Replace S_k by the same number of fresh i.i.d. draws."""

    controller.current_indices = _draw(rng, controller.n_samples, controller.batch_size)
    return controller.current_indices


def _converged_report(size: int, test: BatchTest, threshold: float) -> TestReport:
    return TestReport(
        angle_statistic=0.0,
        angle_threshold=threshold,
        hessian_statistic=0.0,
        hessian_threshold=0.0,
        proposed_grad_size=size,
        proposed_hess_size=size,
        passed=True,
        converged=True,
        test=test,
    )


def _acute_angle_report(
    controller: BatchController, state: ModelState, data: SparseDataset
) -> TestReport:
    indices = controller.current_indices
    size = indices.size
    grads = per_sample_grads(state, data, indices)
    g_k = grads.mean()
    reference = controller.g_avg if controller.g_avg is not None else g_k
    angle_threshold = controller.p * controller.nu**2
    try:
        angle_stat = acute_angle_statistic(grads, g_k, reference)
        grad_size = grad_size_proposal(
            grads, g_k, reference, controller.p, controller.nu, max_batch=controller.max_batch
        )
    except DegenerateGradientError as exc:
        logger.warning("Acute-angle test degenerate at |S|=%d: %s", size, exc)
        return _converged_report(size, "acute_angle", angle_threshold)

    curvatures = per_sample_curvature(state, data, indices, g_k)
    delta_hat_sq = float(curvatures.mean())
    try:
        hess_stat = hessian_statistic(curvatures, delta_hat_sq)
        hess_size = hess_size_proposal(
            curvatures, delta_hat_sq, controller.p, controller.eps, max_batch=controller.max_batch
        )
    except DegenerateGradientError as exc:
        # non-positive curvature is left to the step-size fallback
        logger.warning("Curvature test skipped: %s", exc)
        hess_stat, hess_size = 0.0, size

    hess_threshold = controller.p * controller.eps**2
    return TestReport(
        angle_statistic=angle_stat,
        angle_threshold=angle_threshold,
        hessian_statistic=hess_stat,
        hessian_threshold=hess_threshold,
        proposed_grad_size=grad_size,
        proposed_hess_size=hess_size,
        passed=angle_stat <= angle_threshold and hess_stat <= hess_threshold,
    )


def _baseline_report(
    controller: BatchController, state: ModelState, data: SparseDataset, test: BatchTest
) -> TestReport:
    size = controller.batch_size
    theta = controller.threshold_theta
    grads = per_sample_grads(state, data, controller.current_indices)
    g_k = grads.mean()
    try:
        if test == "norm":
            statistic, proposal = norm_test_proposal(
                grads, g_k, theta, max_batch=controller.max_batch
            )
        elif test == "inner_product":
            statistic, proposal = inner_product_test_proposal(
                grads, g_k, theta, max_batch=controller.max_batch
            )
        else:
            statistic, proposal = augmented_inner_product_test_proposal(
                grads, g_k, theta, nu=controller.nu, max_batch=controller.max_batch
            )
    except DegenerateGradientError as exc:
        logger.warning("%s test degenerate at |S|=%d: %s", test, size, exc)
        return _converged_report(size, test, theta**2)
    return TestReport(
        angle_statistic=statistic,
        angle_threshold=theta**2,
        hessian_statistic=0.0,
        hessian_threshold=0.0,
        proposed_grad_size=proposal,
        proposed_hess_size=size,
        passed=statistic <= theta**2,
        test=test,
    )


def update_batch(
    controller: BatchController,
    state: ModelState,
    data: SparseDataset,
    rng: np.random.Generator,
    *,
    test: BatchTest = "acute_angle",
) -> tuple[np.ndarray, TestReport]:
    """Run the batch tests at x_k on S_k and grow S_k to N_{k+1} if needed.

    New indices are drawn uniformly with replacement and appended; the set
    never shrinks and g_avg is left untouched.
    """

    if controller.batch_size < 2:
        raise SamplingError("batch tests need |S_k| >= 2")
    if test == "acute_angle":
        report = _acute_angle_report(controller, state, data)
    elif test in ("norm", "inner_product", "augmented"):
        report = _baseline_report(controller, state, data, test)
    else:
        raise SamplingError(f"unknown batch test {test!r}")

    current = controller.batch_size
    target = report.proposed_size
    if target > current:
        extra = _draw(rng, controller.n_samples, target - current)
        controller.current_indices = np.concatenate([controller.current_indices, extra])
        logger.debug("Batch grows %d -> %d (%s test)", current, target, report.test)
    return controller.current_indices, report


def update_running_average(controller: BatchController, g_k: np.ndarray) -> np.ndarray:
    """g_avg <- beta g_avg + (1 - beta) g_k, starting from the first g_k."""

    g_k = np.asarray(g_k, dtype=np.float64)
    if controller.g_avg is None:
        controller.g_avg = g_k.copy()
    else:
        beta = controller.beta_avg
        controller.g_avg = beta * controller.g_avg + (1.0 - beta) * g_k
    controller.gamma = max(controller.gamma, float(np.linalg.norm(controller.g_avg)))
    return controller.g_avg


def decay_p(controller: BatchController, iteration: int) -> float:
    """Set p to its scheduled value for ``iteration`` and return it."""

    controller.p = p_at(
        controller.p0,
        iteration,
        controller.p_schedule,
        factor=controller.p_decay_factor,
        every=controller.p_decay_every,
    )
    return controller.p
