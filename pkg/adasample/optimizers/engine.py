"""The iteration loop shared by every optimizer variant.

Per iteration k the loop sets p_k, draws a fresh batch of the current size,
runs the batch test at x_k and grows the batch, evaluates g_k on the final
batch, updates g_avg, checks the stopping rule, turns g_k into a direction
and takes either an adaptive or a fixed step along it.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..core.startup import SAMPLING_STREAM, make_rng
from ..data.dataset import SparseDataset
from ..errors import ConfigError, ModelError
from ..model.logistic import ModelState, default_lambda, grad, loss, loss_and_grad
from ..sampling.controller import (
    BatchController,
    TestReport,
    decay_p,
    resample,
    update_batch,
    update_running_average,
)
from ..schemas.config import OptimizerConfig
from ..stepsize.adaptive import FallbackBuffer, adaptive_step, curvature_along, inflate_curvature
from ..stepsize.records import StepRecord
from .directions import Direction, make_direction
from .records import RunLog, RunStatus

__all__ = ["run_loop", "resolve_lambda", "initial_state"]

logger = logging.getLogger(__name__)


def resolve_lambda(config: OptimizerConfig, data: SparseDataset) -> float:
    return default_lambda(data) if config.lam is None else config.lam


def initial_state(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None
) -> ModelState:
    lam = resolve_lambda(config, data)
    if initial_x is None:
        return ModelState.zeros(data.n_features, lam)
    x = np.asarray(initial_x, dtype=np.float64).ravel()
    if x.shape[0] != data.n_features:
        raise ModelError(
            f"initial point has length {x.shape[0]}, dataset has {data.n_features} features"
        )
    return ModelState(x, lam)


def _controller(config: OptimizerConfig, data: SparseDataset, rng) -> BatchController:
    n = data.n_samples
    max_batch = n if config.max_batch is None else config.max_batch
    if max_batch > n:
        raise ConfigError(f"max_batch={max_batch} exceeds the {n} samples")
    options = dict(
        beta_avg=config.beta_avg,
        p_decay_factor=config.p_decay_factor,
        p_decay_every=config.p_decay_every,
        p_schedule=config.p_schedule,
        theta=config.theta,
    )
    if config.full_batch:
        return BatchController(
            current_indices=np.arange(n),
            n_samples=n,
            p=config.p0,
            nu=config.nu,
            eps=config.eps,
            max_batch=n,
            **options,
        )
    if config.init_batch > max_batch:
        raise ConfigError(f"init_batch={config.init_batch} exceeds max_batch={max_batch}")
    return BatchController.create(
        n,
        config.init_batch,
        rng,
        p=config.p0,
        nu=config.nu,
        eps=config.eps,
        max_batch=max_batch,
        **options,
    )


class _StepPolicy:
    """Chooses the step size, adaptive or frozen, for each iteration."""

    def __init__(self, config: OptimizerConfig) -> None:
        self.config = config
        self.buffer = FallbackBuffer(config.K_fallback)
        self.milestones = set(config.milestones) if config.mode == "milestone" else set()
        self.frozen_lrs: list[tuple[int, float]] = []
        self._probe_left = 0
        self._probed: list[float] = []
        if not config.is_adaptive:
            self._fixed_lr: float | None = config.baseline_lr
        elif config.mode == "milestone":
            self._fixed_lr = config.fixed_lr
        else:
            self._fixed_lr = None

    def adaptive_now(self, iteration: int) -> bool:
        if iteration in self.milestones:
            self._probe_left = self.config.probe_iters
            self._probed = []
        return self._fixed_lr is None or self._probe_left > 0

    @property
    def fixed_lr(self) -> float:
        assert self._fixed_lr is not None
        return self._fixed_lr

    def after_adaptive(self, iteration: int, step: float) -> None:
        if not self.milestones:
            return
        self._probed.append(step)
        self._probe_left -= 1
        if self._probe_left == 0 or (iteration + 1) in self.milestones:
            self._probe_left = 0
            self._fixed_lr = float(np.median(self._probed))
            self.frozen_lrs.append((iteration + 1, self._fixed_lr))
            logger.info(
                "Froze learning rate %.6g from %d probe steps at iteration %d",
                self._fixed_lr,
                len(self._probed),
                iteration + 1,
            )


def run_loop(
    config: OptimizerConfig,
    data: SparseDataset,
    initial_x: np.ndarray | None = None,
    *,
    direction: Direction | None = None,
) -> RunLog:
    """Run ``config`` on ``data`` and return the full log."""

    state = initial_state(config, data, initial_x)
    rng = make_rng(config.seed, SAMPLING_STREAM)
    controller = _controller(config, data, rng)
    if direction is None:
        direction = make_direction(
            config.variant,
            data.n_features,
            beta1=config.beta1,
            beta2=config.beta2,
            eps_prime=config.eps_prime,
        )
    policy = _StepPolicy(config)
    batch_test = config.batch_test
    records: list[StepRecord] = []
    status: RunStatus = "max_iters"
    samples_seen = 0

    logger.info(
        "Starting %s (%s) seed=%d lambda=%.6g N=%d d=%d",
        config.variant,
        "full batch" if config.full_batch else f"init batch {controller.batch_size}",
        config.seed,
        state.lam,
        data.n_samples,
        data.n_features,
    )

    for k in range(config.max_iters):
        p_current = decay_p(controller, k)
        report: TestReport | None = None
        if not config.full_batch:
            if k > 0:
                resample(controller, rng)
            if batch_test is not None:
                previous = controller.batch_size
                _, report = update_batch(controller, state, data, rng, test=batch_test)
                if report.converged:
                    status = "converged"
                    break
                if controller.batch_size > previous:
                    logger.info(
                        "Iteration %d: batch %d -> %d", k, previous, controller.batch_size
                    )

        subset = None if config.full_batch else controller.current_indices
        batch_loss, g_k = loss_and_grad(state, data, subset)
        samples_seen += controller.batch_size
        g_avg = update_running_average(controller, g_k)
        grad_norm_avg = float(np.linalg.norm(g_avg))
        if grad_norm_avg <= config.tolerance * (1.0 + abs(batch_loss)):
            status = "converged"
            break

        d = direction(g_k)
        if config.full_batch:
            reference = g_k
        elif config.rho_source == "exact":
            reference = grad(state, data, None)
        elif direction.rho_uses_sampled_gradient:
            reference = g_k
        else:
            reference = g_avg
        rho = -float(d @ reference)

        if policy.adaptive_now(k):
            delta_sq = curvature_along(state, data, subset, d)
            delta_hat = math.sqrt(delta_sq) if delta_sq > 0 else 0.0
            step, fallback = adaptive_step(
                rho, delta_hat, config.eps, policy.buffer, default_step=config.t_bootstrap
            )
            if fallback:
                logger.warning(
                    "Iteration %d: fallback step %.6g (rho=%.3e, delta_hat=%.3e)",
                    k,
                    step,
                    rho,
                    delta_hat,
                )
            delta_hat_eps = inflate_curvature(delta_hat, config.eps)
            eta = rho / delta_hat if delta_hat > 0 else math.nan
            policy.after_adaptive(k, step)
        else:
            step, fallback = policy.fixed_lr, False
            delta_hat = delta_hat_eps = eta = math.nan

        full_loss = None
        if config.eval_every and k % config.eval_every == 0:
            full_loss = batch_loss if config.full_batch else loss(state, data)

        records.append(
            StepRecord(
                iteration=k,
                samples_seen=samples_seen,
                batch_size=controller.batch_size,
                rho=rho,
                delta_hat=delta_hat,
                delta_hat_eps=delta_hat_eps,
                t=step,
                eta=eta,
                fallback=fallback,
                grad_norm_avg=grad_norm_avg,
                p_current=p_current,
                angle_stat=report.angle_statistic if report is not None else math.nan,
                hessian_stat=report.hessian_statistic if report is not None else math.nan,
                loss=full_loss,
            )
        )
        logger.debug(
            "k=%d |S|=%d rho=%.4e delta=%.4e t=%.4e", k, controller.batch_size, rho, delta_hat, step
        )
        state = state.moved(state.x + step * d)

    if controller.gamma * config.nu > 1.0:
        logger.warning(
            "nu=%.3g exceeds 1/gamma=%.3g; the high-probability rate does not apply",
            config.nu,
            1.0 / controller.gamma,
        )
    final_loss = loss(state, data)
    logger.info(
        "Finished %s after %d iterations (%s), final loss %.10g, gamma %.6g",
        config.variant,
        len(records),
        status,
        final_loss,
        controller.gamma,
    )
    return RunLog(
        config=config,
        lam=state.lam,
        records=records,
        final_state=state,
        final_loss=final_loss,
        status=status,
        frozen_lrs=policy.frozen_lrs,
        gamma=controller.gamma,
    )
