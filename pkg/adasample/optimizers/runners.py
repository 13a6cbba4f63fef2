"""Entry points of the optimizer variants."""

from __future__ import annotations

import numpy as np
from pydantic import ValidationError

from ..data.dataset import SparseDataset
from ..errors import ConfigError
from ..schemas.config import ADAPTIVE_VARIANTS, OptimizerConfig
from .engine import run_loop
from .records import RunLog

__all__ = [
    "run_ada_sgd",
    "run_ada_adam",
    "run_ada_momentum",
    "run_baseline",
    "run_milestone_mode",
    "run_optimizer",
]


def _require(config: OptimizerConfig, *variants: str) -> None:
    if config.variant not in variants:
        raise ConfigError(f"expected variant {' or '.join(variants)}, got {config.variant}")


def _per_iteration(config: OptimizerConfig) -> None:
    if config.mode != "per_iteration":
        raise ConfigError("use run_milestone_mode for milestone configs")


def run_ada_sgd(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    """Adaptive sampling with steps along -g_k."""

    _require(config, "ada_sgd")
    _per_iteration(config)
    return run_loop(config, data, initial_x)


def run_ada_adam(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    """Adaptive sampling with steps along the bias-corrected ADAM direction."""

    _require(config, "ada_adam")
    _per_iteration(config)
    return run_loop(config, data, initial_x)


def run_ada_momentum(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    _require(config, "ada_momentum")
    _per_iteration(config)
    return run_loop(config, data, initial_x)


def run_baseline(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    """Fixed-step SGD, with the batch grown by the norm or inner-product tests."""

    _require(config, "sgd_fixed", "sgd_norm", "sgd_inner", "sgd_augmented")
    return run_loop(config, data, initial_x)


def run_milestone_mode(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    """Fixed batch; the rate is re-estimated only at the configured milestones."""

    _require(config, *sorted(ADAPTIVE_VARIANTS))
    if config.mode != "milestone":
        try:
            config = OptimizerConfig.model_validate({**config.model_dump(), "mode": "milestone"})
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc
    return run_loop(config, data, initial_x)


_RUNNERS = {
    "ada_sgd": run_ada_sgd,
    "ada_adam": run_ada_adam,
    "ada_momentum": run_ada_momentum,
}


def run_optimizer(
    config: OptimizerConfig, data: SparseDataset, initial_x: np.ndarray | None = None
) -> RunLog:
    """Dispatch ``config`` to its variant's runner."""

    if config.mode == "milestone":
        return run_milestone_mode(config, data, initial_x)
    runner = _RUNNERS.get(config.variant, run_baseline)
    return runner(config, data, initial_x)
