from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ..errors import ConfigError

__all__ = [
    "Variant",
    "ADAPTIVE_VARIANTS",
    "BASELINE_TESTS",
    "OptimizerConfig",
    "TrainRequest",
    "load_config_file",
    "build_train_request",
]

Variant = Literal[
    "ada_sgd",
    "ada_adam",
    "ada_momentum",
    "sgd_fixed",
    "sgd_norm",
    "sgd_inner",
    "sgd_augmented",
]

ADAPTIVE_VARIANTS = frozenset({"ada_sgd", "ada_adam", "ada_momentum"})

# Batch test driving each baseline that grows its batch.
BASELINE_TESTS = {
    "sgd_norm": "norm",
    "sgd_inner": "inner_product",
    "sgd_augmented": "augmented",
}


def normalize_variant(value: Any) -> Any:
    if isinstance(value, str):
        return value.strip().lower().replace("-", "_")
    return value


class OptimizerConfig(BaseModel):
    """Hyperparameters of one optimizer run."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    variant: Variant = "ada_sgd"
    p0: float = Field(default=0.1, gt=0, lt=1, validation_alias=AliasChoices("p0", "p"))
    nu: float = Field(default=0.1, gt=0, lt=1)
    eps: float = Field(default=0.01, gt=0, lt=1)
    init_batch: int = Field(default=16, ge=1)
    max_iters: int = Field(default=100, ge=0)
    fixed_lr: float | None = Field(default=None, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps_prime: float = Field(default=1e-8, gt=0)
    beta_avg: float = Field(default=0.9, ge=0, lt=1)
    seed: int = 0
    p_schedule: Literal["geometric", "inverse_square"] = "geometric"
    p_decay_factor: float = Field(default=0.9, gt=0, le=1)
    p_decay_every: int = Field(default=10, ge=1)
    K_fallback: int = Field(default=20, ge=1, validation_alias=AliasChoices("K_fallback", "k_fallback"))
    mode: Literal["per_iteration", "milestone"] = "per_iteration"
    milestones: list[int] = Field(default_factory=list)
    probe_iters: int = Field(default=20, ge=1)
    adaptive_batch: bool = True
    full_batch: bool = False
    rho_source: Literal["running_average", "exact"] = "running_average"
    theta: float | None = Field(default=None, gt=0)
    max_batch: int | None = Field(default=None, ge=1)
    tolerance: float = Field(default=1e-8, ge=0)
    t_bootstrap: float = Field(default=1e-3, gt=0)
    eval_every: int = Field(default=10, ge=0)
    lam: float | None = Field(default=None, ge=0, validation_alias=AliasChoices("lam", "lambda"))

    @field_validator("variant", "mode", "p_schedule", "rho_source", mode="before")
    @classmethod
    def _normalize_names(cls, value: Any) -> Any:
        return normalize_variant(value)

    @field_validator("lam", mode="before")
    @classmethod
    def _auto_lambda(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() == "auto":
            return None
        return value

    @field_validator("milestones", mode="before")
    @classmethod
    def _split_milestones(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(part) for part in value.split(",") if part.strip()]
        return value

    @field_validator("milestones")
    @classmethod
    def _sorted_milestones(cls, value: list[int]) -> list[int]:
        if any(m < 0 for m in value):
            raise ValueError("milestones must be non-negative iterations")
        return sorted(set(value))

    @model_validator(mode="after")
    def _check_variant_requirements(self) -> "OptimizerConfig":
        if self.variant == "sgd_fixed" and self.fixed_lr is None:
            raise ValueError("sgd_fixed requires fixed_lr")
        if self.mode == "milestone":
            if not self.is_adaptive:
                raise ValueError("milestone mode needs an adaptive variant")
            if (not self.milestones or self.milestones[0] > 0) and self.fixed_lr is None:
                raise ValueError("milestone mode needs fixed_lr before the first milestone")
        if self.grows_batch and not self.full_batch and self.init_batch < 2:
            raise ValueError("batch tests need init_batch >= 2")
        if self.max_batch is not None and self.max_batch < self.init_batch:
            raise ValueError("max_batch must be >= init_batch")
        return self

    @property
    def is_adaptive(self) -> bool:
        return self.variant in ADAPTIVE_VARIANTS

    @property
    def batch_test(self) -> str | None:
        """Test that grows the batch, or None when the batch size is fixed."""

        if self.full_batch or self.mode == "milestone":
            return None
        if self.is_adaptive:
            return "acute_angle" if self.adaptive_batch else None
        return BASELINE_TESTS.get(self.variant)

    @property
    def grows_batch(self) -> bool:
        return self.batch_test is not None

    @property
    def baseline_lr(self) -> float:
        return 1.0 if self.fixed_lr is None else self.fixed_lr


class TrainRequest(BaseModel):
    """A training run: data source, output target and optimizer settings."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    data: str | None = None
    synthetic: str | None = None
    data_seed: int | None = None
    n_features: int | None = Field(default=None, ge=1)
    out: str | None = None
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)

    @field_validator("synthetic")
    @classmethod
    def _synthetic_spec(cls, value: str | None) -> str | None:
        if value is None:
            return value
        parts = value.split(",")
        if len(parts) != 3:
            raise ValueError("synthetic must be N,D,SEP")
        int(parts[0])
        int(parts[1])
        float(parts[2])
        return value

    @model_validator(mode="after")
    def _one_source(self) -> "TrainRequest":
        if (self.data is None) == (self.synthetic is None):
            raise ValueError("exactly one of data or synthetic is required")
        return self

    def synthetic_shape(self) -> tuple[int, int, float]:
        n, d, sep = (self.synthetic or "").split(",")
        return int(n), int(d), float(sep)


_REQUEST_KEYS = {"data", "synthetic", "data_seed", "n_features", "out"}
_ALIASES = {"optimizer": "variant", "p": "p0", "lambda": "lam", "k_fallback": "K_fallback"}


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON config whose keys are CLI flag names with underscores."""

    file_path = Path(path)
    try:
        payload = json.loads(file_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {file_path} does not exist") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {file_path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a JSON object")
    return {str(key).replace("-", "_"): value for key, value in payload.items()}


def build_train_request(
    file_values: dict[str, Any] | None, overrides: dict[str, Any]
) -> TrainRequest:
    """Merge config-file values with CLI overrides (None means not given)."""

    merged: dict[str, Any] = dict(file_values or {})
    given = {key: value for key, value in overrides.items() if value is not None}
    # a data source on the command line replaces the file's source
    if "data" in given or "synthetic" in given:
        merged.pop("data", None)
        merged.pop("synthetic", None)
    merged.update(given)
    request_fields: dict[str, Any] = {}
    optimizer_fields: dict[str, Any] = {}
    for key, value in merged.items():
        if key in _REQUEST_KEYS:
            request_fields[key] = value
        else:
            optimizer_fields[_ALIASES.get(key, key)] = value
    try:
        return TrainRequest(**request_fields, optimizer=OptimizerConfig(**optimizer_fields))
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from exc


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "config"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)
