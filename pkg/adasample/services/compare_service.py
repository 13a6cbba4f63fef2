"""Paired comparison runs and hyperparameter sweeps on one dataset."""

from __future__ import annotations

import itertools
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from pydantic import ValidationError

from ..core.settings import AppSettings, get_settings
from ..data.dataset import SparseDataset
from ..errors import ConfigError
from ..optimizers.records import RunLog
from ..optimizers.runners import run_optimizer
from ..schemas.config import ADAPTIVE_VARIANTS, OptimizerConfig, normalize_variant
from ..schemas.metrics import RunSummary, write_metrics_csv, write_summary_csv
from .experiment_service import summarize

__all__ = ["VariantSpec", "parse_variant_token", "CompareService"]

logger = logging.getLogger(__name__)

MEDIAN_TOKEN = "median"


@dataclass(frozen=True, slots=True)
class VariantSpec:
    """One entry of a comparison: ``NAME``, ``NAME@LR`` or ``NAME@median``."""

    token: str
    variant: str
    lr: float | None = None
    lr_from_median: bool = False

    @property
    def file_stem(self) -> str:
        return re.sub(r"[^A-Za-z0-9_.-]+", "-", self.token)


def parse_variant_token(token: str) -> VariantSpec:
    name, sep, rate = token.strip().partition("@")
    variant = normalize_variant(name)
    if not variant:
        raise ConfigError(f"empty variant name in {token!r}")
    if not sep:
        return VariantSpec(token=token, variant=variant)
    if variant in ADAPTIVE_VARIANTS:
        raise ConfigError(f"{token!r}: adaptive variants choose their own step size")
    if rate.strip().lower() == MEDIAN_TOKEN:
        return VariantSpec(token=token, variant=variant, lr_from_median=True)
    try:
        lr = float(rate)
    except ValueError as exc:
        raise ConfigError(f"{token!r}: learning rate must be a number or 'median'") from exc
    if not (math.isfinite(lr) and lr >= 0):
        raise ConfigError(f"{token!r}: learning rate must be finite and non-negative")
    return VariantSpec(token=token, variant=variant, lr=lr)


def _configure(base: OptimizerConfig, updates: dict[str, Any]) -> OptimizerConfig:
    try:
        return OptimizerConfig.model_validate({**base.model_dump(), **updates})
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def _run_config(config: OptimizerConfig, data: SparseDataset) -> RunLog:
    return run_optimizer(config, data)


class CompareService:
    """Run several configurations with paired seeds and tabulate the results."""

    def __init__(self, settings: AppSettings | None = None) -> None:
        self.settings = settings or get_settings()

    def _run_all(self, configs: Sequence[OptimizerConfig], data: SparseDataset) -> list[RunLog]:
        workers = min(self.settings.workers, len(configs))
        if workers <= 1:
            return [_run_config(config, data) for config in configs]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_config, configs, itertools.repeat(data)))

    def _persist(
        self, out_dir: Path, stems: Sequence[str], logs: Sequence[RunLog]
    ) -> list[RunSummary]:
        rows = []
        for index, (stem, log) in enumerate(zip(stems, logs)):
            path = out_dir / f"{index:02d}-{stem}.csv"
            write_metrics_csv(path, log.records, self.settings.float_digits)
            rows.append(summarize(stem, log, path))
        return rows

    def compare(
        self,
        base: OptimizerConfig,
        data: SparseDataset,
        tokens: Sequence[str],
        out_dir: str | Path,
    ) -> list[RunSummary]:
        """Run every token on ``data`` with the seed of ``base``.

        Runs with a concrete configuration go first (in parallel when
        workers > 1); ``NAME@median`` runs follow, using the median step of
        the first adaptive run in the list.
        """

        if not tokens:
            raise ConfigError("compare needs at least one variant")
        specs = [parse_variant_token(token) for token in tokens]
        target = self._output_dir(out_dir)

        direct: dict[int, OptimizerConfig] = {}
        for index, spec in enumerate(specs):
            if spec.lr_from_median:
                continue
            updates: dict[str, Any] = {"variant": spec.variant}
            if spec.lr is not None:
                updates["fixed_lr"] = spec.lr
            direct[index] = _configure(base, updates)
        logs: dict[int, RunLog] = dict(zip(direct, self._run_all(list(direct.values()), data)))

        pending = [index for index, spec in enumerate(specs) if spec.lr_from_median]
        if pending:
            adaptive = [i for i in sorted(logs) if logs[i].config.is_adaptive]
            if not adaptive:
                raise ConfigError("'@median' needs an adaptive variant in the same comparison")
            median = logs[adaptive[0]].median_step()
            if not math.isfinite(median):
                raise ConfigError("the adaptive run produced no adaptive steps to take a median of")
            logger.info("Median adaptive step of %s is %.6g", specs[adaptive[0]].token, median)
            configs = [_configure(base, {"variant": specs[i].variant, "fixed_lr": median}) for i in pending]
            logs.update(zip(pending, self._run_all(configs, data)))

        ordered = [logs[index] for index in range(len(specs))]
        rows = self._persist(target, [spec.file_stem for spec in specs], ordered)
        write_summary_csv(target / "summary.csv", rows, self.settings.float_digits)
        return rows

    def sweep(
        self,
        base: OptimizerConfig,
        data: SparseDataset,
        out_dir: str | Path,
        *,
        p_values: Sequence[float],
        nu_values: Sequence[float],
        eps_values: Sequence[float],
    ) -> list[RunSummary]:
        """Grid over (p, nu, eps) for one adaptive variant, sorted by final loss."""

        if not base.is_adaptive:
            raise ConfigError("sweeps tune the adaptive variants only")
        grid = list(itertools.product(p_values, nu_values, eps_values))
        if not grid:
            raise ConfigError("sweep grid is empty")
        configs = [_configure(base, {"p0": p, "nu": nu, "eps": eps}) for p, nu, eps in grid]
        stems = [f"p{p:g}_nu{nu:g}_eps{eps:g}" for p, nu, eps in grid]
        target = self._output_dir(out_dir)
        rows = self._persist(target, stems, self._run_all(configs, data))
        rows.sort(key=lambda row: (math.isnan(row.final_loss), row.final_loss))
        write_summary_csv(target / "summary.csv", rows, self.settings.float_digits)
        return rows

    def _output_dir(self, out_dir: str | Path) -> Path:
        target = Path(out_dir)
        if not target.is_absolute():
            target = Path(self.settings.output_dir) / target
        target.mkdir(parents=True, exist_ok=True)
        return target
