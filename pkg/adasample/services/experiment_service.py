"""Run single experiments: load data, train, persist the metrics CSV."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from ..core.settings import AppSettings, get_settings
from ..data.dataset import SparseDataset
from ..data.libsvm import load_libsvm
from ..data.synthetic import synthetic_logistic
from ..optimizers.engine import resolve_lambda
from ..optimizers.records import RunLog
from ..optimizers.runners import run_optimizer
from ..schemas.config import OptimizerConfig, TrainRequest
from ..schemas.metrics import RunSummary, write_metrics_csv

__all__ = ["TrainResult", "ExperimentService", "run_header", "summarize"]

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class TrainResult:
    log: RunLog
    header: str
    csv_path: Path | None
    rows: int


def run_header(config: OptimizerConfig, data: SparseDataset, lam: float) -> str:
    """The ``#`` comment line describing a run."""

    return (
        f"# variant={config.variant} seed={config.seed} lambda={float(lam)!r} "
        f"N={data.n_samples} n_features={data.n_features} mode={config.mode}"
    )


def summarize(name: str, log: RunLog, csv_path: Path | str | None = None) -> RunSummary:
    return RunSummary(
        name=name,
        variant=log.config.variant,
        seed=log.config.seed,
        iterations=log.iterations,
        status=log.status,
        final_loss=log.final_loss,
        total_samples=log.total_samples,
        final_batch=log.batch_sizes[-1] if log.records else 0,
        median_step=log.median_step(adaptive_only=log.config.is_adaptive),
        csv_path="" if csv_path is None else str(csv_path),
    )


class ExperimentService:
    """Train one configuration and write its per-iteration metrics."""

    def __init__(self, settings: AppSettings | None = None) -> None:
        """Keep the process settings used for output paths and number format."""

        self.settings = settings or get_settings()

    def load_dataset(self, request: TrainRequest) -> SparseDataset:
        """Read the LIBSVM file or build the synthetic problem of ``request``.

        ``request.n_features`` widens the feature space; a value below the
        largest feature index raises ``FeatureWidthError``.
        """

        if request.synthetic is not None:
            n, d, separation = request.synthetic_shape()
            seed = request.optimizer.seed if request.data_seed is None else request.data_seed
            data = synthetic_logistic(n, d, separation, seed)
            if request.n_features is None:
                return data
            return data.with_n_features(request.n_features)
        return load_libsvm(request.data or "", n_features=request.n_features)

    def resolve_output(self, path: str | Path) -> Path:
        target = Path(path)
        if not target.is_absolute():
            target = Path(self.settings.output_dir) / target
        return target

    def train(self, request: TrainRequest, data: SparseDataset | None = None) -> TrainResult:
        if data is None:
            data = self.load_dataset(request)
        config = request.optimizer
        lam = resolve_lambda(config, data)
        header = run_header(config, data, lam)
        log = run_optimizer(config, data)
        csv_path = None
        rows = 0
        if request.out:
            csv_path = self.resolve_output(request.out)
            rows = write_metrics_csv(csv_path, log.records, self.settings.float_digits)
            logger.info("Wrote %d metric rows to %s", rows, csv_path)
        return TrainResult(log=log, header=header, csv_path=csv_path, rows=rows)
