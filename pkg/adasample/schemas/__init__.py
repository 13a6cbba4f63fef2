"""Pydantic models for experiment configuration and metrics output."""

from .config import (
    ADAPTIVE_VARIANTS,
    OptimizerConfig,
    TrainRequest,
    Variant,
    build_train_request,
    load_config_file,
)
from .metrics import (
    METRICS_COLUMNS,
    SUMMARY_COLUMNS,
    MetricsRow,
    RunSummary,
    format_number,
    write_metrics,
    write_metrics_csv,
    write_summary_csv,
)

__all__ = [
    "ADAPTIVE_VARIANTS",
    "OptimizerConfig",
    "TrainRequest",
    "Variant",
    "build_train_request",
    "load_config_file",
    "METRICS_COLUMNS",
    "SUMMARY_COLUMNS",
    "MetricsRow",
    "RunSummary",
    "format_number",
    "write_metrics",
    "write_metrics_csv",
    "write_summary_csv",
]
