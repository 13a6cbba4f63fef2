from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from pydantic import BaseModel

from ..stepsize.records import StepRecord

__all__ = [
    "MetricsRow",
    "RunSummary",
    "METRICS_COLUMNS",
    "SUMMARY_COLUMNS",
    "format_number",
    "write_metrics",
    "write_metrics_csv",
    "write_summary_csv",
]


def format_number(value: float | int | bool | None, digits: int = 17) -> str:
    """Integers as is, floats with ``digits`` significant digits, None as blank."""

    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.{digits}g}"


class MetricsRow(BaseModel):
    """One CSV row per optimizer iteration; the column order is fixed."""

    iter: int
    samples_seen: int
    batch_size: int
    loss: float | None = None
    grad_norm_avg: float
    rho: float
    delta_hat: float
    eta: float
    step_size: float
    fallback: int
    p_current: float
    angle_stat: float
    hessian_stat: float

    @classmethod
    def from_record(cls, record: StepRecord) -> "MetricsRow":
        return cls(
            iter=record.iteration,
            samples_seen=record.samples_seen,
            batch_size=record.batch_size,
            loss=record.loss,
            grad_norm_avg=record.grad_norm_avg,
            rho=record.rho,
            delta_hat=record.delta_hat,
            eta=record.eta,
            step_size=record.t,
            fallback=int(record.fallback),
            p_current=record.p_current,
            angle_stat=record.angle_stat,
            hessian_stat=record.hessian_stat,
        )

    def cells(self, digits: int = 17) -> list[str]:
        return [format_number(getattr(self, name), digits) for name in METRICS_COLUMNS]


METRICS_COLUMNS: tuple[str, ...] = tuple(MetricsRow.model_fields)


class RunSummary(BaseModel):
    """One line of a comparison or sweep summary table."""

    name: str
    variant: str
    seed: int
    iterations: int
    status: str
    final_loss: float
    total_samples: int
    final_batch: int
    median_step: float
    csv_path: str = ""


SUMMARY_COLUMNS: tuple[str, ...] = tuple(RunSummary.model_fields)


def write_metrics(stream: TextIO, records: Iterable[StepRecord], digits: int = 17) -> int:
    """Write the header and one row per record; return the number of rows."""

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    count = 0
    for record in records:
        writer.writerow(MetricsRow.from_record(record).cells(digits))
        count += 1
    return count


def write_metrics_csv(path: str | Path, records: Iterable[StepRecord], digits: int = 17) -> int:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        return write_metrics(handle, records, digits)


def write_summary_csv(path: str | Path, rows: Sequence[RunSummary], digits: int = 17) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    value if isinstance(value, str) else format_number(value, digits)
                    for value in (getattr(row, name) for name in SUMMARY_COLUMNS)
                ]
            )
