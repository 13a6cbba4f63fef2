"""Failure-probability schedules and the success probabilities they imply."""

from __future__ import annotations

from typing import Iterable, Literal

import numpy as np

from ..errors import SamplingError

__all__ = [
    "PSchedule",
    "p_at",
    "cumulative_success_probability",
    "inverse_square_product",
    "inverse_square_closed_form",
]

PSchedule = Literal["geometric", "inverse_square"]


def p_at(
    p0: float,
    iteration: int,
    schedule: PSchedule = "geometric",
    *,
    factor: float = 0.9,
    every: int = 10,
) -> float:
    """Return the test failure probability used at ``iteration``.

    ``geometric`` multiplies p0 by ``factor`` once every ``every`` iterations;
    ``inverse_square`` is p0 / (k + 1)^2.
    """

    if iteration < 0:
        raise SamplingError(f"iteration must be >= 0, got {iteration}")
    if schedule == "geometric":
        if every < 1:
            raise SamplingError("decay interval must be a positive integer")
        return float(p0 * factor ** (iteration // every))
    if schedule == "inverse_square":
        return float(p0 / (iteration + 1) ** 2)
    raise SamplingError(f"unknown p schedule {schedule!r}")


def cumulative_success_probability(p_values: Iterable[float]) -> float:
    """Probability that both tests hold at every listed iteration, prod (1 - p_k)^2."""

    values = np.fromiter(p_values, dtype=np.float64)
    if values.size and (values.min() < 0 or values.max() > 1):
        raise SamplingError("probabilities must lie in [0, 1]")
    return float(np.prod(1.0 - values) ** 2)


def inverse_square_product(n_iterations: int) -> float:
    """prod_{k=1}^{N-1} (1 - 1/(k+1)^2)^2 evaluated term by term."""

    if n_iterations < 1:
        raise SamplingError("the product needs N >= 1")
    return cumulative_success_probability(
        p_at(1.0, k, "inverse_square") for k in range(1, n_iterations)
    )


def inverse_square_closed_form(n_iterations: int) -> float:
    """((N + 1) / (2N))^2, tending to 1/4."""

    if n_iterations < 1:
        raise SamplingError("the product needs N >= 1")
    return ((n_iterations + 1) / (2.0 * n_iterations)) ** 2
