"""Monte-Carlo check of the acute-angle test's probability guarantee.

A synthetic population with a known mean gradient g is sampled. The
smallest batch size whose expected sin^2 of the angle between the batch
mean and g is at most p nu^2 (the exact test) is found by doubling; fresh
batches of that size must then exceed sin^2 = nu^2 with frequency at most
p, up to a three-sigma binomial allowance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..core.startup import MONTECARLO_STREAM, make_rng
from ..errors import DegenerateGradientError, SamplingError

__all__ = ["MarkovReport", "synthetic_population", "sin_squared", "montecarlo_markov_suite"]

logger = logging.getLogger(__name__)

_CHUNK = 512
_MAX_BATCH = 1 << 20


@dataclass(frozen=True, slots=True)
class MarkovReport:
    trials: int
    p: float
    nu: float
    batch_size: int
    expected_sin2: float
    frequency: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.frequency <= self.bound


def synthetic_population(
    rng: np.random.Generator,
    size: int = 2000,
    dim: int = 5,
    noise: float = 0.3,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (per-sample gradients, their exact mean) with a unit-norm mean."""

    mean = rng.standard_normal(dim)
    mean /= np.linalg.norm(mean)
    spread = noise * rng.standard_normal((size, dim))
    spread -= spread.mean(axis=0)
    population = mean[None, :] + spread
    return population, population.mean(axis=0)


def sin_squared(batch_means: np.ndarray, g: np.ndarray) -> np.ndarray:
    """sin^2 of the angle between each row of ``batch_means`` and ``g``."""

    g_norm_sq = float(g @ g)
    along = batch_means @ g
    norms_sq = np.einsum("ij,ij->i", batch_means, batch_means)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_sq = along**2 / (norms_sq * g_norm_sq)
    return np.clip(np.nan_to_num(1.0 - cos_sq, nan=1.0), 0.0, 1.0)


def _draw_sin_squared(
    rng: np.random.Generator, population: np.ndarray, g: np.ndarray, batch: int, count: int
) -> np.ndarray:
    values = []
    remaining = count
    while remaining > 0:
        chunk = min(remaining, _CHUNK)
        indices = rng.integers(0, population.shape[0], size=(chunk, batch))
        values.append(sin_squared(population[indices].mean(axis=1), g))
        remaining -= chunk
    return np.concatenate(values) if values else np.empty(0)


def montecarlo_markov_suite(
    trials: int,
    p: float,
    nu: float,
    seed: int,
    *,
    population: np.ndarray | None = None,
    calibration_draws: int = 2000,
) -> MarkovReport:
    """Run the suite; pass iff frequency <= p + 3 sqrt(p (1 - p) / trials)."""

    if trials < 1:
        raise SamplingError("the Markov suite needs trials >= 1")
    if not (0 < p < 1 and 0 < nu < 1):
        raise SamplingError("p and nu must lie in (0, 1)")
    rng = make_rng(seed, MONTECARLO_STREAM)
    if population is None:
        population, g = synthetic_population(rng)
    else:
        population = np.atleast_2d(np.asarray(population, dtype=np.float64))
        g = population.mean(axis=0)
    if not np.linalg.norm(g) > 1e-12:
        raise DegenerateGradientError("population mean gradient vanishes")

    threshold = p * nu**2
    batch = 2
    expected = float(np.mean(_draw_sin_squared(rng, population, g, batch, calibration_draws)))
    while expected > threshold:
        batch *= 2
        if batch > _MAX_BATCH:
            raise SamplingError("no batch size up to 2^20 passes the exact test")
        expected = float(np.mean(_draw_sin_squared(rng, population, g, batch, calibration_draws)))

    samples = _draw_sin_squared(rng, population, g, batch, trials)
    frequency = float(np.mean(samples > nu**2))
    bound = p + 3.0 * math.sqrt(p * (1.0 - p) / trials)
    report = MarkovReport(
        trials=trials,
        p=p,
        nu=nu,
        batch_size=batch,
        expected_sin2=expected,
        frequency=frequency,
        bound=bound,
    )
    logger.info(
        "Markov suite: |S|=%d E[sin^2]=%.3e frequency %.4f bound %.4f (%s)",
        batch,
        expected,
        frequency,
        bound,
        "pass" if report.passed else "FAIL",
    )
    return report
