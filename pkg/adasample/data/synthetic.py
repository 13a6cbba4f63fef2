"""Seeded synthetic logistic-regression problems for tests and demos."""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse

from ..errors import DatasetError
from .dataset import SparseDataset

__all__ = ["synthetic_logistic"]

logger = logging.getLogger(__name__)


def synthetic_logistic(
    n_samples: int,
    n_features: int,
    separation: float,
    seed: int,
) -> SparseDataset:
    """Return a two-class Gaussian problem with a planted linear separator.

    Labels are balanced (both classes always present) and every feature row
    is ``z = y * (separation / 2) * w + noise`` for a random unit vector ``w``
    and standard normal noise, so the log-odds are linear in ``z`` with
    weight ``separation * w`` and the Bayes accuracy is Phi(separation / 2).
    """

    if n_samples < 2:
        raise DatasetError("synthetic problems need n_samples >= 2")
    if n_features < 1:
        raise DatasetError("synthetic problems need n_features >= 1")
    if not np.isfinite(separation) or separation < 0:
        raise DatasetError("separation must be a finite non-negative number")

    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(n_features)
    direction /= np.linalg.norm(direction)
    positives = (n_samples + 1) // 2
    labels = np.concatenate([np.ones(positives), -np.ones(n_samples - positives)])
    labels = rng.permutation(labels)
    noise = rng.standard_normal((n_samples, n_features))
    features = noise + (0.5 * separation) * labels[:, None] * direction[None, :]
    logger.debug(
        "Generated synthetic problem n=%d d=%d separation=%g seed=%d",
        n_samples,
        n_features,
        separation,
        seed,
    )
    return SparseDataset(sparse.csr_matrix(features), labels)
