from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import sparse

os.environ.setdefault("ADASAMPLE_LOG_LEVEL", "WARNING")

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from adasample.core.settings import get_settings  # noqa: E402

get_settings.cache_clear()  # type: ignore

from adasample.data import SparseDataset, synthetic_logistic  # noqa: E402


@pytest.fixture
def tiny_dataset() -> SparseDataset:
    """Hand-written 5 x 3 problem with mixed signs and an empty row."""

    features = np.array(
        [
            [1.0, 0.0, 2.0],
            [0.0, -1.5, 0.5],
            [0.3, 0.7, 0.0],
            [0.0, 0.0, 0.0],
            [-2.0, 1.0, 1.0],
        ]
    )
    labels = np.array([1.0, -1.0, 1.0, -1.0, -1.0])
    return SparseDataset(sparse.csr_matrix(features), labels)


@pytest.fixture
def small_synthetic() -> SparseDataset:
    return synthetic_logistic(200, 5, 2.0, 3)


@pytest.fixture
def identical_rows() -> SparseDataset:
    """Ten copies of one sample: every per-sample quantity is the same."""

    features = np.tile(np.array([[1.0, 2.0]]), (10, 1))
    return SparseDataset(sparse.csr_matrix(features), np.ones(10))


@pytest.fixture
def zero_rows() -> SparseDataset:
    """All-zero features: with lambda > 0 the optimum is x = 0."""

    return SparseDataset(sparse.csr_matrix((20, 3)), np.tile([1.0, -1.0], 10))

