"""Immutable row-sparse dataset with ±1 labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from ..errors import DatasetError, FeatureWidthError

__all__ = ["SparseDataset", "Subset", "resolve_subset"]

# A subset is an index array (duplicates allowed) or None for every sample.
Subset = Sequence[int] | np.ndarray | None


@dataclass(frozen=True, slots=True, eq=False)
class SparseDataset:
    """Feature rows and labels of the empirical objective.

    Rows are held as a CSR matrix whose column ``j`` is LIBSVM feature
    ``j + 1``. Arrays are made read-only on construction.
    """

    features: sparse.csr_matrix
    labels: np.ndarray

    def __post_init__(self) -> None:
        features = sparse.csr_matrix(self.features, dtype=np.float64, copy=True)
        features.sort_indices()
        labels = np.array(self.labels, dtype=np.float64).ravel()
        if features.shape[0] != labels.shape[0]:
            raise DatasetError(
                f"{features.shape[0]} rows but {labels.shape[0]} labels"
            )
        if features.shape[0] < 1:
            raise DatasetError("dataset has no samples")
        if features.shape[1] < 1:
            raise DatasetError("dataset has no features")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise DatasetError("labels must be -1.0 or +1.0")
        if features.nnz and not np.all(np.isfinite(features.data)):
            raise DatasetError("feature values must be finite")
        for array in (features.data, features.indices, features.indptr, labels):
            array.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def nnz(self) -> int:
        return int(self.features.nnz)

    @property
    def rows(self) -> list[dict[int, float]]:
        """Return every row as a mapping of 1-based feature id to value."""

        return [self.row(i) for i in range(self.n_samples)]

    def row(self, i: int) -> dict[int, float]:
        start, end = self.features.indptr[i], self.features.indptr[i + 1]
        return {
            int(j) + 1: float(v)
            for j, v in zip(self.features.indices[start:end], self.features.data[start:end])
        }

    def take(self, subset: Subset) -> tuple[sparse.csr_matrix, np.ndarray]:
        """Return the feature rows and labels of ``subset`` (all rows for None)."""

        if subset is None:
            return self.features, self.labels
        indices = resolve_subset(self, subset)
        return self.features[indices], self.labels[indices]

    def with_n_features(self, n_features: int) -> "SparseDataset":
        """Widen the feature space, e.g. to align a train/test pair."""

        if n_features < self.n_features:
            raise FeatureWidthError(
                f"cannot shrink n_features from {self.n_features} to {n_features}"
            )
        if n_features == self.n_features:
            return self
        widened = sparse.csr_matrix(
            (self.features.data.copy(), self.features.indices.copy(), self.features.indptr.copy()),
            shape=(self.n_samples, n_features),
        )
        return SparseDataset(widened, self.labels.copy())

    def class_balance(self) -> tuple[int, int]:
        """Return the (negative, positive) sample counts."""

        positives = int(np.count_nonzero(self.labels > 0))
        return self.n_samples - positives, positives

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseDataset):
            return NotImplemented
        if self.features.shape != other.features.shape:
            return False
        return (
            np.array_equal(self.labels, other.labels)
            and np.array_equal(self.features.indptr, other.features.indptr)
            and np.array_equal(self.features.indices, other.features.indices)
            and np.array_equal(self.features.data, other.features.data)
        )


def resolve_subset(data: SparseDataset, subset: Subset) -> np.ndarray:
    """Return ``subset`` as a validated integer index array."""

    if subset is None:
        return np.arange(data.n_samples, dtype=np.intp)
    indices = np.asarray(subset, dtype=np.intp).ravel()
    if indices.size and (indices.min() < 0 or indices.max() >= data.n_samples):
        raise DatasetError(f"subset indices must lie in [0, {data.n_samples})")
    return indices
