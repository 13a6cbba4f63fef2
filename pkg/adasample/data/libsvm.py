"""LIBSVM plain-text reader and writer for binary classification data."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
from scipy import sparse

from ..errors import DatasetError, FeatureWidthError, LibsvmParseError
from .dataset import SparseDataset

__all__ = ["parse_libsvm", "load_libsvm", "dump_libsvm", "map_labels", "KNOWN_DATASETS"]

logger = logging.getLogger(__name__)

# (N, n_features) of the binary LIBSVM sets used in the experiments.
KNOWN_DATASETS: dict[str, tuple[int, int]] = {
    "covtype": (581_012, 54),
    "webspam": (350_000, 254),
    "rcv1": (47_237, 20_242),
    "real-sim": (20_959, 72_309),
    "a1a": (30_956, 123),
    "ionosphere": (351, 34),
}

_PROGRESS_EVERY = 10_000


def map_labels(raw: np.ndarray) -> np.ndarray:
    """Map raw binary labels onto {-1, +1}.

    {-1, +1} is kept as is, {0, 1} maps 0 to -1 and {1, 2} maps 1 to -1.
    """

    values = set(np.unique(raw).tolist())
    if values <= {-1.0, 1.0}:
        return raw.astype(np.float64)
    if values <= {0.0, 1.0}:
        return np.where(raw > 0.5, 1.0, -1.0)
    if values <= {1.0, 2.0}:
        return np.where(raw > 1.5, 1.0, -1.0)
    shown = ", ".join(f"{value:g}" for value in sorted(values)[:5])
    raise DatasetError(f"unsupported label set {{{shown}}}; only binary labels are accepted")


def parse_libsvm(text_stream: Iterable[str], n_features: int | None = None) -> SparseDataset:
    """Parse ``<label> <idx>:<val> ...`` lines into a dataset.

    Blank lines are skipped and anything after ``#`` is a comment. Feature
    indices are 1-based and strictly increasing per line.
    """

    raw_labels: list[float] = []
    indptr: list[int] = [0]
    indices: list[int] = []
    values: list[float] = []
    max_index = 0

    for line_number, line in enumerate(text_stream, start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        raw_labels.append(_parse_label(tokens[0], line_number))
        previous = 0
        for token in tokens[1:]:
            index, value = _parse_feature(token, line_number)
            if index <= previous:
                raise LibsvmParseError(
                    f"feature index {index} does not increase (previous {previous})",
                    line_number,
                )
            previous = index
            indices.append(index - 1)
            values.append(value)
        max_index = max(max_index, previous)
        indptr.append(len(indices))
        if len(raw_labels) % _PROGRESS_EVERY == 0:
            logger.debug("Read %d rows", len(raw_labels))

    if not raw_labels:
        raise DatasetError("LIBSVM input contains no samples")
    width = max_index
    if n_features is not None:
        if n_features < max_index:
            raise FeatureWidthError(
                f"n_features={n_features} is smaller than the largest index {max_index}"
            )
        width = n_features
    if width < 1:
        raise DatasetError("LIBSVM input contains no features")

    features = sparse.csr_matrix(
        (
            np.asarray(values, dtype=np.float64),
            np.asarray(indices, dtype=np.int32),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(raw_labels), width),
    )
    labels = map_labels(np.asarray(raw_labels, dtype=np.float64))
    dataset = SparseDataset(features, labels)
    negatives, positives = dataset.class_balance()
    logger.info(
        "Parsed %d samples, %d features, %d non-zeros (%d negative, %d positive)",
        dataset.n_samples,
        dataset.n_features,
        dataset.nnz,
        negatives,
        positives,
    )
    return dataset


def load_libsvm(path: str | Path, n_features: int | None = None) -> SparseDataset:
    """Read a plain-text LIBSVM file from disk."""

    file_path = Path(path)
    if not file_path.is_file():
        raise DatasetError(f"dataset file {file_path} does not exist")
    with file_path.open("r", encoding="utf-8") as handle:
        dataset = parse_libsvm(handle, n_features=n_features)
    _warn_on_known_size(file_path, dataset)
    return dataset


def dump_libsvm(data: SparseDataset, stream: TextIO) -> None:
    """Write ``data`` in LIBSVM format with round-trip exact values."""

    features = data.features
    for i in range(data.n_samples):
        start, end = features.indptr[i], features.indptr[i + 1]
        label = "+1" if data.labels[i] > 0 else "-1"
        cells = [
            f"{int(j) + 1}:{float(v)!r}"
            for j, v in zip(features.indices[start:end], features.data[start:end])
        ]
        stream.write(" ".join([label, *cells]) + "\n")


def _parse_label(token: str, line_number: int) -> float:
    try:
        label = float(token)
    except ValueError as exc:
        raise LibsvmParseError(f"malformed label {token!r}", line_number) from exc
    if not math.isfinite(label):
        raise LibsvmParseError(f"non-finite label {token!r}", line_number)
    return label


def _parse_feature(token: str, line_number: int) -> tuple[int, float]:
    index_text, sep, value_text = token.partition(":")
    if not sep:
        raise LibsvmParseError(f"malformed feature token {token!r}", line_number)
    try:
        index = int(index_text)
        value = float(value_text)
    except ValueError as exc:
        raise LibsvmParseError(f"malformed feature token {token!r}", line_number) from exc
    if index < 1:
        raise LibsvmParseError(f"feature index {index} must be >= 1", line_number)
    if not math.isfinite(value):
        raise LibsvmParseError(f"non-finite feature value in {token!r}", line_number)
    return index, value


def _warn_on_known_size(path: Path, dataset: SparseDataset) -> None:
    for name, (n_samples, n_features) in KNOWN_DATASETS.items():
        if not path.name.startswith(name):
            continue
        if dataset.n_samples != n_samples or dataset.n_features > n_features:
            logger.warning(
                "%s has %d x %d, the published %s set is %d x %d",
                path.name,
                dataset.n_samples,
                dataset.n_features,
                name,
                n_samples,
                n_features,
            )
        return
