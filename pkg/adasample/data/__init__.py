"""Dataset ingestion: LIBSVM files and synthetic problems."""

from .dataset import SparseDataset, Subset, resolve_subset
from .libsvm import KNOWN_DATASETS, dump_libsvm, load_libsvm, parse_libsvm
from .synthetic import synthetic_logistic

__all__ = [
    "SparseDataset",
    "Subset",
    "resolve_subset",
    "KNOWN_DATASETS",
    "dump_libsvm",
    "load_libsvm",
    "parse_libsvm",
    "synthetic_logistic",
]
