"""L2-regularized logistic loss and its first and second-order oracles.

Every oracle makes a single pass over the non-zeros of the selected rows,
so a Hessian-vector product costs about as much as a gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse
from scipy.special import expit, log_expit

from ..data.dataset import SparseDataset, Subset, resolve_subset
from ..errors import DatasetError, ModelError

__all__ = [
    "ModelState",
    "ProblemConstants",
    "PerSampleGradients",
    "loss",
    "grad",
    "loss_and_grad",
    "per_sample_grads",
    "hvp",
    "per_sample_curvature",
    "estimate_constants",
    "accuracy",
    "default_lambda",
]


@dataclass(frozen=True, slots=True)
class ModelState:
    """Parameter vector and regularization weight."""

    x: np.ndarray
    lam: float

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=np.float64).ravel()
        if not np.all(np.isfinite(x)):
            raise ModelError("parameters must be finite")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ModelError("lambda must be a finite non-negative number")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def zeros(cls, n_features: int, lam: float) -> "ModelState":
        return cls(np.zeros(n_features), lam)

    def moved(self, x: np.ndarray) -> "ModelState":
        """Return a state with new parameters and the same lambda."""

        return ModelState(x, self.lam)


@dataclass(frozen=True, slots=True)
class ProblemConstants:
    """Curvature and gradient bounds of the regularized objective."""

    m_lower: float
    M_upper: float
    M_per_sample: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.m_lower <= self.M_upper:
            raise ModelError("constants need 0 < m_lower <= M_upper")

    @property
    def kappa(self) -> float:
        return self.M_upper / self.m_lower

    def with_gamma(self, gamma: float) -> "ProblemConstants":
        """Return the constants with the observed gradient-norm bound."""

        return replace(self, gamma=max(self.gamma, float(gamma)))


@dataclass(frozen=True, slots=True)
class PerSampleGradients:
    """Per-sample gradients stored as ``coef[i] * z_i + shared``.

    ``shared`` is the regularization term lambda * x common to every sample,
    so norms and projections are computed in O(nnz) without densifying.
    """

    coef: np.ndarray
    rows: sparse.csr_matrix
    shared: np.ndarray

    def __len__(self) -> int:
        return int(self.coef.shape[0])

    @property
    def size(self) -> int:
        return len(self)

    def dots(self, v: np.ndarray) -> np.ndarray:
        """Return g_i . v for every sample."""

        return self.coef * (self.rows @ v) + float(self.shared @ v)

    def squared_norms(self) -> np.ndarray:
        """Return ||g_i||^2 for every sample."""

        row_sq = np.asarray(self.rows.power(2).sum(axis=1)).ravel()
        cross = self.rows @ self.shared
        return self.coef**2 * row_sq + 2.0 * self.coef * cross + float(self.shared @ self.shared)

    def mean(self) -> np.ndarray:
        return self.rows.T @ self.coef / len(self) + self.shared

    def dense(self) -> np.ndarray:
        """Return the gradients as a (len, n_features) array."""

        return self.rows.multiply(self.coef[:, None]).toarray() + self.shared[None, :]


def default_lambda(data: SparseDataset) -> float:
    """Return the customary lambda = 1/N."""

    return 1.0 / data.n_samples


def _select(state: ModelState, data: SparseDataset, subset: Subset):
    if state.x.shape[0] != data.n_features:
        raise ModelError(
            f"parameter length {state.x.shape[0]} does not match {data.n_features} features"
        )
    try:
        indices = None if subset is None else resolve_subset(data, subset)
    except DatasetError as exc:
        raise ModelError(str(exc)) from exc
    if indices is not None and indices.size == 0:
        raise ModelError("subset is empty")
    rows, labels = data.take(indices)
    margins = labels * (rows @ state.x)
    return rows, labels, margins


def _check_direction(state: ModelState, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape != state.x.shape:
        raise ModelError(f"direction has length {v.shape[0]}, expected {state.x.shape[0]}")
    return v


def loss(state: ModelState, data: SparseDataset, subset: Subset = None) -> float:
    """Mean logistic loss over ``subset`` plus (lambda/2)||x||^2."""

    _, _, margins = _select(state, data, subset)
    data_term = float(np.mean(-log_expit(margins)))
    return data_term + 0.5 * state.lam * float(state.x @ state.x)


def grad(state: ModelState, data: SparseDataset, subset: Subset = None) -> np.ndarray:
    """Mean gradient over ``subset``, regularization included."""

    rows, labels, margins = _select(state, data, subset)
    coef = -labels * expit(-margins)
    return rows.T @ coef / margins.shape[0] + state.lam * state.x


def loss_and_grad(
    state: ModelState, data: SparseDataset, subset: Subset = None
) -> tuple[float, np.ndarray]:
    """``loss`` and ``grad`` from one pass over the selected rows."""

    rows, labels, margins = _select(state, data, subset)
    value = float(np.mean(-log_expit(margins))) + 0.5 * state.lam * float(state.x @ state.x)
    coef = -labels * expit(-margins)
    return value, rows.T @ coef / margins.shape[0] + state.lam * state.x


def per_sample_grads(
    state: ModelState, data: SparseDataset, subset: Subset = None
) -> PerSampleGradients:
    """Per-sample gradients of ``subset`` in coefficient form."""

    rows, labels, margins = _select(state, data, subset)
    coef = -labels * expit(-margins)
    return PerSampleGradients(coef=coef, rows=rows, shared=state.lam * state.x)


def hvp(state: ModelState, data: SparseDataset, subset: Subset, v: np.ndarray) -> np.ndarray:
    """Exact product of the subset Hessian with ``v``."""

    v = _check_direction(state, v)
    rows, _, margins = _select(state, data, subset)
    weights = expit(margins) * expit(-margins)
    return rows.T @ (weights * (rows @ v)) / margins.shape[0] + state.lam * v


def per_sample_curvature(
    state: ModelState, data: SparseDataset, subset: Subset, v: np.ndarray
) -> np.ndarray:
    """Return v . H_i v for every sample of ``subset``."""

    v = _check_direction(state, v)
    rows, _, margins = _select(state, data, subset)
    weights = expit(margins) * expit(-margins)
    return weights * (rows @ v) ** 2 + state.lam * float(v @ v)


def estimate_constants(data: SparseDataset, lam: float) -> ProblemConstants:
    """Bound the Hessian spectrum of the objective.

    m is lambda; M uses the trace bound (1/4N) sum ||z_i||^2 and the
    per-sample bound max ||z_i||^2 / 4, since sigma' <= 1/4.
    """

    if not lam > 0:
        raise ModelError("constants are undefined for lambda <= 0")
    row_sq = np.asarray(data.features.power(2).sum(axis=1)).ravel()
    M_upper = lam + float(row_sq.sum()) / (4.0 * data.n_samples)
    M_per_sample = lam + float(row_sq.max(initial=0.0)) / 4.0
    return ProblemConstants(m_lower=lam, M_upper=M_upper, M_per_sample=M_per_sample)


def accuracy(state: ModelState, data: SparseDataset, subset: Subset = None) -> float:
    """Fraction of samples classified with a strictly positive margin."""

    _, _, margins = _select(state, data, subset)
    return float(np.mean(margins > 0))
