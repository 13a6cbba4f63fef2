"""Reference computations shared by the tests."""

from __future__ import annotations

import io

import numpy as np
from scipy.special import expit

from adasample.data import SparseDataset
from adasample.model import ModelState, grad, loss
from adasample.schemas.metrics import write_metrics


def dense_hessian(state: ModelState, data: SparseDataset, subset=None) -> np.ndarray:
    """Z^T diag(sigma(m) sigma(-m)) Z / n + lambda I built from dense rows."""

    rows, labels = data.take(subset)
    z = rows.toarray()
    margins = labels * (z @ state.x)
    weights = expit(margins) * expit(-margins)
    return (z.T * weights) @ z / z.shape[0] + state.lam * np.eye(data.n_features)


def newton_optimum(data: SparseDataset, lam: float, iterations: int = 50) -> ModelState:
    """Damped Newton iterations run to machine precision."""

    state = ModelState.zeros(data.n_features, lam)
    for _ in range(iterations):
        g = grad(state, data)
        if np.linalg.norm(g) < 1e-15:
            break
        step = np.linalg.solve(dense_hessian(state, data), g)
        t = 1.0
        current = loss(state, data)
        while t > 1e-8 and loss(state.moved(state.x - t * step), data) > current:
            t *= 0.5
        state = state.moved(state.x - t * step)
    return state


def metrics_text(records) -> str:
    """The metrics CSV of ``records`` as a string."""

    buffer = io.StringIO()
    write_metrics(buffer, records)
    return buffer.getvalue()
