"""Scaled-down end-to-end checks; run with ``pytest -m acceptance``."""

import math
import os
from pathlib import Path

import numpy as np
import pytest

from adasample.data import KNOWN_DATASETS, load_libsvm, synthetic_logistic
from adasample.model import loss
from adasample.optimizers import run_ada_momentum, run_ada_sgd, run_baseline
from adasample.sampling import inverse_square_closed_form, inverse_square_product
from adasample.schemas import OptimizerConfig
from adasample.services import CheckService, montecarlo_markov_suite
from adasample.stepsize import FallbackBuffer, adaptive_step, inflate_curvature
from fixtures import metrics_text, newton_optimum

pytestmark = pytest.mark.acceptance

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def instance():
    data = synthetic_logistic(1000, 10, 2.0, 7)
    lam = 1.0 / data.n_samples
    return data, lam, loss(newton_optimum(data, lam), data)


def test_oracles_match_finite_differences():
    data = synthetic_logistic(1000, 10, 2.0, 0)
    report = CheckService().run(data, states=20, tolerance=1e-5)
    assert report.passed


def test_step_size_safety_on_random_pairs():
    rng = np.random.default_rng(123)
    rho = rng.lognormal(0, 4, 100_000)
    delta_hat = rng.lognormal(0, 4, 100_000)
    buffer = FallbackBuffer()
    for r, d in zip(rho, delta_hat):
        step, _ = adaptive_step(float(r), float(d), 0.01, buffer)
        assert step * inflate_curvature(float(d), 0.01) < 1.0


def test_full_batch_run_decreases_monotonically_to_the_optimum(instance):
    data, lam, optimum = instance
    config = OptimizerConfig(full_batch=True, lam=lam, max_iters=300, eval_every=1, tolerance=0.0)
    log = run_ada_sgd(config, data)
    losses = [record.loss for record in log.records] + [log.final_loss]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(losses, losses[1:]))
    assert log.final_loss - optimum <= 1e-6 * (losses[0] - optimum)


def test_stochastic_runs_reach_a_thousandth_of_the_gap(instance):
    data, lam, optimum = instance
    initial_gap = math.log(2.0) - optimum
    reached = 0
    for seed in range(10):
        config = OptimizerConfig(lam=lam, init_batch=16, max_iters=2000, eval_every=10, seed=seed)
        log = run_ada_sgd(config, data)
        sizes = log.batch_sizes
        assert sizes == sorted(sizes)
        best = min([record.loss for record in log.records if record.loss is not None] + [log.final_loss])
        reached += best - optimum <= 1e-3 * initial_gap
    assert reached >= 9


def test_markov_guarantee():
    assert montecarlo_markov_suite(10_000, 0.1, 0.1, 0).passed


@pytest.mark.parametrize("n_iterations", [2, 10, 1000])
def test_probability_product_identity(n_iterations):
    assert abs(inverse_square_product(n_iterations) - inverse_square_closed_form(n_iterations)) <= 1e-12


def test_momentum_without_memory_is_bitwise_sgd(instance):
    data, lam, _ = instance
    common = dict(lam=lam, init_batch=16, max_iters=100, seed=11)
    sgd = run_ada_sgd(OptimizerConfig(**common), data)
    momentum = run_ada_momentum(OptimizerConfig(variant="ada_momentum", beta1=0.0, **common), data)
    assert metrics_text(sgd.records) == metrics_text(momentum.records)


def _ionosphere_path() -> Path | None:
    configured = os.environ.get("ADASAMPLE_IONOSPHERE")
    candidates = [Path(configured)] if configured else []
    candidates += [DATA_DIR / "ionosphere", DATA_DIR / "ionosphere_scale"]
    return next((path for path in candidates if path.is_file()), None)


@pytest.fixture(scope="module")
def ionosphere(request):
    path = _ionosphere_path()
    if path is None:
        selected = request.config.getoption("markexpr") or ""
        message = "ionosphere LIBSVM file not found in tests/data/ or ADASAMPLE_IONOSPHERE"
        if "acceptance" in selected and "not acceptance" not in selected:
            pytest.fail(message)
        pytest.skip(message)
    data = load_libsvm(path, n_features=KNOWN_DATASETS["ionosphere"][1])
    assert (data.n_samples, data.n_features) == KNOWN_DATASETS["ionosphere"]
    return data


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ionosphere_adaptive_beats_bad_fixed_rates(ionosphere, seed):
    data = ionosphere
    adaptive = run_ada_sgd(OptimizerConfig(max_iters=300, seed=seed), data)
    budget = adaptive.total_samples
    for lr in (10.0, 0.001):
        config = OptimizerConfig(
            variant="sgd_fixed", fixed_lr=lr, init_batch=16, max_iters=max(budget // 16, 1), seed=seed
        )
        assert adaptive.final_loss < run_baseline(config, data).final_loss
