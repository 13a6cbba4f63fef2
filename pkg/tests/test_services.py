import math

import numpy as np
import pytest

from adasample.core.settings import AppSettings
from adasample.errors import ConfigError, DegenerateGradientError, SamplingError
from adasample.model import ProblemConstants
from adasample.schemas import OptimizerConfig, TrainRequest
from adasample.services import (
    CheckService,
    CompareService,
    ExperimentService,
    bounds_report,
    montecarlo_markov_suite,
    parse_variant_token,
    run_header,
    sin_squared,
)


@pytest.fixture
def settings(tmp_path) -> AppSettings:
    return AppSettings(ADASAMPLE_OUTPUT_DIR=str(tmp_path), ADASAMPLE_WORKERS=1)


def _base(**values) -> OptimizerConfig:
    values.setdefault("lam", 0.005)
    values.setdefault("init_batch", 8)
    values.setdefault("max_iters", 10)
    return OptimizerConfig(**values)


def test_check_service_passes_and_catches_a_corrupted_gradient(small_synthetic, settings):
    service = CheckService(settings)
    report = service.run(small_synthetic, lam=0.005, states=4)
    assert report.passed
    assert report.states == 4
    assert report.tolerance == 1e-5
    corrupted = service.run(small_synthetic, lam=0.005, states=2, corrupt_gradient=True)
    assert not corrupted.passed
    assert corrupted.grad_error == pytest.approx(1e-3, rel=1e-2)


def test_experiment_service_writes_relative_paths_under_the_output_dir(settings, tmp_path):
    service = ExperimentService(settings)
    request = TrainRequest(synthetic="150,4,1.0", out="runs/train.csv", optimizer=_base())
    result = service.train(request)
    assert result.csv_path == tmp_path / "runs" / "train.csv"
    assert result.rows == result.log.iterations == 10
    lines = result.csv_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 11
    assert result.header.startswith("# variant=ada_sgd seed=0 lambda=0.005 N=150 n_features=4")


def test_synthetic_data_seed_defaults_to_the_optimizer_seed(settings):
    service = ExperimentService(settings)
    by_seed = service.load_dataset(TrainRequest(synthetic="50,3,1.0", optimizer=_base(seed=4)))
    explicit = service.load_dataset(TrainRequest(synthetic="50,3,1.0", data_seed=4))
    other = service.load_dataset(TrainRequest(synthetic="50,3,1.0", data_seed=5))
    assert by_seed == explicit
    assert by_seed != other


def test_run_header_prints_lambda_exactly(small_synthetic):
    header = run_header(_base(lam=None), small_synthetic, 1.0 / 200)
    assert "lambda=0.005 " in header
    assert header.endswith("mode=per_iteration")


def test_variant_tokens():
    assert parse_variant_token("ada-sgd").variant == "ada_sgd"
    spec = parse_variant_token("sgd-fixed@0.25")
    assert (spec.variant, spec.lr, spec.file_stem) == ("sgd_fixed", 0.25, "sgd-fixed-0.25")
    assert parse_variant_token("sgd-norm@median").lr_from_median
    for bad in ("ada-sgd@0.1", "sgd-fixed@fast", "sgd-fixed@-1", "@0.1"):
        with pytest.raises(ConfigError):
            parse_variant_token(bad)


def test_compare_median_rate_comes_from_the_adaptive_run(small_synthetic, settings, tmp_path):
    rows = CompareService(settings).compare(
        _base(), small_synthetic, ["sgd-fixed@median", "ada-sgd", "sgd-fixed@0.5"], "cmp"
    )
    assert [row.variant for row in rows] == ["sgd_fixed", "ada_sgd", "sgd_fixed"]
    assert rows[0].median_step == rows[1].median_step
    assert rows[2].median_step == 0.5
    assert {row.seed for row in rows} == {0}
    written = sorted(path.name for path in (tmp_path / "cmp").iterdir())
    assert written == ["00-sgd-fixed-median.csv", "01-ada-sgd.csv", "02-sgd-fixed-0.5.csv", "summary.csv"]


def test_compare_errors(small_synthetic, settings):
    service = CompareService(settings)
    with pytest.raises(ConfigError):
        service.compare(_base(), small_synthetic, [], "cmp")
    with pytest.raises(ConfigError):
        service.compare(_base(), small_synthetic, ["sgd-fixed@median"], "cmp")


def test_sweep_sorts_by_final_loss(small_synthetic, settings, tmp_path):
    rows = CompareService(settings).sweep(
        _base(),
        small_synthetic,
        tmp_path / "grid",
        p_values=[0.1, 0.2],
        nu_values=[0.1],
        eps_values=[0.01, 0.1],
    )
    assert len(rows) == 4
    losses = [row.final_loss for row in rows]
    assert losses == sorted(losses)
    assert {row.name for row in rows} == {
        "p0.1_nu0.1_eps0.01",
        "p0.1_nu0.1_eps0.1",
        "p0.2_nu0.1_eps0.01",
        "p0.2_nu0.1_eps0.1",
    }
    assert (tmp_path / "grid" / "summary.csv").is_file()
    with pytest.raises(ConfigError):
        CompareService(settings).sweep(
            _base(variant="sgd_norm"), small_synthetic, "grid", p_values=[0.1], nu_values=[0.1], eps_values=[0.1]
        )


def test_bounds_report_lines():
    report = bounds_report(ProblemConstants(1.0, 1.0, 1.0), n=1, p=2.0 / math.e, eps=0.5, nu=0.1, delta=1.0)
    lines = report.lines()
    assert "hess_bound=64" in lines
    assert "grad_bound=100" in lines
    assert lines[0] == "kappa=1"


def test_sin_squared():
    g = np.array([1.0, 0.0])
    means = np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(sin_squared(means, g), [0.0, 1.0, 0.5, 1.0])


def test_markov_suite_passes():
    report = montecarlo_markov_suite(2000, 0.1, 0.1, 0)
    assert report.passed
    assert report.expected_sin2 <= 0.1 * 0.1**2
    assert report.batch_size & (report.batch_size - 1) == 0
    assert report.bound == pytest.approx(0.1 + 3 * math.sqrt(0.09 / 2000))


def test_markov_suite_on_a_noiseless_population():
    population = np.tile([1.0, 2.0, -1.0], (50, 1))
    report = montecarlo_markov_suite(300, 0.1, 0.1, 1, population=population)
    assert report.batch_size == 2
    assert report.frequency == 0.0
    assert report.passed


def test_markov_suite_errors():
    with pytest.raises(SamplingError):
        montecarlo_markov_suite(0, 0.1, 0.1, 0)
    with pytest.raises(SamplingError):
        montecarlo_markov_suite(10, 1.5, 0.1, 0)
    with pytest.raises(DegenerateGradientError):
        montecarlo_markov_suite(10, 0.1, 0.1, 0, population=np.array([[1.0, 0.0], [-1.0, 0.0]]))
