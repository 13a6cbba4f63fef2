import numpy as np
import pytest
from scipy import optimize, sparse
from scipy.special import expit

from adasample.data import SparseDataset, synthetic_logistic
from adasample.errors import ModelError
from adasample.model import (
    ModelState,
    ProblemConstants,
    accuracy,
    default_lambda,
    estimate_constants,
    grad,
    hvp,
    loss,
    loss_and_grad,
    per_sample_curvature,
    per_sample_grads,
)
from fixtures import dense_hessian, newton_optimum


def _dense_reference(state, data):
    z = data.features.toarray()
    y = data.labels
    margins = y * (z @ state.x)
    value = np.mean(np.log1p(np.exp(-margins))) + 0.5 * state.lam * state.x @ state.x
    coef = -y * expit(-margins)
    gradient = z.T @ coef / len(y) + state.lam * state.x
    weights = expit(margins) * expit(-margins)
    hessian = (z.T * weights) @ z / len(y) + state.lam * np.eye(len(state.x))
    return value, gradient, hessian, coef, z


def test_oracles_match_dense_formulas(tiny_dataset):
    state = ModelState(np.array([0.3, -0.2, 0.5]), 0.1)
    value, gradient, hessian, _, _ = _dense_reference(state, tiny_dataset)
    v = np.array([1.0, -2.0, 0.5])
    assert loss(state, tiny_dataset) == pytest.approx(value, rel=1e-12)
    np.testing.assert_allclose(grad(state, tiny_dataset), gradient, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(hvp(state, tiny_dataset, None, v), hessian @ v, rtol=1e-12)
    columns = np.column_stack([hvp(state, tiny_dataset, None, e) for e in np.eye(3)])
    np.testing.assert_allclose(columns, dense_hessian(state, tiny_dataset), rtol=1e-12, atol=1e-15)


def test_per_sample_gradients_match_dense_rows(tiny_dataset):
    state = ModelState(np.array([0.3, -0.2, 0.5]), 0.1)
    _, _, _, coef, z = _dense_reference(state, tiny_dataset)
    expected = coef[:, None] * z + 0.1 * state.x
    grads = per_sample_grads(state, tiny_dataset)
    v = np.array([0.2, 1.0, -1.0])
    np.testing.assert_allclose(grads.dense(), expected, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(grads.dots(v), expected @ v, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(grads.squared_norms(), (expected**2).sum(axis=1), rtol=1e-12)
    np.testing.assert_allclose(grads.mean(), grad(state, tiny_dataset), rtol=1e-12, atol=1e-15)
    assert len(grads) == grads.size == 5


def test_per_sample_curvature_averages_to_the_quadratic_form(tiny_dataset):
    state = ModelState(np.array([0.1, 0.1, -0.4]), 0.05)
    v = np.array([0.5, -1.0, 2.0])
    subset = [0, 2, 2, 4]
    curvatures = per_sample_curvature(state, tiny_dataset, subset, v)
    assert curvatures.shape == (4,)
    assert curvatures.mean() == pytest.approx(v @ hvp(state, tiny_dataset, subset, v), rel=1e-12)


def test_subset_with_duplicates_weights_rows(tiny_dataset):
    state = ModelState(np.array([0.3, -0.2, 0.5]), 0.0)
    doubled = loss(state, tiny_dataset, [1, 1])
    assert doubled == pytest.approx(loss(state, tiny_dataset, [1]), rel=1e-14)


def test_single_sample_values_at_origin():
    data = SparseDataset(sparse.csr_matrix(np.array([[1.0]])), np.array([1.0]))
    state = ModelState.zeros(1, 0.0)
    assert loss(state, data) == pytest.approx(np.log(2.0), rel=1e-15)
    assert grad(state, data)[0] == pytest.approx(-0.5, rel=1e-15)
    assert hvp(state, data, None, np.array([1.0]))[0] == pytest.approx(0.25, rel=1e-15)


def test_oracle_errors(tiny_dataset):
    state = ModelState.zeros(3, 0.1)
    with pytest.raises(ModelError):
        grad(ModelState.zeros(2, 0.1), tiny_dataset)
    with pytest.raises(ModelError):
        loss(state, tiny_dataset, [])
    with pytest.raises(ModelError):
        loss(state, tiny_dataset, [7])
    with pytest.raises(ModelError):
        hvp(state, tiny_dataset, None, np.ones(2))
    with pytest.raises(ModelError):
        ModelState(np.array([np.nan]), 0.1)
    with pytest.raises(ModelError):
        ModelState(np.zeros(1), -1.0)


def test_estimate_constants_bounds_the_hessian_spectrum(small_synthetic):
    lam = default_lambda(small_synthetic)
    constants = estimate_constants(small_synthetic, lam)
    assert constants.m_lower == lam
    rng = np.random.default_rng(0)
    for _ in range(5):
        state = ModelState(rng.normal(size=small_synthetic.n_features), lam)
        eigenvalues = np.linalg.eigvalsh(dense_hessian(state, small_synthetic))
        assert eigenvalues.min() >= lam * (1 - 1e-9)
        assert eigenvalues.max() <= constants.M_upper * (1 + 1e-9)
    assert constants.M_per_sample >= constants.M_upper
    assert constants.kappa == pytest.approx(constants.M_upper / lam)
    with pytest.raises(ModelError):
        estimate_constants(small_synthetic, 0.0)


def test_problem_constants_keep_the_largest_gamma():
    constants = ProblemConstants(1.0, 4.0, 4.0).with_gamma(2.0).with_gamma(1.0)
    assert constants.gamma == 2.0
    with pytest.raises(ModelError):
        ProblemConstants(2.0, 1.0, 1.0)


def test_newton_reference_agrees_with_scipy(small_synthetic):
    lam = default_lambda(small_synthetic)
    reference = newton_optimum(small_synthetic, lam)
    result = optimize.minimize(
        lambda x: loss(ModelState(x, lam), small_synthetic),
        np.zeros(small_synthetic.n_features),
        jac=lambda x: grad(ModelState(x, lam), small_synthetic),
        method="L-BFGS-B",
        options={"gtol": 1e-10, "ftol": 1e-15, "maxiter": 1000},
    )
    assert np.linalg.norm(grad(reference, small_synthetic)) < 1e-10
    assert loss(reference, small_synthetic) <= result.fun + 1e-12
    assert loss(reference, small_synthetic) == pytest.approx(result.fun, abs=1e-8)


def test_accuracy_is_well_above_chance_at_the_optimum(small_synthetic):
    state = newton_optimum(small_synthetic, default_lambda(small_synthetic))
    assert accuracy(state, small_synthetic) > 0.7
    assert accuracy(ModelState.zeros(5, 0.1), small_synthetic) == 0.0


def test_loss_and_grad_share_one_pass(tiny_dataset):
    state = ModelState(np.array([0.3, -0.2, 0.5]), 0.1)
    value, gradient = loss_and_grad(state, tiny_dataset, [0, 2, 2])
    assert value == loss(state, tiny_dataset, [0, 2, 2])
    np.testing.assert_array_equal(gradient, grad(state, tiny_dataset, [0, 2, 2]))


def test_hvp_is_linear_in_the_direction(small_synthetic):
    rng = np.random.default_rng(4)
    state = ModelState(rng.normal(size=5), 0.01)
    u, w = rng.normal(size=(2, 5))
    subset = rng.integers(0, small_synthetic.n_samples, size=30)
    combined = hvp(state, small_synthetic, subset, 2.5 * u - 0.75 * w)
    expected = 2.5 * hvp(state, small_synthetic, subset, u) - 0.75 * hvp(state, small_synthetic, subset, w)
    np.testing.assert_allclose(combined, expected, rtol=1e-12, atol=1e-14)


def test_quadratic_form_lies_between_lambda_and_m_upper(small_synthetic):
    lam = default_lambda(small_synthetic)
    M_upper = estimate_constants(small_synthetic, lam).M_upper
    rng = np.random.default_rng(5)
    for _ in range(10):
        state = ModelState(rng.normal(scale=2.0, size=5), lam)
        v = rng.normal(size=5)
        form = float(v @ hvp(state, small_synthetic, None, v))
        assert lam * (v @ v) * (1 - 1e-12) <= form <= M_upper * (v @ v) * (1 + 1e-12)


def test_loss_is_convex_along_a_segment(small_synthetic):
    rng = np.random.default_rng(6)
    a = ModelState(rng.normal(scale=3.0, size=5), 0.005)
    b = ModelState(rng.normal(scale=3.0, size=5), 0.005)
    f_a, f_b = loss(a, small_synthetic), loss(b, small_synthetic)
    for theta in np.linspace(0.0, 1.0, 11):
        between = a.moved(theta * a.x + (1 - theta) * b.x)
        assert loss(between, small_synthetic) <= theta * f_a + (1 - theta) * f_b + 1e-12


def test_per_sample_curvature_matches_dense_sample_hessians(tiny_dataset):
    state = ModelState(np.array([0.2, -0.7, 0.4]), 0.05)
    v = np.array([1.5, -0.5, 1.0])
    subset = [4, 0, 3, 1, 1]
    z = tiny_dataset.features.toarray()
    expected = []
    for i in subset:
        margin = tiny_dataset.labels[i] * (z[i] @ state.x)
        hessian_i = expit(margin) * expit(-margin) * np.outer(z[i], z[i]) + state.lam * np.eye(3)
        expected.append(v @ hessian_i @ v)
    curvatures = per_sample_curvature(state, tiny_dataset, subset, v)
    np.testing.assert_allclose(curvatures, expected, rtol=1e-12)
    assert np.all(curvatures >= state.lam * (v @ v))


def test_zero_rows_have_curvature_lambda(zero_rows):
    state = ModelState(np.array([0.3, -1.0, 2.0]), 1.0)
    curvatures = per_sample_curvature(state, zero_rows, None, np.array([0.0, 0.6, 0.8]))
    np.testing.assert_allclose(curvatures, np.ones(zero_rows.n_samples), rtol=1e-15)


def test_per_sample_gradients_match_finite_differences(tiny_dataset):
    state = ModelState(np.array([0.3, -0.2, 0.5]), 0.1)
    grads = per_sample_grads(state, tiny_dataset).dense()
    h = 1e-6
    for i in range(tiny_dataset.n_samples):
        loss_i = lambda x: loss(state.moved(x), tiny_dataset, [i])  # noqa: E731
        numeric = [(loss_i(state.x + h * e) - loss_i(state.x - h * e)) / (2 * h) for e in np.eye(3)]
        np.testing.assert_allclose(grads[i], numeric, rtol=1e-6, atol=1e-8)


def test_partition_gradients_average_to_the_full_gradient(small_synthetic):
    state = ModelState(np.random.default_rng(7).normal(size=5), 0.005)
    parts = np.array_split(np.random.default_rng(8).permutation(small_synthetic.n_samples), 4)
    mean = np.mean([grad(state, small_synthetic, part) for part in parts], axis=0)
    np.testing.assert_allclose(mean, grad(state, small_synthetic), rtol=1e-12, atol=1e-15)


def test_oracles_stay_finite_at_huge_margins():
    data = SparseDataset(sparse.csr_matrix(np.array([[1e4], [1e4]])), np.array([1.0, -1.0]))
    state = ModelState(np.array([1.0]), 0.01)
    assert loss(state, data) == pytest.approx(5000.0 + 0.005, rel=1e-12)
    gradient = grad(state, data)
    assert np.all(np.isfinite(gradient))
    assert gradient[0] == pytest.approx(5000.0 + 0.01, rel=1e-12)
    assert np.isfinite(hvp(state, data, None, np.array([1.0]))).all()


def test_well_separated_synthetic_problem_is_learnable():
    data = synthetic_logistic(1000, 10, 5.0, 7)
    state = newton_optimum(data, default_lambda(data))
    assert accuracy(state, data) >= 0.9
