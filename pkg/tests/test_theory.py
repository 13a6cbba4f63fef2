import math

import numpy as np
import pytest

from adasample.errors import StepSizeError
from adasample.model import ProblemConstants
from adasample.stepsize import (
    convergence_constants,
    decrease_gap,
    guaranteed_decrease,
    idealized_sample_bounds,
    omega,
    omega_quadratic_floor,
    success_probability,
)


def test_omega_values():
    assert omega(0.0) == 0.0
    assert omega(1.0) == pytest.approx(1.0 - math.log(2.0), rel=1e-15)
    with pytest.raises(StepSizeError):
        omega(-1.0)


def test_decrease_gap_at_optimal_step_equals_omega():
    assert decrease_gap(1.0, 1.0, 0.5) == pytest.approx(omega(1.0), rel=1e-14)
    rng = np.random.default_rng(3)
    for delta, rho in rng.lognormal(size=(50, 2)):
        t_star = rho / ((rho + delta) * delta)
        assert decrease_gap(delta, rho, t_star) == pytest.approx(omega(rho / delta), rel=1e-9)
    with pytest.raises(StepSizeError):
        decrease_gap(2.0, 1.0, 0.5)


@pytest.mark.parametrize("gamma_bound", [0.5, 1.0, 5.0])
def test_omega_dominates_its_quadratic_floor(gamma_bound):
    for z in np.linspace(0.0, gamma_bound, 201):
        assert omega(z) >= omega_quadratic_floor(z, gamma_bound) - 1e-15


def test_convergence_constants_reduce_to_gradient_descent_rate():
    constants = ProblemConstants(0.5, 4.0, 4.0)
    rates = convergence_constants(constants, 0.0, 0.0)
    assert rates.alpha == pytest.approx(0.25)
    assert rates.rho_rate == pytest.approx(1.0 - 0.5 / 4.0)
    assert rates.theorem1_rate == pytest.approx(1.0 - 0.5 / 8.0)


def test_alpha_decreases_with_nu_and_rates_stay_in_unit_interval():
    constants = ProblemConstants(0.1, 2.0, 2.0, gamma=0.5)
    alphas = [convergence_constants(constants, nu, 0.01).alpha for nu in (0.0, 0.1, 0.3, 0.6)]
    assert alphas == sorted(alphas, reverse=True)
    rates = convergence_constants(constants, 0.1, 0.01)
    assert 0.0 < rates.rho_rate < 1.0
    assert 0.0 < rates.theorem1_rate < 1.0
    with pytest.raises(StepSizeError):
        convergence_constants(constants, 1.0, 0.0)


def test_hessian_bound_hand_value_and_kappa_scaling():
    unit = ProblemConstants(1.0, 1.0, 1.0)
    hess, _ = idealized_sample_bounds(unit, 1, 2.0 / math.e, 0.5, 0.1, 0.5, 1.0, 1.0)
    assert hess == 64
    doubled = ProblemConstants(1.0, 2.0, 2.0)
    hess_doubled, _ = idealized_sample_bounds(doubled, 1, 2.0 / math.e, 0.5, 0.1, 0.5, 1.0, 1.0)
    assert hess_doubled == 4 * hess


def test_gradient_bound_without_confidence_term():
    unit = ProblemConstants(1.0, 1.0, 1.0)
    _, grad_bound = idealized_sample_bounds(unit, 1, 0.1, 0.5, 0.1, 1.0, 1.0, 1.0)
    assert grad_bound == 100
    _, tighter = idealized_sample_bounds(unit, 1, 0.1, 0.5, 0.1, 0.01, 1.0, 1.0)
    expected = 100 * (1 + math.sqrt(8 * math.log(100))) ** 2
    assert tighter == math.ceil(round(expected, 9))


def test_bounds_reject_bad_inputs():
    unit = ProblemConstants(1.0, 1.0, 1.0)
    with pytest.raises(StepSizeError):
        idealized_sample_bounds(unit, 0, 0.1, 0.5, 0.1, 0.5, 1.0, 1.0)
    with pytest.raises(StepSizeError):
        idealized_sample_bounds(unit, 1, 0.1, 0.5, 0.1, 0.5, 1.0, 0.0)


def test_guaranteed_decrease_and_success_probability():
    constants = ProblemConstants(1.0, 2.0, 2.0)
    alpha = convergence_constants(constants, 0.1, 0.01).alpha
    assert guaranteed_decrease(constants, 0.1, 0.01, 3.0) == pytest.approx(0.5 * alpha * 9.0)
    assert success_probability(0.1, 3) == pytest.approx(0.9**6)
    assert success_probability(0.1, 0) == 1.0
