"""Decrease functions, rates and idealized batch sizes from the analysis.

These are diagnostics and calculators only; the optimizer loops never use
them to choose a step or a batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import StepSizeError
from ..model.logistic import ProblemConstants

__all__ = [
    "ConvergenceConstants",
    "omega",
    "decrease_gap",
    "omega_quadratic_floor",
    "convergence_constants",
    "idealized_sample_bounds",
    "guaranteed_decrease",
    "success_probability",
]


@dataclass(frozen=True, slots=True)
class ConvergenceConstants:
    alpha: float
    rho_rate: float
    theorem1_rate: float


def omega(z: float) -> float:
    """z - log(1 + z), the decrease of a full Newton-length step."""

    if not z > -1.0:
        raise StepSizeError(f"omega is defined for z > -1, got {z}")
    return z - math.log1p(z)


def decrease_gap(delta: float, rho: float, t: float) -> float:
    """(delta + rho) t + log(1 - delta t); equals omega(rho/delta) at the optimal t."""

    if delta * t >= 1.0:
        raise StepSizeError(f"decrease_gap needs t < 1/delta, got t={t}, delta={delta}")
    return (delta + rho) * t + math.log1p(-delta * t)


def omega_quadratic_floor(z: float, gamma_bound: float) -> float:
    """z^2 / (2 (1 + Gamma)), a lower bound on omega(z) for z in [0, Gamma]."""

    if gamma_bound < 0:
        raise StepSizeError("Gamma must be non-negative")
    return z * z / (2.0 * (1.0 + gamma_bound))


def _check_rate_inputs(nu: float, eps: float) -> None:
    if not 0.0 <= nu < 1.0:
        raise StepSizeError(f"nu must lie in [0, 1), got {nu}")
    if not 0.0 <= eps < 1.0:
        raise StepSizeError(f"eps must lie in [0, 1), got {eps}")


def convergence_constants(
    constants: ProblemConstants, nu: float, eps: float
) -> ConvergenceConstants:
    """alpha and the linear rates 1 - m alpha and the high-probability variant."""

    _check_rate_inputs(nu, eps)
    m, M, gamma = constants.m_lower, constants.M_upper, constants.gamma
    damping = M * (1.0 + gamma / math.sqrt(m))
    alpha = (1.0 - nu**2) * (1.0 - eps) / damping
    theorem1 = 1.0 - m * (1.0 - nu) ** 2 * (1.0 - eps) / (2.0 * (1.0 + nu**2) * damping)
    return ConvergenceConstants(alpha=alpha, rho_rate=1.0 - m * alpha, theorem1_rate=theorem1)


def _ceil(value: float) -> int:
    return int(math.ceil(round(value, 9)))


def idealized_sample_bounds(
    constants: ProblemConstants,
    n: int,
    p: float,
    eps: float,
    nu: float,
    delta: float,
    G_bound: float,
    g_norm: float,
) -> tuple[int, int]:
    """Return the (Hessian, gradient) batch sizes the concentration bounds ask for.

    Hessian: 16 kappa^2 ln(2n/p) / eps^2. Gradient:
    (G / (||g_S|| nu))^2 (1 + sqrt(8 ln(1/delta)))^2.
    """

    if n < 1:
        raise StepSizeError("dimension n must be positive")
    if not 0.0 < p <= 1.0 or not 0.0 < delta <= 1.0:
        raise StepSizeError("p and delta must lie in (0, 1]")
    if not eps > 0 or not nu > 0:
        raise StepSizeError("eps and nu must be positive")
    if not g_norm > 0 or G_bound < 0:
        raise StepSizeError("need g_norm > 0 and G_bound >= 0")
    hess = 16.0 * constants.kappa**2 * math.log(2.0 * n / p) / eps**2
    grad = (G_bound / (g_norm * nu)) ** 2 * (1.0 + math.sqrt(8.0 * math.log(1.0 / delta))) ** 2
    return _ceil(hess), _ceil(grad)


def guaranteed_decrease(
    constants: ProblemConstants, nu: float, eps: float, grad_norm: float
) -> float:
    """(alpha / 2) ||grad F||^2, the per-iteration decrease guaranteed when both tests hold."""

    return 0.5 * convergence_constants(constants, nu, eps).alpha * grad_norm**2


def success_probability(p: float, iterations: int) -> float:
    """(1 - p)^(2k): both tests hold at each of ``iterations`` steps."""

    if not 0.0 <= p <= 1.0:
        raise StepSizeError("p must lie in [0, 1]")
    if iterations < 0:
        raise StepSizeError("iterations must be non-negative")
    return (1.0 - p) ** (2 * iterations)
