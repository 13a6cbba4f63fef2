from __future__ import annotations

from dataclasses import dataclass

from ..model.logistic import ProblemConstants
from ..stepsize.theory import (
    ConvergenceConstants,
    convergence_constants,
    idealized_sample_bounds,
    success_probability,
)

__all__ = ["BoundsReport", "bounds_report"]


@dataclass(frozen=True, slots=True)
class BoundsReport:
    constants: ProblemConstants
    hess_bound: int
    grad_bound: int
    rates: ConvergenceConstants
    success_probability: float

    def lines(self) -> list[str]:
        return [
            f"kappa={self.constants.kappa:.17g}",
            f"hess_bound={self.hess_bound}",
            f"grad_bound={self.grad_bound}",
            f"alpha={self.rates.alpha:.17g}",
            f"rho_rate={self.rates.rho_rate:.17g}",
            f"theorem1_rate={self.rates.theorem1_rate:.17g}",
            f"success_probability={self.success_probability:.17g}",
        ]


def bounds_report(
    constants: ProblemConstants,
    *,
    n: int,
    p: float,
    eps: float,
    nu: float,
    delta: float = 0.1,
    G_bound: float = 1.0,
    g_norm: float = 1.0,
    iterations: int = 1,
) -> BoundsReport:
    """Idealized batch sizes and linear rates for one set of constants."""

    hess_bound, grad_bound = idealized_sample_bounds(
        constants, n, p, eps, nu, delta, G_bound, g_norm
    )
    return BoundsReport(
        constants=constants,
        hess_bound=hess_bound,
        grad_bound=grad_bound,
        rates=convergence_constants(constants, nu, eps),
        success_probability=success_probability(p, iterations),
    )
