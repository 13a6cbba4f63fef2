"""Search-direction rules: plain SGD, heavy-ball momentum and ADAM."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

__all__ = [
    "Direction",
    "SgdDirection",
    "MomentumState",
    "MomentumDirection",
    "AdamState",
    "AdamDirection",
    "make_direction",
]


class Direction(Protocol):
    """Turns the sampled gradient into a descent direction."""

    # ADAM's rho is measured against g_k instead of the running average
    rho_uses_sampled_gradient: bool

    def __call__(self, g_k: np.ndarray) -> np.ndarray: ...


@dataclass(slots=True)
class SgdDirection:
    rho_uses_sampled_gradient: bool = False

    def __call__(self, g_k: np.ndarray) -> np.ndarray:
        return -g_k


@dataclass(slots=True)
class MomentumState:
    v: np.ndarray


@dataclass(slots=True)
class MomentumDirection:
    """v_k = beta1 v_{k-1} + g_k with v_0 = 0, d_k = -v_k (no damping factor)."""

    beta1: float
    state: MomentumState
    rho_uses_sampled_gradient: bool = False

    @classmethod
    def create(cls, beta1: float, n_features: int) -> "MomentumDirection":
        return cls(beta1=beta1, state=MomentumState(v=np.zeros(n_features)))

    def __call__(self, g_k: np.ndarray) -> np.ndarray:
        self.state.v = self.beta1 * self.state.v + g_k
        return -self.state.v


@dataclass(slots=True)
class AdamState:
    m_tilde: np.ndarray
    v_tilde: np.ndarray
    k: int = 0


@dataclass(slots=True)
class AdamDirection:
    """Bias-corrected ADAM direction -m_k / (sqrt(v_k) + eps_prime)."""

    beta1: float
    beta2: float
    eps_prime: float
    state: AdamState
    rho_uses_sampled_gradient: bool = field(default=True)

    @classmethod
    def create(
        cls, beta1: float, beta2: float, eps_prime: float, n_features: int
    ) -> "AdamDirection":
        state = AdamState(m_tilde=np.zeros(n_features), v_tilde=np.zeros(n_features))
        return cls(beta1=beta1, beta2=beta2, eps_prime=eps_prime, state=state)

    def __call__(self, g_k: np.ndarray) -> np.ndarray:
        state = self.state
        state.m_tilde = self.beta1 * state.m_tilde + (1.0 - self.beta1) * g_k
        state.v_tilde = self.beta2 * state.v_tilde + (1.0 - self.beta2) * g_k**2
        m_k = state.m_tilde / (1.0 - self.beta1 ** (state.k + 1))
        v_k = state.v_tilde / (1.0 - self.beta2 ** (state.k + 1))
        state.k += 1
        return -m_k / (np.sqrt(v_k) + self.eps_prime)


def make_direction(
    variant: str,
    n_features: int,
    *,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps_prime: float = 1e-8,
) -> Direction:
    if variant == "ada_adam":
        return AdamDirection.create(beta1, beta2, eps_prime, n_features)
    if variant == "ada_momentum":
        return MomentumDirection.create(beta1, n_features)
    return SgdDirection()
