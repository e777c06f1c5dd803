"""Momentum flip, leapfrog integration and partial momentum refresh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, EvalCounter, PhaseState, TargetModel, evaluate_gradient


@dataclass(frozen=True)
class LeapfrogParams:
    epsilon: float
    num_steps: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ContractError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.num_steps) != self.num_steps or self.num_steps < 1:
            raise ContractError(f"num_steps must be a positive integer, got {self.num_steps}")


def flip(state: PhaseState) -> PhaseState:
    return PhaseState(state.x, -state.v)


def integrate(x, v, grad, target: TargetModel, epsilon: float, num_steps: int,
              counter: EvalCounter | None = None):
    """Run ``num_steps`` velocity-Verlet steps from ``(x, v)``.

    ``grad`` is the gradient at ``x``; the gradient at the returned position
    comes back as the third element so consecutive trajectories can chain
    without re-evaluating it.
    """
    half = 0.5 * epsilon
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(num_steps):
            v = v - half * grad
            x = x + epsilon * v
            grad = evaluate_gradient(target, x, counter)
            v = v - half * grad
    return x, v, grad


def leapfrog_step(state: PhaseState, target: TargetModel, epsilon: float,
                  counter: EvalCounter | None = None) -> PhaseState:
    g = evaluate_gradient(target, state.x, counter)
    x, v, _ = integrate(state.x, state.v, g, target, epsilon, 1, counter)
    return PhaseState(x, v)


def leapfrog(state: PhaseState, target: TargetModel, params: LeapfrogParams,
             counter: EvalCounter | None = None) -> PhaseState:
    """``M`` leapfrog steps; costs ``M + 1`` gradient evaluations."""
    g = evaluate_gradient(target, state.x, counter)
    x, v, _ = integrate(state.x, state.v, g, target, params.epsilon, params.num_steps, counter)
    return PhaseState(x, v)


def _check_beta(beta: float) -> None:
    if not 0.0 <= beta <= 1.0:
        raise ContractError(f"beta must lie in [0, 1], got {beta}")


def mix_momentum(state: PhaseState, beta: float, noise: np.ndarray) -> PhaseState:
    """Deterministic half of :func:`randomize_momentum` given the normal draws."""
    _check_beta(beta)
    if beta == 0.0:
        return state
    if beta == 1.0:
        return PhaseState(state.x, np.array(noise, dtype=float, copy=True))
    return PhaseState(state.x, state.v * np.sqrt(1.0 - beta) + noise * np.sqrt(beta))


def randomize_momentum(state: PhaseState, beta: float, rng) -> PhaseState:
    """``v' = v sqrt(1 - beta) + n sqrt(beta)`` with ``n ~ N(0, I)`` from ``rng``."""
    _check_beta(beta)
    return mix_momentum(state, beta, rng.standard_normal(state.x.shape))


def beta_from_alpha(alpha: float, epsilon: float, num_steps: int) -> float:
    """Refresh rate that randomizes a fraction ``alpha`` per unit simulation time."""
    if not 0.0 < alpha <= 1.0:
        raise ContractError(f"alpha must lie in (0, 1], got {alpha}")
    LeapfrogParams(epsilon, num_steps)
    return float(alpha ** (1.0 / (epsilon * num_steps)))
