"""Literal evaluation of the look-ahead transition probabilities.

Every reverse state ``F L^a ζ`` is built by actually integrating and flipping,
and its own probabilities are obtained by recursing on that state. The cost is
exponential in ``a``; this exists to cross-check :mod:`lahmc.sampler`.
"""

from __future__ import annotations

import math

from .core import ContractError, PhaseState, TargetModel, joint_energy
from .integrator import flip, leapfrog
from .sampler import SamplerConfig

MAX_ORACLE_DEPTH = 5


def _energy(state, target):
    h = float(joint_energy(state, target))
    return math.inf if math.isnan(h) else h


def pi_bruteforce(state: PhaseState, target: TargetModel, config: SamplerConfig, a: int) -> float:
    if state.x.ndim != 1:
        raise ContractError("the oracle works on a single unbatched state")
    if not 1 <= a <= min(config.max_leaps, MAX_ORACLE_DEPTH):
        raise ContractError(f"rung {a} outside 1..min(K, {MAX_ORACLE_DEPTH})")
    params = config.leapfrog

    def pi(z: PhaseState, rung: int) -> float:
        forward_left = 1.0 - sum(pi(z, b) for b in range(1, rung))
        end = z
        for _ in range(rung):
            end = leapfrog(end, target, params)
        reverse = flip(end)
        reverse_left = 1.0 - sum(pi(reverse, b) for b in range(1, rung))
        h_z, h_rev = _energy(z, target), _energy(reverse, target)
        if math.isinf(h_rev):
            ratio = 0.0
        elif math.isinf(h_z):
            ratio = math.inf
        else:
            ratio = math.exp(min(h_z - h_rev, 700.0))
        bound = 0.0 if reverse_left <= 0.0 else ratio * reverse_left
        return min(max(min(forward_left, bound), 0.0), 1.0)

    return pi(state, a)
