"""HMC and Look Ahead HMC transition kernels.

Outcome codes: ``0`` is a momentum flip, ``a >= 1`` is a move to the ``a``-th
rung ``L^a ζ`` of the trajectory ladder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ContractError, EvalCounter, PhaseState, TargetModel, evaluate_gradient, kinetic_energy
from .integrator import LeapfrogParams, integrate, mix_momentum

FLIP = 0


@dataclass(frozen=True)
class SamplerConfig:
    epsilon: float = 1.0
    num_steps: int = 10
    max_leaps: int = 4
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        LeapfrogParams(self.epsilon, self.num_steps)
        if int(self.max_leaps) != self.max_leaps or self.max_leaps < 1:
            raise ContractError(f"max_leaps must be a positive integer, got {self.max_leaps}")
        if not 0.0 <= self.beta <= 1.0:
            raise ContractError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0 <= int(self.seed) < 2**64:
            raise ContractError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def leapfrog(self) -> LeapfrogParams:
        return LeapfrogParams(self.epsilon, self.num_steps)


@dataclass
class TransitionOutcome:
    """Outcome code per chain and gradient cost of the step (``M`` per computed rung)."""

    kind: np.ndarray
    grad_evals: np.ndarray

    @property
    def is_flip(self):
        return self.kind == FLIP


def outcome_label(kind: int) -> str:
    return "F" if kind == FLIP else f"L{int(kind)}"


@dataclass
class TrajectoryLadder:
    """Forward rungs ``L^a ζ`` of one chain with their joint energies."""

    states: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.states) - 1


# ---------------------------------------------------------------------------
# transition probabilities on the ladder

def _sanitize(energies):
    h = np.asarray(energies, dtype=float)
    return np.where(np.isnan(h), np.inf, h)


class _LadderRecursion:
    """Memoized ``P(i, j)``: probability that the state at ladder index ``i``
    leaps ``|j - i|`` rungs towards index ``j``.

    The state at index ``j`` reached from ``i`` and flipped starts its own
    ladder walking back towards ``i``, so both cumulative sums in the greedy
    rule use the forward energies only.
    """

    def __init__(self, energies):
        self.h = _sanitize(energies)
        self.memo = {}

    def cumulative(self, i, j):
        """``sum_{b < |j-i|} P(i, i + b*sign)``."""
        s = 1 if j > i else -1
        total = 0.0
        for b in range(1, abs(j - i)):
            total = total + self(i, i + s * b)
        return total

    def __call__(self, i, j):
        key = (i, j)
        if key in self.memo:
            return self.memo[key]
        h_i, h_j = self.h[i], self.h[j]
        fwd = 1.0 - self.cumulative(i, j)
        rev = np.maximum(1.0 - self.cumulative(j, i), 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            log_gain = np.where(np.isinf(h_j), -np.inf, h_i - h_j)
            log_rhs = log_gain + np.log(rev)
            log_rhs = np.where(np.isnan(log_rhs), -np.inf, log_rhs)
        p = np.clip(np.minimum(fwd, np.exp(np.minimum(log_rhs, 0.0))), 0.0, 1.0)
        self.memo[key] = p
        return p


def _scalar(p):
    return float(p) if np.ndim(p) == 0 else p


def leap_probabilities(energies) -> list:
    """``[π_{L^1}, ..., π_{L^A}]`` for a ladder with energies ``H_0..H_A``.

    ``energies`` may carry trailing batch axes (shape ``(A+1, ...)``).
    """
    rec = _LadderRecursion(energies)
    return [_scalar(rec(0, a)) for a in range(1, len(rec.h))]


def ladder_probabilities(energies, a: int):
    """``π_{L^a}`` from the forward energies ``H_0..H_a`` of the ladder."""
    if a < 1:
        raise ContractError(f"rung index must be >= 1, got {a}")
    if len(energies) < a + 1:
        raise ContractError(f"need {a + 1} energies for rung {a}, got {len(energies)}")
    return _scalar(_LadderRecursion(energies)(0, a))


def pi_flip(energies, K: int):
    """Probability left over for the momentum flip after ``K`` rungs."""
    if len(energies) < K + 1:
        raise ContractError(f"need {K + 1} energies, got {len(energies)}")
    probs = leap_probabilities(np.asarray(energies, dtype=float)[: K + 1])
    return _scalar(np.clip(1.0 - sum(probs), 0.0, 1.0))


# ---------------------------------------------------------------------------
# kernels

def _as_batch(state: PhaseState):
    if state.x.ndim == 1:
        return state.x[None, :], state.v[None, :], True
    if state.x.ndim != 2:
        raise ContractError("kernels accept states of shape (N,) or (chains, N)")
    return state.x, state.v, False


def _check_entry(x, v, target):
    if x.shape[-1] != target.dim:
        raise ContractError(f"state dimension {x.shape[-1]} != target dimension {target.dim}")
    if not (np.isfinite(x).all() and np.isfinite(v).all()):
        raise ContractError("kernel entry state must be finite")


def _joint(target, x, v, counter):
    if counter is not None:
        counter.tick(energy=x.shape[0])
    with np.errstate(over="ignore", invalid="ignore"):
        return target.energy(x) + kinetic_energy(v)


def _finish(x, v, kind, cost, single):
    if single:
        return PhaseState(x[0], v[0]), TransitionOutcome(kind[0], cost[0])
    return PhaseState(x, v), TransitionOutcome(kind, cost)


def lahmc_transition(state: PhaseState, target: TargetModel, config: SamplerConfig, u,
                     counter: EvalCounter | None = None):
    """Ladder move without the momentum refresh, driven by uniforms ``u``.

    Rungs are integrated lazily: a chain only computes ``L^a ζ`` while all
    lower rungs have been declined.
    """
    x0, v0, single = _as_batch(state)
    _check_entry(x0, v0, target)
    n_chains = x0.shape[0]
    u = np.broadcast_to(np.asarray(u, dtype=float), (n_chains,))
    K, M, eps = config.max_leaps, config.num_steps, config.epsilon

    energies = np.full((K + 1, n_chains), np.nan)
    energies[0] = _joint(target, x0, v0, counter)
    new_x, new_v = x0.copy(), -v0
    kind = np.zeros(n_chains, dtype=np.int64)
    rungs = np.zeros(n_chains, dtype=np.int64)

    active = np.arange(n_chains)
    xs, vs = x0, v0
    gs = evaluate_gradient(target, xs, counter)
    for a in range(1, K + 1):
        xs, vs, gs = integrate(xs, vs, gs, target, eps, M, counter)
        rungs[active] = a
        energies[a, active] = _joint(target, xs, vs, counter)
        cum = sum(leap_probabilities(energies[: a + 1, active]))
        take = u[active] < cum
        if take.any():
            idx = active[take]
            new_x[idx], new_v[idx], kind[idx] = xs[take], vs[take], a
            keep = ~take
            active, xs, vs, gs = active[keep], xs[keep], vs[keep], gs[keep]
        if active.size == 0:
            break
    return _finish(new_x, new_v, kind, rungs * M, single)


def hmc_transition(state: PhaseState, target: TargetModel, config: SamplerConfig, u,
                   counter: EvalCounter | None = None):
    """Metropolis accept/reject of ``F L ζ`` followed by a flip: ``L ζ`` or ``F ζ``."""
    x0, v0, single = _as_batch(state)
    _check_entry(x0, v0, target)
    n_chains = x0.shape[0]
    u = np.broadcast_to(np.asarray(u, dtype=float), (n_chains,))
    h0 = _joint(target, x0, v0, counter)
    g0 = evaluate_gradient(target, x0, counter)
    x1, v1, _ = integrate(x0, v0, g0, target, config.epsilon, config.num_steps, counter)
    # F L ζ has the same energy as L ζ
    h1 = _joint(target, x1, v1, counter)
    with np.errstate(invalid="ignore", over="ignore"):
        log_accept = np.where(np.isfinite(h1), h0 - h1, -np.inf)
        p_accept = np.exp(np.minimum(log_accept, 0.0))
    accept = u < p_accept
    new_x = np.where(accept[:, None], x1, x0)
    new_v = np.where(accept[:, None], v1, -v0)
    kind = accept.astype(np.int64)
    cost = np.full(n_chains, config.num_steps, dtype=np.int64)
    return _finish(new_x, new_v, kind, cost, single)


def _step(transition, state, target, config, rng, counter):
    u = rng.random(state.batch_shape)
    noise = rng.standard_normal(state.x.shape)
    moved, outcome = transition(state, target, config, u, counter)
    return mix_momentum(moved, config.beta, noise), outcome


def lahmc_step(state: PhaseState, target: TargetModel, config: SamplerConfig, rng,
               counter: EvalCounter | None = None):
    """One LAHMC step: ladder transition then ``R(beta)``.

    ``rng`` needs ``random`` and ``standard_normal``; one uniform per chain is
    drawn before any rung is computed, then one normal vector per chain.
    """
    return _step(lahmc_transition, state, target, config, rng, counter)


def hmc_step(state: PhaseState, target: TargetModel, config: SamplerConfig, rng,
             counter: EvalCounter | None = None):
    """One standard HMC step with the same random-draw layout as :func:`lahmc_step`."""
    return _step(hmc_transition, state, target, config, rng, counter)


KERNELS = {"hmc": hmc_step, "lahmc": lahmc_step}


def get_kernel(name: str):
    try:
        return KERNELS[name]
    except KeyError:
        raise ContractError(f"unknown sampler {name!r}; expected one of {sorted(KERNELS)}") from None


def build_ladder(state: PhaseState, target: TargetModel, config: SamplerConfig,
                 depth: int | None = None) -> TrajectoryLadder:
    """Materialize ``L^0 ζ .. L^depth ζ`` for a single chain (diagnostic helper)."""
    depth = config.max_leaps if depth is None else depth
    ladder = TrajectoryLadder()
    x, v = state.x, state.v
    g = target.gradient(x)
    for a in range(depth + 1):
        if a:
            x, v, g = integrate(x, v, g, target, config.epsilon, config.num_steps)
        s = PhaseState(x, v)
        ladder.states.append(s)
        with np.errstate(over="ignore", invalid="ignore"):
            ladder.energies.append(float(target.energy(x) + kinetic_energy(v)))
    return ladder
