"""Running batches of chains with per-chain deterministic random streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, EvalCounter, PhaseState, TargetModel
from .sampler import SamplerConfig, get_kernel

_MASK64 = (1 << 64) - 1
# per-chain refill buffers hold at most this many floats each
_BUFFER_FLOATS = 1 << 22
BURN_IN_WITHOUT_EXACT_SAMPLER = 1000


def splitmix64(i: int) -> int:
    z = (int(i) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def chain_seed(seed: int, chain: int) -> int:
    """Seed of chain ``chain``: ``seed XOR splitmix64(chain)``."""
    return (int(seed) & _MASK64) ^ splitmix64(chain)


class ChainStreams:
    """Independent generators per chain, vectorized for batched kernels.

    Chain ``c`` owns three generators spawned from ``chain_seed(seed, c)``
    (initial state, uniforms, normals), so its draws do not depend on how many
    other chains share the batch. Draws are prefetched in blocks. The object
    quacks like a ``numpy.random.Generator`` for the two calls kernels make.
    """

    def __init__(self, seed: int, n_chains: int, dim: int, block: int | None = None):
        if n_chains < 1 or dim < 1:
            raise ContractError("need at least one chain and one dimension")
        self.seed, self.n_chains, self.dim = int(seed), int(n_chains), int(dim)
        self.block = block or int(np.clip(_BUFFER_FLOATS // (n_chains * dim), 1, 1024))
        children = [np.random.SeedSequence(chain_seed(seed, c)).spawn(3) for c in range(n_chains)]
        self._init = [np.random.default_rng(ch[0]) for ch in children]
        self._uniform = [np.random.default_rng(ch[1]) for ch in children]
        self._normal = [np.random.default_rng(ch[2]) for ch in children]
        self._u = self._z = None
        self._u_pos = self._z_pos = self.block

    def random(self, size):
        if tuple(np.atleast_1d(size)) != (self.n_chains,):
            raise ContractError(f"expected uniform draw of shape ({self.n_chains},), got {size}")
        if self._u_pos == self.block:
            self._u = np.stack([g.random(self.block) for g in self._uniform], axis=1)
            self._u_pos = 0
        out = self._u[self._u_pos]
        self._u_pos += 1
        return out

    def standard_normal(self, size):
        if tuple(np.atleast_1d(size)) != (self.n_chains, self.dim):
            raise ContractError(f"expected normal draw of shape ({self.n_chains}, {self.dim}), got {size}")
        if self._z_pos == self.block:
            self._z = np.stack([g.standard_normal((self.block, self.dim)) for g in self._normal], axis=1)
            self._z_pos = 0
        out = self._z[self._z_pos]
        self._z_pos += 1
        return out

    def initial_state(self, target: TargetModel) -> PhaseState:
        """Start at an exact sample when the target has one, else its ``initial_sample``."""
        if target.has_exact_sampler:
            draw = target.exact_sample
        elif hasattr(target, "initial_sample"):
            draw = target.initial_sample
        else:
            raise ContractError(f"{target!r} has neither exact_sample nor initial_sample")
        x = np.stack([draw(g) for g in self._init])
        v = np.stack([g.standard_normal(self.dim) for g in self._init])
        return PhaseState(x, v)


def default_burn_in(target: TargetModel) -> int:
    return 0 if target.has_exact_sampler else BURN_IN_WITHOUT_EXACT_SAMPLER


@dataclass
class ChainRecord:
    """Trace of a batch of chains.

    ``samples`` is ``(T, C, N)`` with ``T = n_steps // thin``; ``outcomes`` and
    ``cumulative_grad_evals`` are ``(T, C)`` and aligned with it.
    ``outcome_counts[c, k]`` counts outcome code ``k`` over every step.
    """

    samples: np.ndarray | None
    outcomes: np.ndarray
    cumulative_grad_evals: np.ndarray
    outcome_counts: np.ndarray
    n_steps: int
    thin: int = 1
    final_state: PhaseState | None = None

    @property
    def n_chains(self) -> int:
        return self.outcome_counts.shape[0]

    @property
    def total_grad_evals(self) -> int:
        return int(self.cumulative_grad_evals[-1].sum()) if len(self.cumulative_grad_evals) else 0


class ChainRecorder:
    """Default recorder: keeps every ``thin``-th step, counts every outcome."""

    def __init__(self, n_steps: int, n_chains: int, dim: int, max_leaps: int,
                 thin: int = 1, store_samples: bool = True, dtype=float):
        if thin < 1:
            raise ContractError("thin must be >= 1")
        self.n_steps, self.thin = n_steps, thin
        n_rec = n_steps // thin
        self.samples = np.empty((n_rec, n_chains, dim), dtype=dtype) if store_samples else None
        self.outcomes = np.empty((n_rec, n_chains), dtype=np.int8)
        self.cum = np.empty((n_rec, n_chains), dtype=np.int64)
        self.counts = np.zeros((n_chains, max_leaps + 1), dtype=np.int64)
        self._chain_idx = np.arange(n_chains)

    def __call__(self, step: int, x, kind, cumulative_grad_evals) -> None:
        self.counts[self._chain_idx, kind] += 1
        if (step + 1) % self.thin:
            return
        row = (step + 1) // self.thin - 1
        if self.samples is not None:
            self.samples[row] = x
        self.outcomes[row] = kind
        self.cum[row] = cumulative_grad_evals

    def finish(self, final_state=None) -> ChainRecord:
        return ChainRecord(self.samples, self.outcomes, self.cum, self.counts,
                           self.n_steps, self.thin, final_state)


def run_chain(target: TargetModel, kernel, config: SamplerConfig, n_steps: int,
              init: PhaseState, recorder=None, burn_in: int = 0, streams=None,
              counter: EvalCounter | None = None):
    """Iterate ``kernel`` (``"hmc"``, ``"lahmc"`` or a step function) from ``init``.

    ``init`` may hold one chain ``(N,)`` or a batch ``(C, N)``. Randomness comes
    from :class:`ChainStreams` seeded by ``config.seed`` unless ``streams`` is
    given. Burn-in steps are neither recorded nor charged to the counters in
    the record. Returns ``recorder.finish(final_state)``.
    """
    if n_steps < 1:
        raise ContractError("n_steps must be >= 1")
    step = get_kernel(kernel) if isinstance(kernel, str) else kernel
    state = init if init.x.ndim == 2 else PhaseState(init.x[None, :], init.v[None, :])
    n_chains, dim = state.x.shape
    if streams is None:
        streams = ChainStreams(config.seed, n_chains, dim)
    if recorder is None:
        recorder = ChainRecorder(n_steps, n_chains, dim, config.max_leaps)
    for _ in range(burn_in):
        state, _ = step(state, target, config, streams)
    cum = np.zeros(n_chains, dtype=np.int64)
    for t in range(n_steps):
        state, outcome = step(state, target, config, streams, counter)
        cum += outcome.grad_evals
        recorder(t, state.x, outcome.kind, cum)
    return recorder.finish(state)


def sample_chains(target: TargetModel, kernel, config: SamplerConfig, n_chains: int,
                  n_steps: int, burn_in: int | None = None, thin: int = 1,
                  store_samples: bool = True, dtype=float) -> ChainRecord:
    """Start ``n_chains`` chains from the target's default initialization and run them."""
    streams = ChainStreams(config.seed, n_chains, target.dim)
    init = streams.initial_state(target)
    recorder = ChainRecorder(n_steps, n_chains, target.dim, config.max_leaps,
                             thin=thin, store_samples=store_samples, dtype=dtype)
    burn_in = default_burn_in(target) if burn_in is None else burn_in
    return run_chain(target, kernel, config, n_steps, init, recorder=recorder,
                     burn_in=burn_in, streams=streams)
