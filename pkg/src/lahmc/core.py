"""Phase-space state, target interface and energy bookkeeping.

States may carry a leading batch axis: ``x`` and ``v`` have shape ``(..., N)``
and every target evaluates energies row-wise over the last axis. A batch of
independent chains is therefore just a ``PhaseState`` with ``x.shape == (C, N)``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np


class ContractError(ValueError):
    """Raised when an operation is called outside its documented domain."""


@dataclass(frozen=True)
class PhaseState:
    """Position ``x`` and momentum ``v`` of one or more chains."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim == 0 or x.shape != v.shape or x.shape[-1] < 1:
            raise ContractError(
                f"position and momentum shapes must match, got {x.shape} and {v.shape}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.x.shape[-1]

    @property
    def batch_shape(self) -> tuple:
        return self.x.shape[:-1]

    @property
    def n_states(self) -> int:
        return int(np.prod(self.batch_shape, dtype=int))

    def is_finite(self):
        """Row-wise finiteness; non-finite rows are divergent."""
        return np.isfinite(self.x).all(axis=-1) & np.isfinite(self.v).all(axis=-1)


@dataclass
class EvalCounter:
    """Running count of per-state energy and gradient evaluations."""

    energy_evals: int = 0
    gradient_evals: int = 0

    def tick(self, energy: int = 0, gradient: int = 0) -> None:
        self.energy_evals += int(energy)
        self.gradient_evals += int(gradient)


class TargetModel(ABC):
    """Unnormalized density ``p(x) ∝ exp(-E(x))`` with a hand-coded gradient.

    Subclasses set ``dim`` and implement :meth:`energy` and :meth:`gradient`
    over the last axis of ``x``. Targets with closed-form sampling override
    :meth:`exact_sample`. Implementations must be stateless.
    """

    dim: int
    name: str = "target"

    @abstractmethod
    def energy(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        ...

    def energy_and_gradient(self, x: np.ndarray):
        return self.energy(x), self.gradient(x)

    @property
    def has_exact_sampler(self) -> bool:
        return type(self).exact_sample is not TargetModel.exact_sample

    def exact_sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no exact sampler")

    def _check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise ContractError(f"expected trailing dimension {self.dim}, got shape {x.shape}")
        return x


def _count(x: np.ndarray) -> int:
    return int(np.prod(x.shape[:-1], dtype=int))


def evaluate_energy(target: TargetModel, x, counter: EvalCounter | None = None):
    if counter is not None:
        counter.tick(energy=_count(np.asarray(x)))
    return target.energy(x)


def evaluate_gradient(target: TargetModel, x, counter: EvalCounter | None = None):
    if counter is not None:
        counter.tick(gradient=_count(np.asarray(x)))
    return target.gradient(x)


def kinetic_energy(v: np.ndarray) -> np.ndarray:
    return 0.5 * np.einsum("...i,...i->...", v, v)


def joint_energy(state: PhaseState, target: TargetModel, counter: EvalCounter | None = None):
    """Hamiltonian ``E(x) + v·v/2``.

    Non-finite values are returned as is; downstream they mean zero density.
    """
    if state.dim != target.dim:
        raise ContractError(f"state dimension {state.dim} != target dimension {target.dim}")
    with np.errstate(over="ignore", invalid="ignore"):
        h = evaluate_energy(target, state.x, counter) + kinetic_energy(state.v)
    return h[()] if isinstance(h, np.ndarray) and h.ndim == 0 else h


def log_prob_ratio(s1: PhaseState, s2: PhaseState, target: TargetModel,
                   counter: EvalCounter | None = None):
    """``log p(s1) - log p(s2) = H(s2) - H(s1)``; the normalizer never appears."""
    with np.errstate(invalid="ignore"):
        return joint_energy(s2, target, counter) - joint_energy(s1, target, counter)


def gradient_check(target: TargetModel, x: np.ndarray, step: float = 1e-5) -> float:
    """Largest relative error between ``target.gradient`` and central differences at ``x``.

    The error of each component is scaled by ``max(1, |g_i|)``.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(target.gradient(x), dtype=float)
    fd = np.empty_like(g)
    for i in range(target.dim):
        e = np.zeros(target.dim)
        e[i] = step
        fd[..., i] = (target.energy(x + e) - target.energy(x - e)) / (2 * step)
    return float(np.max(np.abs(fd - g) / np.maximum(1.0, np.abs(g))))
