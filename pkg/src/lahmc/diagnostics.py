"""Mixing diagnostics: pooled autocorrelation, evaluations-to-threshold, outcome fractions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .chain import ChainRecord, sample_chains
from .core import ContractError
from .sampler import SamplerConfig, outcome_label

# complex scratch space used per FFT chunk
_FFT_FLOATS = 1 << 23


@dataclass
class AutocorrCurve:
    lags: np.ndarray
    values: np.ndarray
    evals_axis: np.ndarray
    degenerate: bool = False


def _as_records(records) -> list:
    if isinstance(records, ChainRecord):
        return [records]
    records = list(records)
    if not records:
        raise ContractError("need at least one chain record")
    return records


def _autocov_sums(samples: np.ndarray, mean: np.ndarray, max_lag: int) -> np.ndarray:
    """``sum_{c,d} sum_t y(t) y(t+τ)`` for ``τ = 0..max_lag`` with ``y = x - mean``."""
    n = samples.shape[0]
    cols = samples.reshape(n, -1)
    mean = np.broadcast_to(mean, samples.shape[1:]).reshape(-1)
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    chunk = max(1, _FFT_FLOATS // nfft)
    total = np.zeros(max_lag + 1)
    for start in range(0, cols.shape[1], chunk):
        y = cols[:, start:start + chunk] - mean[start:start + chunk]
        spec = np.fft.rfft(y, n=nfft, axis=0)
        power = (spec.real**2 + spec.imag**2).sum(axis=1)
        total += np.fft.irfft(power, n=nfft)[: max_lag + 1]
    return total


def autocorrelation(records, max_lag: int, normalization: str = "pairs") -> AutocorrCurve:
    """Pooled autocorrelation of the recorded positions.

    The per-dimension mean is pooled over all chains and steps, and lagged
    products are summed over chains, dimensions and time. ``normalization``
    ``"pairs"`` divides each lag by its number of products before taking the
    ratio to lag zero; ``"biased"`` divides every lag by the full length.
    Lags count recorded samples; ``evals_axis`` converts them to mean gradient
    evaluations per chain.
    """
    records = _as_records(records)
    if normalization not in ("pairs", "biased"):
        raise ContractError(f"unknown normalization {normalization!r}")
    if any(r.samples is None for r in records):
        raise ContractError("records were made without stored samples")
    thin = records[0].thin
    if any(r.thin != thin for r in records):
        raise ContractError("records must share the same thinning")
    n_rec = min(r.samples.shape[0] for r in records)
    if not 0 <= max_lag < n_rec:
        raise ContractError(f"max_lag must lie in [0, {n_rec - 1}], got {max_lag}")

    weight = sum(r.samples.shape[0] * r.n_chains for r in records)
    mean = sum(r.samples.sum(axis=(0, 1), dtype=float) for r in records) / weight
    lags = np.arange(max_lag + 1)
    sums = np.zeros(max_lag + 1)
    pairs = np.zeros(max_lag + 1)
    for r in records:
        sums += _autocov_sums(r.samples, mean, max_lag)
        pairs += r.n_chains * (r.samples.shape[0] - lags)

    total_steps = sum(r.n_steps * r.n_chains for r in records)
    per_step = sum(r.total_grad_evals for r in records) / total_steps
    evals_axis = lags * thin * per_step

    if not sums[0] > 0:
        values = np.full(max_lag + 1, np.nan)
        values[0] = 1.0
        return AutocorrCurve(lags, values, evals_axis, degenerate=True)
    if normalization == "pairs":
        values = (sums / pairs) / (sums[0] / pairs[0])
    else:
        values = sums / sums[0]
    return AutocorrCurve(lags, values, evals_axis)


def evals_to_threshold(curve: AutocorrCurve, threshold: float = 0.5) -> float:
    """Gradient evaluations at the first crossing of ``threshold``, linearly interpolated.

    Returns ``inf`` if the curve never reaches the threshold.
    """
    if not 0.0 < threshold < 1.0:
        raise ContractError("threshold must lie in (0, 1)")
    if curve.degenerate:
        return math.inf
    below = np.flatnonzero(curve.values <= threshold)
    if below.size == 0:
        return math.inf
    k = int(below[0])
    if k == 0:
        return float(curve.evals_axis[0])
    v0, v1 = curve.values[k - 1], curve.values[k]
    e0, e1 = curve.evals_axis[k - 1], curve.evals_axis[k]
    return float(e0 + (v0 - threshold) / (v0 - v1) * (e1 - e0))


def transition_fractions(records) -> dict:
    """Fraction of steps ending in each outcome, keyed ``"F", "L1", ..., "LK"``."""
    records = _as_records(records)
    width = max(r.outcome_counts.shape[1] for r in records)
    counts = np.zeros(width, dtype=np.int64)
    for r in records:
        counts[: r.outcome_counts.shape[1]] += r.outcome_counts.sum(axis=0)
    total = counts.sum()
    if total == 0:
        raise ContractError("records contain no transitions")
    return {outcome_label(k): counts[k] / total for k in range(width)}


def mixing_time(target, kernel, config: SamplerConfig, n_steps: int, n_chains: int,
                max_lag: int | None = None, threshold: float = 0.5, burn_in: int | None = None,
                thin: int = 1, normalization: str = "pairs", max_steps: int | None = None,
                max_rows: int = 2048, lag_fraction: float = 1 / 3):
    """Run chains and return ``(evals_to_threshold, curve)``.

    With ``max_steps`` set, the run length doubles (restarting from the same
    seed) until the crossing falls within the first ``lag_fraction`` of the
    recorded lags or ``max_steps`` is reached; thinning then grows so that at
    most ``max_rows`` samples per chain are stored.
    """
    steps = n_steps
    while True:
        step_thin = thin if max_steps is None else max(thin, -(-steps // max_rows))
        record = sample_chains(target, kernel, config, n_chains, steps, burn_in=burn_in, thin=step_thin)
        n_rec = record.samples.shape[0]
        lag = n_rec - 1 if max_lag is None else min(max_lag, n_rec - 1)
        curve = autocorrelation(record, lag, normalization)
        value = evals_to_threshold(curve, threshold)
        if max_steps is None or steps >= max_steps:
            return value, curve
        below = np.flatnonzero(curve.values <= threshold)
        if below.size and below[0] <= lag_fraction * n_rec:
            return value, curve
        steps = min(2 * steps, max_steps)


@dataclass
class GridResult:
    epsilons: np.ndarray
    axis: str
    axis_values: np.ndarray
    values: np.ndarray
    kernel: str = ""


GRID_AXES = {"beta": "beta", "M": "num_steps"}


def grid_search(target, kernel, epsilons, axis: str, axis_values, base_config: SamplerConfig,
                n_steps: int, n_chains: int, max_lag: int | None = None, threshold: float = 0.5,
                burn_in: int | None = None, thin: int = 1, normalization: str = "pairs",
                max_steps: int | None = None, progress=None) -> GridResult:
    """Evaluations to ``threshold`` over ``epsilons x axis_values``.

    ``axis`` is ``"beta"`` or ``"M"``; everything else comes from
    ``base_config``. Cells that never cross hold ``inf``. ``max_steps``
    enables the adaptive run length of :func:`mixing_time`.
    """
    if axis not in GRID_AXES:
        raise ContractError(f"grid axis must be one of {sorted(GRID_AXES)}, got {axis!r}")
    epsilons = np.asarray(epsilons, dtype=float)
    axis_values = np.asarray(axis_values, dtype=float)
    if epsilons.size == 0 or axis_values.size == 0:
        raise ContractError("grid must be non-empty")
    values = np.empty((epsilons.size, axis_values.size))
    for i, eps in enumerate(epsilons):
        for j, val in enumerate(axis_values):
            val = int(val) if axis == "M" else float(val)
            config = replace(base_config, epsilon=float(eps), **{GRID_AXES[axis]: val})
            values[i, j], _ = mixing_time(target, kernel, config, n_steps, n_chains, max_lag,
                                          threshold, burn_in, thin, normalization, max_steps)
            if progress is not None:
                progress(i, j, values[i, j])
    name = kernel if isinstance(kernel, str) else getattr(kernel, "__name__", "")
    return GridResult(epsilons, axis, axis_values, values, name)
