"""Benchmark recipes: outcome-fraction table, autocorrelation curves, hyperparameter grids."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chain import sample_chains
from .diagnostics import autocorrelation, evals_to_threshold, transition_fractions
from .sampler import SamplerConfig
from .targets import get_target, target_label

TABLE_TARGETS = ("gauss2d", "gauss100d", "rough-well")
TABLE_SAMPLERS = ("hmc", "lahmc")
TABLE_BETAS = (1.0, 0.1)
OUTCOME_COLUMNS = ("F", "L1", "L2", "L3", "L4")

# (target, sampler, beta) -> fractions for F, L, L^2, L^3, L^4 as published
PUBLISHED_FRACTIONS = {
    ("gauss2d", "hmc", 1.0): (0.079, 0.921, 0, 0, 0),
    ("gauss2d", "lahmc", 1.0): (0.000, 0.921, 0.035, 0.044, 0.000),
    ("gauss2d", "hmc", 0.1): (0.080, 0.920, 0, 0, 0),
    ("gauss2d", "lahmc", 0.1): (0.000, 0.921, 0.035, 0.044, 0.000),
    ("gauss100d", "hmc", 1.0): (0.147, 0.853, 0, 0, 0),
    ("gauss100d", "lahmc", 1.0): (0.047, 0.852, 0.059, 0.035, 0.006),
    ("gauss100d", "hmc", 0.1): (0.147, 0.853, 0, 0, 0),
    ("gauss100d", "lahmc", 0.1): (0.047, 0.852, 0.059, 0.035, 0.006),
    ("rough-well", "hmc", 1.0): (0.446, 0.554, 0, 0, 0),
    ("rough-well", "lahmc", 1.0): (0.292, 0.554, 0.099, 0.036, 0.019),
    ("rough-well", "hmc", 0.1): (0.446, 0.554, 0, 0, 0),
    ("rough-well", "lahmc", 0.1): (0.292, 0.554, 0.100, 0.036, 0.019),
}

# default grid axes for mixing-time searches
DEFAULT_EPSILONS = np.logspace(np.log10(0.05), np.log10(2.0), 10)
DEFAULT_BETAS = np.logspace(np.log10(0.02), 0.0, 10)
DEFAULT_MS = np.array([1, 2, 5, 10, 20, 50])


@dataclass
class TableRow:
    target: str
    sampler: str
    beta: float
    fractions: dict

    @property
    def label(self) -> str:
        return f"{target_label(self.target)}, {self.sampler.upper()}, beta={self.beta:g}"


def transition_table(base: SamplerConfig, n_steps: int = 20_000, n_chains: int = 10,
                     targets=TABLE_TARGETS, samplers=TABLE_SAMPLERS, betas=TABLE_BETAS,
                     progress=None, burn_in: int | None = None) -> list:
    """Outcome fractions for every (target, sampler, beta) combination."""
    rows = []
    for name in targets:
        target = get_target(name)
        for sampler in samplers:
            for beta in betas:
                config = replace(base, beta=float(beta))
                if sampler == "hmc":
                    config = replace(config, max_leaps=1)
                record = sample_chains(target, sampler, config, n_chains, n_steps, burn_in=burn_in,
                                       store_samples=False)
                fractions = transition_fractions(record)
                fractions = {c: float(fractions.get(c, 0.0)) for c in OUTCOME_COLUMNS}
                row = TableRow(name, sampler, float(beta), fractions)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


AUTOCORR_VARIANTS = (("hmc", 1.0), ("lahmc", 1.0), ("hmc", 0.1), ("lahmc", 0.1))


def autocorr_variants(target_name: str, base: SamplerConfig, n_steps: int, n_chains: int,
                      max_lag: int, thin: int = 1, variants=AUTOCORR_VARIANTS,
                      normalization: str = "pairs", threshold: float = 0.5,
                      burn_in: int | None = None):
    """Autocorrelation curve and evaluations-to-threshold for each (sampler, beta) variant."""
    target = get_target(target_name)
    out = {}
    for sampler, beta in variants:
        config = replace(base, beta=float(beta))
        record = sample_chains(target, sampler, config, n_chains, n_steps, burn_in=burn_in, thin=thin)
        curve = autocorrelation(record, max_lag, normalization)
        out[(sampler, float(beta))] = (curve, evals_to_threshold(curve, threshold))
    return out
