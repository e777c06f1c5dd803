"""Command-line front end.

Subcommands ``sample``, ``table``, ``autocorr`` and ``gridsearch`` write CSV to
``--output`` (stdout by default). ``--config`` names a JSON file whose keys are
the long flag names (``epsilon``, ``M``, ``max_lag``, ...); flags given on the
command line win over the file. Exit codes: 0 success, 2 invalid arguments,
1 runtime failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

import numpy as np

from . import experiments
from .chain import sample_chains
from .core import ContractError
from .diagnostics import grid_search
from .integrator import beta_from_alpha
from .sampler import SamplerConfig, outcome_label
from .targets import get_target, standard_targets

COMMON_DEFAULTS = dict(
    target="gauss2d", sampler="lahmc", epsilon=1.0, M=10, K=4, beta=None, alpha=None,
    steps=1000, chains=1, seed=0, max_lag=None, thin=1, burn_in=None, output="-",
)
COMMAND_DEFAULTS = {
    "sample": {},
    "table": dict(target=None, steps=20_000, chains=10),
    "autocorr": dict(steps=20_000, chains=10),
    "gridsearch": dict(target="gauss2d-grid", steps=20_000, chains=10, axes="eps-beta",
                       epsilons=None, betas=None, Ms=None, threshold=0.5),
}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file supplying default values for any flag")
    p.add_argument("--target", choices=sorted(standard_targets()))
    p.add_argument("--sampler", choices=["hmc", "lahmc"])
    p.add_argument("--epsilon", type=float, help="leapfrog step length")
    p.add_argument("--M", type=int, help="leapfrog steps per trajectory")
    p.add_argument("--K", type=int, help="maximum number of trajectories per LAHMC step")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, help="momentum refresh rate in [0, 1]")
    g.add_argument("--alpha", type=float, help="refresh fraction per unit time; beta = alpha^(1/(epsilon M))")
    p.add_argument("--steps", type=int, help="recorded steps per chain")
    p.add_argument("--chains", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-lag", dest="max_lag", type=int)
    p.add_argument("--thin", type=int, help="keep every n-th sample for autocorrelation")
    p.add_argument("--burn-in", dest="burn_in", type=int,
                   help="discarded steps (default: 0 with exact start, 1000 otherwise)")
    p.add_argument("--output", "-o", help="output CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lahmc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("sample", help="write a sample trace"))
    _add_common(sub.add_parser("table", help="outcome fractions for the 12 benchmark configurations"))
    _add_common(sub.add_parser("autocorr", help="autocorrelation curves for the four sampler variants"))
    p = sub.add_parser("gridsearch", help="evaluations-to-threshold over a hyperparameter grid")
    _add_common(p)
    p.add_argument("--axes", choices=["eps-beta", "eps-M"])
    p.add_argument("--epsilons", type=_floats)
    p.add_argument("--betas", type=_floats)
    p.add_argument("--Ms", type=_floats)
    p.add_argument("--threshold", type=float)
    return parser


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the JSON config and explicit flags (in that order)."""
    defaults = {**COMMON_DEFAULTS, **COMMAND_DEFAULTS[args.command]}
    cli = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    config = _load_config(args.config)
    unknown = set(config) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "beta" in config and "alpha" in config:
        raise UsageError("config supplies both beta and alpha")
    if "beta" in cli or "alpha" in cli:
        config.pop("beta", None)
        config.pop("alpha", None)
    opts = {**defaults, **config, **cli}
    for key in ("epsilons", "betas", "Ms"):
        if isinstance(opts.get(key), str):
            opts[key] = _floats(opts[key])
    return opts


def sampler_config(opts: dict) -> SamplerConfig:
    if opts["alpha"] is not None:
        beta = beta_from_alpha(float(opts["alpha"]), float(opts["epsilon"]), int(opts["M"]))
    else:
        beta = 1.0 if opts["beta"] is None else float(opts["beta"])
    for key in ("steps", "chains"):
        if int(opts[key]) < 1:
            raise ContractError(f"--{key} must be >= 1")
    if int(opts["thin"]) < 1:
        raise ContractError("--thin must be >= 1")
    return SamplerConfig(float(opts["epsilon"]), int(opts["M"]), int(opts["K"]), beta, int(opts["seed"]))


@contextlib.contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(value) -> str:
    return repr(float(value))


def _max_lag(opts, n_rec):
    max_lag = n_rec - 1 if opts["max_lag"] is None else int(opts["max_lag"])
    if not 0 <= max_lag < n_rec:
        raise ContractError(f"--max-lag must lie in [0, {n_rec - 1}]")
    return max_lag


def cmd_sample(opts: dict, config: SamplerConfig) -> None:
    target = get_target(opts["target"])
    record = sample_chains(target, opts["sampler"], config, int(opts["chains"]), int(opts["steps"]),
                           burn_in=opts["burn_in"])
    with _open_output(opts["output"]) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["chain_id", "step", "cumulative_grad_evals", "outcome"]
                   + [f"x{i}" for i in range(target.dim)])
        for c in range(record.n_chains):
            for t in range(record.samples.shape[0]):
                w.writerow([c, t + 1, int(record.cumulative_grad_evals[t, c]),
                            outcome_label(record.outcomes[t, c])]
                           + [_fmt(v) for v in record.samples[t, c]])


def cmd_table(opts: dict, config: SamplerConfig) -> None:
    targets = experiments.TABLE_TARGETS if opts["target"] is None else (opts["target"],)
    rows = experiments.transition_table(config, int(opts["steps"]), int(opts["chains"]), targets=targets,
                                          burn_in=opts["burn_in"])
    with _open_output(opts["output"]) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["target", "sampler", "beta", *experiments.OUTCOME_COLUMNS])
        for row in rows:
            w.writerow([row.target, row.sampler, _fmt(row.beta)]
                       + [_fmt(row.fractions[c]) for c in experiments.OUTCOME_COLUMNS])


def cmd_autocorr(opts: dict, config: SamplerConfig) -> None:
    n_rec = int(opts["steps"]) // int(opts["thin"])
    curves = experiments.autocorr_variants(opts["target"], config, int(opts["steps"]), int(opts["chains"]),
                                           _max_lag(opts, n_rec), thin=int(opts["thin"]),
                                           burn_in=opts["burn_in"])
    with _open_output(opts["output"]) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sampler", "beta", "lag", "grad_evals", "autocorrelation"])
        for (sampler, beta), (curve, _) in curves.items():
            for lag, ev, val in zip(curve.lags, curve.evals_axis, curve.values):
                w.writerow([sampler, _fmt(beta), int(lag), _fmt(ev), _fmt(val)])
    for (sampler, beta), (_, crossing) in curves.items():
        print(f"{sampler} beta={beta:g}: {crossing:.6g} gradient evaluations to autocorrelation 0.5",
              file=sys.stderr)


def cmd_gridsearch(opts: dict, config: SamplerConfig) -> None:
    epsilons = opts["epsilons"] or experiments.DEFAULT_EPSILONS
    if opts["axes"] == "eps-beta":
        axis, values = "beta", opts["betas"] or experiments.DEFAULT_BETAS
        if any(not 0.0 <= b <= 1.0 for b in values):
            raise ContractError("grid betas must lie in [0, 1]")
    else:
        axis, values = "M", opts["Ms"] or experiments.DEFAULT_MS
        if any(m < 1 or int(m) != m for m in values):
            raise ContractError("grid Ms must be positive integers")
    if any(e <= 0 for e in epsilons):
        raise ContractError("grid epsilons must be positive")
    n_rec = int(opts["steps"]) // int(opts["thin"])
    result = grid_search(get_target(opts["target"]), opts["sampler"], epsilons, axis, values, config,
                         int(opts["steps"]), int(opts["chains"]), _max_lag(opts, n_rec),
                         float(opts["threshold"]), opts["burn_in"], int(opts["thin"]))
    with _open_output(opts["output"]) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"epsilon\\{axis}"] + [_fmt(v) for v in result.axis_values])
        for eps, row in zip(result.epsilons, result.values):
            w.writerow([_fmt(eps)] + [_fmt(v) for v in row])


COMMANDS = {"sample": cmd_sample, "table": cmd_table, "autocorr": cmd_autocorr,
            "gridsearch": cmd_gridsearch}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        if opts["target"] is not None:
            get_target(opts["target"])
        config = sampler_config(opts)
        if opts["max_lag"] is not None and int(opts["max_lag"]) < 0:
            raise ContractError("--max-lag must be non-negative")
    except (ContractError, UsageError, KeyError, ValueError, TypeError, OSError) as exc:
        parser.exit(2, f"lahmc: error: {exc}\n")
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            COMMANDS[args.command](opts, config)
    except ContractError as exc:
        parser.exit(2, f"lahmc: error: {exc}\n")
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        parser.exit(1, f"lahmc: {type(exc).__name__}: {exc}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
