"""Outcome fractions for every benchmark configuration, next to the published values."""

import argparse

from lahmc.experiments import OUTCOME_COLUMNS, PUBLISHED_FRACTIONS, transition_table
from lahmc.sampler import SamplerConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--chains", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    base = SamplerConfig(1.0, 10, 4, 1.0, args.seed)
    print(f"{'configuration':38s}" + "".join(f"{c:>8s}" for c in OUTCOME_COLUMNS) + "   max|diff|")

    def show(row):
        ref = PUBLISHED_FRACTIONS[(row.target, row.sampler, row.beta)]
        got = [row.fractions[c] for c in OUTCOME_COLUMNS]
        diff = max(abs(g - r) for g, r in zip(got, ref))
        print(f"{row.label:38s}" + "".join(f"{g:8.3f}" for g in got) + f"   {diff:.3f}", flush=True)

    transition_table(base, args.steps, args.chains, progress=show)


if __name__ == "__main__":
    main()
