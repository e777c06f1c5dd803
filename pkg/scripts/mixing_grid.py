"""Mixing time over (epsilon, beta) or (epsilon, M) for HMC and LAHMC on the 2d grid Gaussian."""

import argparse
import csv
from pathlib import Path

import numpy as np

from lahmc.diagnostics import grid_search
from lahmc.sampler import SamplerConfig
from lahmc.targets import get_target


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--axis", choices=["beta", "M"], default="beta")
    p.add_argument("--chains", type=int, default=1000)
    p.add_argument("--max-steps", type=int, default=400_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    epsilons = np.logspace(np.log10(0.3), np.log10(1.8), 6)
    values = np.logspace(np.log10(0.02), 0.0, 6) if args.axis == "beta" else np.array([1, 2, 5, 10, 20, 50])
    base = SamplerConfig(1.0, 10, 4, 1.0, args.seed)
    target = get_target("gauss2d-grid")

    grids = {}
    for kernel in ("hmc", "lahmc"):
        grids[kernel] = grid_search(target, kernel, epsilons, args.axis, values, base, n_steps=500,
                                    n_chains=args.chains, max_steps=args.max_steps,
                                    progress=lambda i, j, v: print(f"{kernel} eps={epsilons[i]:.3g} "
                                                                   f"{args.axis}={values[j]:g}: {v:.0f}",
                                                                   flush=True))
        with open(args.out / f"grid_{args.axis}_{kernel}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"epsilon\\{args.axis}", *values])
            w.writerows([e, *row] for e, row in zip(epsilons, grids[kernel].values))

    rel = grids["lahmc"].values / grids["hmc"].values
    print("LAHMC / HMC evaluations (rows epsilon, columns", args.axis + ")")
    print(np.array2string(rel, precision=3))


if __name__ == "__main__":
    main()
