"""Exact extinction probability next to its two upper bounds and a
Monte-Carlo estimate, over a grid of tree degrees and infection rates.

    python scripts/extinction_grid.py --trials 20000
"""
import argparse
import math

from sirbridge.branching import (
    OffspringDist, SubcriticalRegime, extinction_probability, extinction_upper_bound,
    simulate_extinction,
)
from sirbridge.rng import stream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, nargs="+", default=[3, 4, 8, 16])
    ap.add_argument("--lam", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("d,lambda,mu,exact,mc,mc_sd,bound_intermediate,bound_simple")
    for i, d in enumerate(args.d):
        for j, lam in enumerate(args.lam):
            dist = OffspringDist(d - 1, lam, args.mu)
            q = extinction_probability(dist)
            mc = simulate_extinction(dist, args.trials, seed=stream(args.seed, i, j))
            sd = math.sqrt(q * (1 - q) / args.trials)
            try:
                inter, simple = extinction_upper_bound(d, lam, args.mu)
                bounds = f"{inter:.6f},{simple:.6f}"
            except SubcriticalRegime:
                bounds = "na,na"
            print(f"{d},{lam:g},{args.mu:g},{q:.6f},{mc:.6f},{sd:.6f},{bounds}")


if __name__ == "__main__":
    main()
