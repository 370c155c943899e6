"""Repeated epidemics on one random regular graph, estimating the rates from
each and summarising how often both land in the guaranteed interval.

    python scripts/estimator_sweep.py --n 2000 --d 8 --trials 50 --r 4
"""
import argparse
import math

from sirbridge.experiments import run_estimator_sweep
from sirbridge.sir import SirParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--mu", type=float, default=1 / 6)
    ap.add_argument("--r", type=float, default=math.inf)
    ap.add_argument("--t0", default="T0:100", help="a time or T0:k")
    ap.add_argument("--t1", default="+4", help="a time or +tau")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", help="also write the per-trial rows here")
    args = ap.parse_args()

    out = run_estimator_sweep((args.n, args.d), SirParams(args.lam, args.mu), r=args.r,
                              t0_rule=args.t0, t1_rule=args.t1, trials=args.trials,
                              seed=args.seed, workers=args.workers)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(out)
    breaks, good, used = {}, 0, 0
    for row in out.splitlines()[1:]:
        f = row.split(",")
        if f[-1]:
            breaks[f[-1]] = breaks.get(f[-1], 0) + 1
            continue
        used += 1
        lam_hat, mu_hat = float(f[4]), float(f[5])
        good += (args.lam / args.d - 0.05 <= lam_hat <= args.lam + 0.05
                 and args.mu - 0.05 <= mu_hat <= args.d * args.mu + 0.05)
    print(f"trials={args.trials} estimated={used} breaks={breaks}")
    if used:
        print(f"in interval: {good}/{used} = {good / used:.2f}")


if __name__ == "__main__":
    main()
