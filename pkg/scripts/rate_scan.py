"""Estimate Q(3, n) over a grid of n and fit the log-log slope.

    python3 scripts/rate_scan.py --ns 100,1000,10000 --samples 1e7,3e7,2e8 --out results/rate.csv
"""
import argparse
import math

from condorcet import asymptotics as A
from condorcet.checks import RATE_NS, RATE_SAMPLES, rate_scan
from condorcet.cli import RATE_COLUMNS, count_list


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ns", type=count_list, default=list(RATE_NS))
    p.add_argument("--samples", type=count_list, default=list(RATE_SAMPLES))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="rate_scan.csv")
    args = p.parse_args()

    samples = args.samples * len(args.ns) if len(args.samples) == 1 else args.samples
    ests = rate_scan(args.ns, samples, m=3, seed=args.seed, workers=args.workers)
    c2 = A.ck(2).value
    print(f"{'n':>7} {'Q_hat':>10} {'stderr':>9} {'Q*sqrt(n)':>10} {'C_2 n^-1/2':>11}")
    for e in ests:
        print(f"{e.n:>7} {e.value:>10.6f} {e.stderr:>9.2e} {e.value * math.sqrt(e.n):>10.4f} "
              f"{A.sauermann_estimate(2, e.n, c2):>11.6f}")
    fit = A.rate_fit([(e.n, e.value) for e in ests])
    print(f"slope {fit.slope:.4f}  pairwise {['%.4f' % s for s in fit.pairwise_slopes]}  C_2 {c2:.10f}")
    A.write_csv(args.out, [e.to_dict() for e in ests], RATE_COLUMNS)


if __name__ == "__main__":
    main()
