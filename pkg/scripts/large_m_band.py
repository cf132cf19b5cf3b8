"""Compare plain Monte Carlo Q(m, n) at large m with the limit Q_n."""
import argparse

from condorcet import asymptotics as A
from condorcet.estimators import mc_plain


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--ms", default="101,1001,10001,100001")
    p.add_argument("--samples", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=11)
    args = p.parse_args()

    q = A.qn(args.n)
    print(f"Q_{args.n} = {q:.10f}")
    print(f"{'m':>8} {'Q_hat':>10} {'stderr':>9} {'deviation':>10} {'n^2/sqrt(m)':>12}")
    for m in map(int, args.ms.split(",")):
        e = mc_plain(m, args.n, int(args.samples), seed=args.seed)
        print(f"{m:>8} {e.value:>10.6f} {e.stderr:>9.2e} {abs(e.value - q):>10.2e} "
              f"{A.theorem1_band(args.n, m):>12.4f}")


if __name__ == "__main__":
    main()
