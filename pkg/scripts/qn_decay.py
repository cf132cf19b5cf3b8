"""Tabulate Q_n, Q_n * n^l and successive log-log slopes."""
import argparse

from condorcet import asymptotics as A


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ns", default="10,100,1000,3000,10000,100000,1000000")
    args = p.parse_args()
    ns = [int(v) for v in args.ns.split(",")]
    q = [A.qn(n) for n in ns]
    print(f"{'n':>8} {'Q_n':>12} {'Q_n n':>9} {'Q_n n^2':>10} {'Q_n n^3':>12}")
    for n, v in zip(ns, q):
        print(f"{n:>8} {v:>12.6e} {v * n:>9.4f} {v * n**2:>10.4g} {v * n**3:>12.4g}")
    fit = A.rate_fit(zip(ns, q))
    print("pairwise slopes", ["%.4f" % s for s in fit.pairwise_slopes])


if __name__ == "__main__":
    main()
