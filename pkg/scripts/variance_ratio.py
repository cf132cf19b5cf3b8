"""Per-sample variance of the plain and conditional estimators, with timing."""
import argparse

from condorcet.estimators import variance_comparison


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--pairs", default="3x3,5x3,3x10,3x100")
    p.add_argument("--samples", type=float, default=1e5)
    p.add_argument("--seed", type=int, default=8)
    args = p.parse_args()
    print(f"{'m':>4} {'n':>5} {'plain':>9} {'cond':>9} {'ratio':>8} {'t_plain':>8} {'t_cond':>8}")
    for pair in args.pairs.split(","):
        m, n = map(int, pair.split("x"))
        r = variance_comparison(m, n, int(args.samples), seed=args.seed)
        print(f"{m:>4} {n:>5} {r.plain.value:>9.5f} {r.conditional.value:>9.5f} {r.ratio:>8.3f} "
              f"{r.plain.wall_time_s:>8.2f} {r.conditional.wall_time_s:>8.2f}")


if __name__ == "__main__":
    main()
