"""C_k by nested quadrature and importance sampling, side by side."""
import argparse

from condorcet import asymptotics as A


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ks", default="1,2,3")
    p.add_argument("--samples", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for k in map(int, args.ks.split(",")):
        q = A.ck(k)
        mc = A.ck(k, "importance-mc", samples=int(args.samples), seed=args.seed)
        print(f"C_{k}: quadrature {q.value:.10f} (+/- {q.stderr:.1e}, {q.wall_time_s:.1f}s)  "
              f"importance {mc.value:.5f} +/- {mc.stderr:.5f}")
        try:
            A.ck(k, "importance-mc", samples=int(args.samples), seed=args.seed, proposal="exponential")
            print("   exponential proposal: accepted")
        except A.Nonconvergence as e:
            print(f"   exponential proposal: {e}")


if __name__ == "__main__":
    main()
