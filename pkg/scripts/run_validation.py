"""Fast solver vs dense oracle on random boundary draws.

    python scripts/run_validation.py --kind complex --draws 50 --iterations 4
"""
import argparse

from tridispec.experiments import oracle_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kind", choices=("real", "complex"), default="real")
    ap.add_argument("--draws", type=int, default=50)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iterations", type=int, default=None)
    args = ap.parse_args()
    rows = oracle_check(args.kind, args.draws, args.n, args.seed, args.iterations)
    print("draw,max_dist,mean_dist")
    for i, mx, mean in rows:
        print(f"{i},{mx:.3e},{mean:.3e}")
    print(f"# worst {max(r[1] for r in rows):.3e}")


if __name__ == "__main__":
    main()
