"""Median wall time of eigenvalue-only solves at n = 1e3, 1e4, 1e5.

    python scripts/run_timing.py [--threads 1] [--reps 3]
"""
import argparse

from tridispec.experiments import TimingConfig, loglog_slope, timing


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--ns", default="1000,10000,100000")
    args = ap.parse_args()
    ns = tuple(int(float(x)) for x in args.ns.split(","))
    rows = timing(TimingConfig(ns=ns, reps=args.reps, threads=args.threads))
    print("n,wall_time_ms")
    for n, t in rows:
        print(f"{n},{t:.3f}")
    if len(rows) > 1:
        print(f"# slope {loglog_slope(*zip(*rows)):.3f}")


if __name__ == "__main__":
    main()
