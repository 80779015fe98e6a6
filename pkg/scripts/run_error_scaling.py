"""Max regular-eigenvalue error after M contraction steps, vs n, with log-log slopes.

    python scripts/run_error_scaling.py [--params separated] [--out errors.csv]
"""
import argparse
import csv
import sys

from tridispec.experiments import DEFAULT_COMPLEX, ErrorScalingConfig, error_scaling, fit_slopes

PARAMS = {"default": DEFAULT_COMPLEX, "separated": (0.3 + 0.2j, 0.2, -0.4 - 0.1j, 0.25)}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--params", choices=sorted(PARAMS), default="default")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    rows = error_scaling(ErrorScalingConfig(params=PARAMS[args.params]))
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "M", "max_error"])
    w.writerows(rows)
    for M, s in fit_slopes(rows).items():
        print(f"M={M}: slope {s:.3f} (target {-(M + 1)})", file=sys.stderr)


if __name__ == "__main__":
    main()
