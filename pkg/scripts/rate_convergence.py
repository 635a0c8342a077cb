"""Finite-n rates (1/n) log2 M from the bound engine next to the asymptotic curves.

    python3 scripts/rate_convergence.py --space hamming --n 250 500 1000 2000
    python3 scripts/rate_convergence.py --space sphere --n 100 200 400
"""
import argparse

import numpy as np

from specbound import BoundQuery, FamilySpec, spectral_bound
from specbound.asymptotics import hamming_rate, sphere_rate


def hamming_rows(ns, deltas):
    for delta in deltas:
        limit = hamming_rate(delta).rate
        finite = [spectral_bound(BoundQuery(FamilySpec.hamming(n), max(1, round(delta * n)))).bound_log2 / n
                  for n in ns]
        yield delta, finite, limit


def sphere_rows(ns, ts):
    for t in ts:
        limit = sphere_rate(t).rate
        finite = [spectral_bound(BoundQuery(FamilySpec.sphere(n), t)).bound_log2 / n for n in ns]
        yield t, finite, limit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--space", choices=["hamming", "sphere"], default="hamming")
    ap.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000])
    ap.add_argument("--points", type=int, default=6, help="number of distance values")
    args = ap.parse_args()

    if args.space == "hamming":
        grid = np.linspace(0.05, 0.45, args.points)
        rows, label = hamming_rows(args.n, grid), "delta"
    else:
        grid = np.linspace(0.1, 0.9, args.points)
        rows, label = sphere_rows(args.n, grid), "t"

    print(f"{label:>7} " + " ".join(f"n={n:<7}" for n in args.n) + "   limit")
    for x, finite, limit in rows:
        print(f"{x:7.3f} " + " ".join(f"{v:9.5f}" for v in finite) + f" {limit:9.5f}")


if __name__ == "__main__":
    main()
