"""Largest eigenvalue of S_k under proportional growth against its limit.

    python3 scripts/lambda_limits.py --n 100 200 400 800
"""
import argparse

from specbound import FamilySpec, build_S, lambda_max
from specbound.asymptotics import (hamming_lambda_limit, johnson_lambda_limit,
                                   projective_lambda_limit, sphere_lambda_limit)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--ratio", type=float, default=0.25, help="k/n (sphere, hamming, johnson)")
    ap.add_argument("--omega", type=float, default=0.3, help="w/n for johnson")
    args = ap.parse_args()
    r = args.ratio

    print(f"{'n':>6} {'hamming':>10} {'johnson':>10} {'sphere':>10} {'proj-real':>10}")
    for n in args.n:
        k = max(1, round(r * n))
        ham = lambda_max(build_S(FamilySpec.hamming(n), k)).lambda_max / n
        w = max(2, round(args.omega * n))
        kj = max(1, min(round(r * n), w))
        joh = lambda_max(build_S(FamilySpec.johnson(n, w), kj)).lambda_max
        sph = lambda_max(build_S(FamilySpec.sphere(n), k)).lambda_max
        # projective-real with alpha = (n-3)/2 = k, beta = -1/2: a = 1, b -> 0
        kp = max(1, (n - 3) // 2)
        proj = lambda_max(build_S(FamilySpec.projective(n, "real"), kp)).lambda_max / kp
        print(f"{n:6d} {ham:10.6f} {joh:10.6f} {sph:10.6f} {proj:10.6f}")
    print(f"{'limit':>6} {hamming_lambda_limit(r):10.6f} {johnson_lambda_limit(args.omega, r):10.6f} "
          f"{sphere_lambda_limit(r):10.6f} {projective_lambda_limit(1.0, 0.0):10.6f}")


if __name__ == "__main__":
    main()
