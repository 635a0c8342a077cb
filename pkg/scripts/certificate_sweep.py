"""Build and verify certificates over a grid of queries and summarize the checks.

    python3 scripts/certificate_sweep.py --n 20 50 100
"""
import argparse
import math
from collections import Counter

import numpy as np

from specbound import BoundQuery, BoundResult, FamilySpec, build_certificate, spectral_bound, verify_certificate
from specbound.certificate import theorem_value
from specbound.families import FamilyError


def queries(ns):
    for n in ns:
        for d in range(1, n // 2 + 1, max(1, n // 10)):
            yield BoundQuery(FamilySpec.hamming(n), d)
        w = n // 3
        for d in range(1, w, max(1, w // 5)):
            yield BoundQuery(FamilySpec.johnson(n, w), d)
        for t in np.linspace(-0.5, 0.9, 8):
            yield BoundQuery(FamilySpec.sphere(n), float(t))
        for field_ in ("real", "complex", "quaternion"):
            for t in np.linspace(0.0, 0.9, 5):
                yield BoundQuery(FamilySpec.projective(n, field_), float(t))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[20, 50, 100])
    args = ap.parse_args()

    failed, refused, total, worst = Counter(), 0, 0, 0.0
    for q in queries(args.n):
        res = spectral_bound(q)
        if not isinstance(res, BoundResult):
            continue
        try:
            cert = verify_certificate(build_certificate(q, res.k_star))
        except FamilyError as exc:
            refused += 1
            print(f"refused  {q.family.label()} distance={q.distance:g}: {exc}")
            continue
        total += 1
        worst = max(worst, abs(cert.implied_bound / theorem_value(cert) - 1))
        bad = [name for name, c in cert.checks.items() if not c["passed"]]
        failed.update(bad)
        if bad:
            print(f"failed   {q.family.label()} distance={q.distance:g} k={cert.k}: {', '.join(bad)}")
        excess = math.log2(cert.implied_bound) - res.bound_log2
        if excess > 1e-9:
            print(f"excess   {q.family.label()} distance={q.distance:g}: {excess:.3g} bits above the bound")
    print(f"{total} certificates verified, {sum(failed.values())} check failures, {refused} refused")
    print(f"max relative gap between implied bound and closed form: {worst:.2e}")


if __name__ == "__main__":
    main()
