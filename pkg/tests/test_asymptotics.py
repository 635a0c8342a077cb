import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specbound.asymptotics import (binary_entropy, hamming_lambda_limit, hamming_rate,
                                   johnson_delta, johnson_lambda_limit, johnson_rate,
                                   lambda_limit, projective_lambda_limit, projective_real_rate,
                                   sphere_lambda_limit, sphere_rate)
from specbound.bounds import BoundQuery, spectral_bound
from specbound.families import FamilySpec
from specbound.tridiag import build_S, lambda_max, leading_lambda_max


def entropy_ref(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def test_entropy_values():
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    assert binary_entropy(0.5) == 1
    assert binary_entropy(0.2) == pytest.approx(entropy_ref(0.2), abs=1e-15)


def test_hamming_rate_points():
    assert hamming_rate(0.5).rate == 0
    assert hamming_rate(0.1).auxiliary == pytest.approx(0.2, abs=1e-15)
    assert hamming_rate(0.1).rate == pytest.approx(0.72193, abs=1e-5)
    assert hamming_rate(1e-12).rate == pytest.approx(1, abs=1e-4)


def test_johnson_rate_points():
    edge = johnson_rate(0.5, 0.25)
    assert edge.rate == 0 and edge.boundary
    assert johnson_delta(0.5, 0.1) == pytest.approx(0.1, abs=1e-15)
    mid = johnson_rate(0.5, 0.1)
    assert mid.auxiliary == pytest.approx(0.1, abs=1e-11)
    assert mid.rate == pytest.approx(0.46899, abs=1e-5)
    assert johnson_rate(0.5, 1e-9).rate == pytest.approx(1, abs=1e-3)


def test_johnson_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        johnson_rate(0.3, 0.0)


def test_sphere_rate_points():
    assert sphere_rate(0).rate == 0
    p = sphere_rate(0.5)
    assert p.auxiliary == pytest.approx(0.077350, abs=1e-6)
    assert p.rate == pytest.approx(0.4014, abs=5e-4)
    q = sphere_rate(0.8)
    assert q.auxiliary == pytest.approx(1 / 3, abs=1e-15)
    ref = (4 / 3) * math.log2(4 / 3) + (1 / 3) * math.log2(3)
    assert q.rate == pytest.approx(ref, abs=1e-14)
    assert ref == pytest.approx(1.0817, abs=1e-4)


def test_projective_rate_points():
    assert projective_real_rate(0).rate == 0
    p = projective_real_rate(math.sqrt(3) / 2)
    assert p.auxiliary == pytest.approx(0.5, abs=1e-14)
    assert p.rate == pytest.approx(1.5 * math.log2(1.5) + 0.5, abs=1e-14)
    assert p.rate == pytest.approx(1.3774, abs=1e-4)
    assert projective_real_rate(0.5).rate == pytest.approx(sphere_rate(0.5).rate, abs=1e-14)


@given(st.floats(1e-6, 0.5), st.floats(1e-6, 0.5))
def test_hamming_rate_decreasing(d1, d2):
    lo, hi = sorted((d1, d2))
    assert hamming_rate(lo).rate >= hamming_rate(hi).rate - 1e-15


@given(st.floats(0.05, 0.5), st.floats(1e-4, 1.0), st.floats(1e-4, 1.0))
def test_johnson_rate_decreasing(omega, u1, u2):
    top = omega * (1 - omega)
    lo, hi = sorted((u1 * top, u2 * top))
    assert johnson_rate(omega, lo).rate >= johnson_rate(omega, hi).rate - 1e-10


@given(st.floats(0.05, 0.5), st.floats(0.0, 1.0))
def test_johnson_root_solves_relation(omega, u):
    delta = max(u * omega * (1 - omega), 1e-9)
    p = johnson_rate(omega, delta)
    if not p.boundary:
        # the root is bracketed to 1e-12 in tau; delta(tau) is decreasing
        tau = p.auxiliary
        assert johnson_delta(omega, max(0.0, tau - 1e-12)) >= delta >= johnson_delta(omega, tau + 1e-12)


@given(st.floats(0, 0.99), st.floats(0, 0.99))
def test_continuous_rates_increasing(t1, t2):
    lo, hi = sorted((t1, t2))
    assert sphere_rate(lo).rate <= sphere_rate(hi).rate + 1e-15
    assert projective_real_rate(lo).rate <= projective_real_rate(hi).rate + 1e-15


# -- limits ---------------------------------------------------------------

def test_limit_values():
    assert hamming_lambda_limit(0.5) == 1
    assert hamming_lambda_limit(0.3) == pytest.approx(0.9165151, abs=1e-7)
    assert sphere_lambda_limit(0.5) == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert projective_lambda_limit(1, 0) == pytest.approx(8 / 9, abs=1e-15)
    assert lambda_limit("sphere", rho=0.5) == sphere_lambda_limit(0.5)


@given(st.floats(0.01, 100))
def test_projective_limit_b0_closed_form(a):
    s = 1 / a
    assert projective_lambda_limit(a, 0) == pytest.approx(4 * (1 + s) / (1 + 2 * s) ** 2, rel=1e-12)


def test_johnson_limit_balanced():
    r = math.sqrt(0.3 * 0.7)
    assert johnson_lambda_limit(0.5, 0.3) == pytest.approx((0.5 + r) * r / (0.25 * (1 + 2 * r)), rel=1e-14)


@pytest.mark.slow
def test_hamming_convergence():
    n, k = 4000, 1200
    lam = lambda_max(build_S(FamilySpec.hamming(n), k)).lambda_max
    assert abs(lam / n - hamming_lambda_limit(k / n)) <= 0.01


def test_sphere_convergence():
    n, k = 800, 400
    lam = lambda_max(build_S(FamilySpec.sphere(n), k)).lambda_max
    assert abs(lam - sphere_lambda_limit(k / n)) <= 0.01


def test_projective_convergence():
    k = 500
    lam = lambda_max(build_S(FamilySpec.jacobi(k, 0), k)).lambda_max
    assert abs(lam / k - projective_lambda_limit(1, 0)) <= 0.02


def test_johnson_convergence():
    # the gap closes roughly like n^(-2/3), so check the trend as well as the size
    gaps = []
    for n in (500, 1000, 2000):
        w, k = 3 * n // 10, 3 * n // 20
        lam = lambda_max(build_S(FamilySpec.johnson(n, w), k)).lambda_max
        gaps.append(abs(lam - johnson_lambda_limit(w / n, k / n)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= 0.02


def test_hamming_threshold_location():
    # k_min/n should approach 1/2 - sqrt(delta(1-delta)) for relative distance delta
    n, delta = 2000, 0.2
    lam = leading_lambda_max(build_S(FamilySpec.hamming(n), n // 2)) / n
    threshold = 1 - 2 * delta
    kmin = int(np.argmax(lam >= threshold)) + 1
    assert abs(kmin / n - hamming_rate(delta).auxiliary) <= 0.01


@pytest.mark.parametrize("delta", [0.05, 0.11, 0.2, 0.3])
def test_finite_bound_approaches_mrrw(delta):
    n = 1000
    res = spectral_bound(BoundQuery(FamilySpec.hamming(n), round(delta * n)))
    assert abs(res.bound_log2 / n - hamming_rate(delta).rate) <= 0.05
