import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.integrate import quad
from scipy.special import comb

from specbound.families import (FamilyError, FamilySpec, evaluate, evaluate_all, evaluate_via_p1,
                                expand_product, gram_matrix, linearize, log_value_at_tau0,
                                measure, p1_value, recurrence, special_log_value, tau)


def krawtchouk_sum(n, k, x):
    """Explicit binary Krawtchouk polynomial."""
    return sum((-1) ** j * comb(x, j, exact=True) * comb(n - x, k - j, exact=True)
               for j in range(k + 1))


FAMILIES = [
    FamilySpec.hamming(10), FamilySpec.hamming(31),
    FamilySpec.johnson(12, 6), FamilySpec.johnson(30, 10), FamilySpec.johnson(11, 4),
    FamilySpec.sphere(3), FamilySpec.sphere(7), FamilySpec.sphere(24),
    FamilySpec.projective(5, "real"), FamilySpec.projective(4, "complex"),
    FamilySpec.projective(6, "quaternion"), FamilySpec.jacobi(2.5, 0.5),
]
IDS = [f.label() for f in FAMILIES]


# -- recurrence coefficients ---------------------------------------------

def test_hamming_coefficients_k0():
    r = recurrence(FamilySpec.hamming(10), 0)
    assert r.a == pytest.approx(math.sqrt(10), abs=1e-14)
    assert r.b == 0 and r.c == 0


def test_sphere_coefficients_k0():
    r = recurrence(FamilySpec.sphere(5), 0)
    assert r.a == pytest.approx(1 / math.sqrt(5), abs=1e-14)
    assert r.b == 0


@pytest.mark.parametrize("k", range(8))
def test_symmetric_jacobi_has_zero_b(k):
    assert recurrence(FamilySpec.jacobi(3.0, 3.0), k).b == pytest.approx(0, abs=1e-13)


def test_johnson_balanced_weight_b_vanishes():
    assert recurrence(FamilySpec.johnson(10, 5), 1).b == 0


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_c_shifts_a(family):
    kmax = 8 if family.max_degree is None else min(8, family.max_degree - 1)
    for k in range(kmax):
        assert recurrence(family, k + 1).c == pytest.approx(recurrence(family, k).a, rel=1e-12)


def test_negative_degree_rejected():
    with pytest.raises(FamilyError):
        recurrence(FamilySpec.hamming(5), -1)


def test_johnson_heavy_weight_points_to_complement():
    with pytest.raises(FamilyError, match="w'=3"):
        FamilySpec.johnson(10, 7)


# -- evaluation -----------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_p0_is_one(family):
    assert evaluate(family, 0, 0.3) == 1.0


def test_hamming_value_at_zero():
    assert evaluate(FamilySpec.hamming(10), 3, 0.0) == pytest.approx(math.sqrt(120), rel=1e-13)


def test_sphere_value_at_one():
    assert evaluate(FamilySpec.sphere(4), 2, 1.0) == pytest.approx(3.0, rel=1e-13)


def test_hamming_matches_krawtchouk_sum():
    n, k = 4, 2
    oracle = krawtchouk_sum(n, k, 1) / math.sqrt(comb(n, k))
    assert evaluate(FamilySpec.hamming(n), k, 1.0) == pytest.approx(oracle, abs=1e-13)


@pytest.mark.parametrize("n", [5, 9, 16])
def test_hamming_all_points_match_krawtchouk_sum(n):
    fam = FamilySpec.hamming(n)
    x = np.arange(n + 1)
    vals = evaluate_all(fam, n, x)
    for k in range(n + 1):
        oracle = [krawtchouk_sum(n, k, xi) / math.sqrt(comb(n, k)) for xi in x]
        np.testing.assert_allclose(vals[k], oracle, atol=1e-9)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_two_recurrences_agree(family):
    kmax = 10 if family.max_degree is None else family.max_degree
    lo, hi = family.support
    x = np.linspace(lo, hi, 23)
    for k in range(kmax + 1):
        np.testing.assert_allclose(evaluate_via_p1(family, k, x), evaluate(family, k, x),
                                   rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_log_values_match_special_values(family):
    kmax = 40 if family.max_degree is None else family.max_degree
    logs = log_value_at_tau0(family, kmax)
    ref = [special_log_value(family, k) for k in range(kmax + 1)]
    np.testing.assert_allclose(logs, ref, rtol=1e-11, atol=1e-11)


def test_log_values_large_hamming():
    fam = FamilySpec.hamming(1000)
    logs = log_value_at_tau0(fam, 999)
    ref = [special_log_value(fam, k) for k in range(1000)]
    np.testing.assert_allclose(logs, ref, rtol=1e-10)


def test_projective_unnormalized_value_at_one():
    fam = FamilySpec.projective(5, "real")
    al = fam.alpha
    for k in range(6):
        assert evaluate(fam, k, 1.0, normalized=False) == pytest.approx(comb(k + al, k), rel=1e-12)


# -- measures -------------------------------------------------------------

def test_hamming_measure_n3():
    np.testing.assert_allclose(measure(FamilySpec.hamming(3)).weights, [1 / 8, 3 / 8, 3 / 8, 1 / 8])


def test_johnson_measure():
    np.testing.assert_allclose(measure(FamilySpec.johnson(4, 2)).weights, [1 / 6, 4 / 6, 1 / 6])


def test_sphere_n3_uniform():
    mu = measure(FamilySpec.sphere(3))
    np.testing.assert_allclose(mu.density(np.linspace(-0.9, 0.9, 7)), 0.5, rtol=1e-14)


@pytest.mark.parametrize("family", [f for f in FAMILIES if not f.is_discrete],
                         ids=[f.label() for f in FAMILIES if not f.is_discrete])
def test_continuous_measures_have_unit_mass(family):
    mass, _ = quad(measure(family).density, -1, 1, limit=200)
    assert mass == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("family", [FamilySpec.sphere(5), FamilySpec.projective(4, "complex"),
                                    FamilySpec.jacobi(0.5, 1.5)])
def test_orthonormal_under_adaptive_quadrature(family):
    # independent of Gauss rules: adaptive integration of the density
    dens = measure(family).density
    for i in range(5):
        for j in range(i, 5):
            val, _ = quad(lambda x: evaluate(family, i, x) * evaluate(family, j, x) * dens(x),
                          -1, 1, limit=200)
            assert val == pytest.approx(float(i == j), abs=1e-9)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_gram_is_identity(family):
    kmax = 12 if family.max_degree is None else min(12, family.max_degree)
    np.testing.assert_allclose(gram_matrix(family, kmax), np.eye(kmax + 1), atol=1e-10)


# -- distance substitution and P1 -----------------------------------------

def test_hamming_tau_and_p1():
    fam = FamilySpec.hamming(12)
    assert tau(fam, 5) == 5
    assert p1_value(fam, 5) == 12 - 10


def test_sphere_orthogonal_points():
    assert tau(FamilySpec.sphere(6), math.sqrt(2)) == pytest.approx(0, abs=1e-15)


def test_projective_tau():
    t = 0.3
    d = math.sqrt(2 * (1 - t))
    assert tau(FamilySpec.projective(4), d) == pytest.approx(2 * t * t - 1, abs=1e-14)


def test_johnson_distance_must_be_even():
    fam = FamilySpec.johnson(10, 4)
    assert tau(fam, 4) == 2
    with pytest.raises(FamilyError):
        tau(fam, 3)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_p1_is_scaled_p1(family):
    # P1 = a_0 p_1 + b_0
    r = recurrence(family, 0)
    x = np.linspace(*family.support, 9)
    np.testing.assert_allclose(p1_value(family, x), r.a * evaluate(family, 1, x) + r.b,
                               atol=1e-12)


# -- linearization --------------------------------------------------------

def _brute_linearize(n, i, j):
    x = np.arange(n + 1)
    wts = np.array([comb(n, v) for v in x]) / 2.0 ** n
    p = [np.array([krawtchouk_sum(n, k, v) for v in x]) / math.sqrt(comb(n, k))
         for k in range(n + 1)]
    return np.array([np.sum(wts * p[i] * p[j] * p[k]) for k in range(n + 1)])


def test_linearize_with_p0():
    fam = FamilySpec.sphere(6)
    q = linearize(fam, 0, 3)
    np.testing.assert_allclose(q, np.eye(4)[3], atol=1e-12)


def test_linearize_unit_norm():
    assert linearize(FamilySpec.hamming(6), 1, 1)[0] == pytest.approx(1.0, abs=1e-13)


def test_linearize_matches_pointwise_projection():
    q = linearize(FamilySpec.hamming(6), 1, 2)
    np.testing.assert_allclose(q, _brute_linearize(6, 1, 2)[:4], atol=1e-12)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_linearization_nonnegative(family):
    top = 6 if family.max_degree is None else min(6, family.max_degree)
    for i in range(top + 1):
        for j in range(i, top + 1):
            q = linearize(family, i, j)
            assert q.min() >= -1e-10


@given(n=st.integers(2, 14), i=st.integers(0, 14), j=st.integers(0, 14))
def test_hamming_linearization_property(n, i, j):
    i, j = min(i, n), min(j, n)
    np.testing.assert_allclose(linearize(FamilySpec.hamming(n), i, j, max_k=n),
                               _brute_linearize(n, i, j), atol=1e-9)


@given(g=st.lists(st.floats(-3, 3), min_size=1, max_size=5),
       h=st.lists(st.floats(-3, 3), min_size=1, max_size=5))
def test_expand_product_reproduces_pointwise(g, h):
    fam = FamilySpec.sphere(5)
    F = expand_product(fam, g, h)
    x = np.linspace(-1, 1, 11)
    lhs = F @ evaluate_all(fam, len(F) - 1, x)
    rhs = (np.array(g) @ evaluate_all(fam, len(g) - 1, x)) * (np.array(h) @ evaluate_all(fam, len(h) - 1, x))
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(rhs).max()))


@pytest.mark.parametrize("fam", [FamilySpec.sphere(200), FamilySpec.projective(100, "quaternion")],
                         ids=lambda f: f.label())
def test_expand_product_tail_is_relatively_accurate(fam):
    # the value at tau0 is dominated by tiny top coefficients times huge p_j(tau0)
    k = 120
    g = np.zeros(k + 2)
    g[k], g[k + 1] = 3.0, 0.7
    h = np.exp(-0.05 * np.arange(k + 1))
    F = expand_product(fam, g, h)
    vals = evaluate_all(fam, 2 * k + 1, fam.tau0)
    assert F @ vals == pytest.approx((g @ vals[: k + 2]) * (h @ vals[: k + 1]), rel=1e-10)
    assert F[0] == pytest.approx(g[: k + 1] @ h, rel=1e-14)
    assert F.min() > 0


# -- properties -----------------------------------------------------------

@given(n=st.integers(2, 60))
def test_hamming_gram_property(n):
    fam = FamilySpec.hamming(n)
    k = min(n, 15)
    np.testing.assert_allclose(gram_matrix(fam, k), np.eye(k + 1), atol=1e-9)


@given(n=st.integers(2, 40), data=st.data())
def test_johnson_gram_property(n, data):
    w = data.draw(st.integers(1, n // 2))
    fam = FamilySpec.johnson(n, w)
    np.testing.assert_allclose(gram_matrix(fam, w), np.eye(w + 1), atol=1e-9)


@given(al=st.floats(-0.9, 20), be=st.floats(-0.9, 20))
def test_jacobi_gram_property(al, be):
    assume(al + be > -0.5)
    fam = FamilySpec.jacobi(al, be)
    np.testing.assert_allclose(gram_matrix(fam, 10), np.eye(11), atol=1e-9)


def test_roundtrip_family_dict():
    for fam in FAMILIES:
        assert FamilySpec.from_dict(fam.to_dict()) == fam
