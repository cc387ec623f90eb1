from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subzeta.exactmath import (
    INF,
    TruncatedSeries,
    capped_valuation,
    factored_presentation,
    factors_poly,
    fit_rational,
    gaussian_binomial,
    int_valuation,
    is_prime,
    limit_gaussian,
    padic_limit_report,
    poly_mul,
    smith_valuations,
    valuation,
)

primes = st.sampled_from([2, 3, 5, 7])


def test_inf_orders_above_integers():
    assert INF > 10**100 and not INF < 5
    assert INF + 3 is INF
    assert min(INF, 4) == 4
    import pickle

    assert pickle.loads(pickle.dumps(INF)) is INF


def test_valuation_examples():
    assert valuation(8, 2) == 3
    assert valuation(Fraction(3, 4), 2) == -2
    assert valuation(5, 3) == 0
    assert valuation(0, 7) is INF
    assert capped_valuation(0, 3, 5) == 5
    assert capped_valuation(81, 3, 2) == 2


def test_is_prime():
    assert [x for x in range(20) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19]


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(-10**6, 10**6).filter(bool), primes)
def test_valuation_is_additive(a, b, p):
    assert int_valuation(a * b, p) == int_valuation(a, p) + int_valuation(b, p)
    assert valuation(Fraction(a, b), p) == int_valuation(a, p) - int_valuation(b, p)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), primes)
def test_ultrametric(a, b, p):
    assert valuation(a + b, p) >= min(valuation(a, p), valuation(b, p))


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 5, 2) == 0
    assert gaussian_binomial(7, 0, 3) == 1
    assert [gaussian_binomial(2 + i, 2, 2) for i in range(7)] == [1, 7, 35, 155, 651, 2667, 10795]


@given(st.integers(1, 9), st.integers(1, 9), primes)
def test_gaussian_pascal(a, b, q):
    # binom(a, b) = binom(a-1, b-1) + q^b binom(a-1, b)
    assert gaussian_binomial(a, b, q) == gaussian_binomial(a - 1, b - 1, q) + q**b * gaussian_binomial(a - 1, b, q)


@given(st.integers(0, 8), st.integers(0, 8), primes)
def test_gaussian_symmetric(a, b, q):
    if b <= a:
        assert gaussian_binomial(a, b, q) == gaussian_binomial(a, a - b, q)


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (3, 3), (4, 5)])
def test_gaussian_converges_to_limit(n, q):
    vals = [valuation(gaussian_binomial(n - 1 + i, n - 1, q) - limit_gaussian(n, q), q) for i in range(1, 10)]
    # the error is a multiple of q^(i+1)
    assert all(v >= i + 1 for i, v in zip(range(1, 10), vals))


def test_limit_gaussian():
    assert limit_gaussian(3, 2) == Fraction(1, 3)
    assert limit_gaussian(1, 5) == 1


def test_smith_examples():
    assert smith_valuations([[2, 4], [6, 8]], 2) == [1, 2]
    assert smith_valuations([[4, 0], [0, 1]], 2) == [0, 2]
    assert smith_valuations([[0, 0], [0, 0]], 3) == [INF, INF]
    assert smith_valuations([[9, 0], [0, 0]], 3, cap=1) == [1, 1]
    assert smith_valuations([[1, 2, 3]], 5) == [0]


@given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3), min_size=3, max_size=3), primes)
def test_smith_sum_is_det_valuation(m, p):
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    vals = smith_valuations(m, p)
    assert vals == sorted(vals)
    if det:
        assert sum(vals) == int_valuation(det, p)
    else:
        assert vals[-1] is INF


def test_series_inverse():
    s = TruncatedSeries.from_poly(2, [1, -1], 5)
    assert s.inverse().coeffs == tuple(Fraction(1) for _ in range(6))


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8))
def test_series_inverse_roundtrip(tail):
    s = TruncatedSeries(3, tuple(Fraction(x) for x in [1] + tail))
    one = s * s.inverse()
    assert one.coeffs == tuple([Fraction(1)] + [Fraction(0)] * len(tail))


def _series_of(num, den, p, order):
    return TruncatedSeries.from_poly(p, num, order) / TruncatedSeries.from_poly(p, den, order)


def test_fit_recovers_heisenberg():
    p = 2
    num = factors_poly(((3, 3, 1),), p)
    den = factors_poly(((0, 1, 1), (1, 1, 1), (2, 2, 1), (3, 2, 1)), p)
    s = _series_of(num, den, p, 9)
    grid = [(a, b) for a in range(5) for b in range(1, 4)]
    fit = fit_rational(s, grid, 3)
    assert fit is not None
    # the shared factor (1 - 2t) cancels in the lowest-degree fit
    assert list(fit.numerator) == [1, 2, 4]
    assert fit.denominator == ((0, 1, 1), (2, 2, 1), (3, 2, 1))
    fac = factored_presentation(fit, grid, 3)
    assert fac.numerator_factors == ((3, 3, 1),)
    assert fac.denominator == ((0, 1, 1), (1, 1, 1), (2, 2, 1), (3, 2, 1))
    assert fac.same_function(fit)
    assert str(fac) == "(1 - 8*t^3) / ((1 - t)(1 - 2*t)(1 - 4*t^2)(1 - 8*t^2))"


def test_fit_needs_enough_terms():
    s = TruncatedSeries(2, tuple(Fraction(x) for x in [1, 3, 19]))
    assert fit_rational(s, [(0, 1), (1, 1)], 2) is None


def test_fit_abelian():
    s = TruncatedSeries(3, tuple(Fraction(gaussian_binomial(1 + i, 1, 3)) for i in range(8)))
    fit = fit_rational(s, [(a, 1) for a in range(3)], 2)
    assert fit.denominator == ((0, 1, 1), (1, 1, 1))
    assert list(fit.numerator) == [1]


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(1, 2)), min_size=1, max_size=3), primes)
def test_fit_roundtrip_random_denominators(factors, p):
    fs = {}
    for ab in factors:
        fs[ab] = fs.get(ab, 0) + 1
    den = tuple(sorted((a, b, m) for (a, b), m in fs.items()))
    d = sum(b * m for _, b, m in den)
    s = _series_of([1], factors_poly(den, p), p, d + 6)
    fit = fit_rational(s, [(a, b) for a in range(3) for b in range(1, 3)], 3)
    assert fit is not None
    assert fit.expand(d + 6).coeffs == s.coeffs


def test_padic_limit_report():
    r = padic_limit_report([1, 3, 7, 15], 2, -1)
    assert r.to_target == (1, 2, 3, 4)
    assert r.target_increasing and r.differences_nondecreasing


def test_poly_mul():
    assert poly_mul([1, 1], [1, -1]) == [1, 0, -1]
    assert poly_mul([1, 1], [1, 1], limit=2) == [1, 2]
