from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from subzeta import igusa


def poly(text, n=2, p=2):
    return igusa.PolySystem(n, p, (igusa.parse_polynomial(text, n),))


def test_parse_and_format_round_trip():
    text = "3*x1^2*x2 - x2^3 + 5"
    mons = igusa.parse_polynomial(text, 2)
    assert sorted(mons) == sorted([((2, 1), 3), ((0, 3), -1), ((0, 0), 5)])
    assert sorted(igusa.parse_polynomial(igusa.format_polynomial(mons), 2)) == sorted(mons)


@pytest.mark.parametrize("bad", ["x3", "x1**2", "2.5*x1", "x1 + + "])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        igusa.parse_polynomial(bad, 2)


def test_parse_system_header():
    f = igusa.parse_system("# comment\nn=2 p=3 homogeneous=yes\nx1^2 + x2^2\n")
    assert (f.n, f.p, f.is_homogeneous()) == (2, 3, True)
    with pytest.raises(ValueError):
        igusa.parse_system("n=2 p=3 homogeneous=yes\nx1^2 + x2\n")
    with pytest.raises(ValueError):
        igusa.parse_system("p=3\nx1\n")
    with pytest.raises(ValueError):
        igusa.PolySystem(1, 4, (((( 1,), 1),),))


def test_jacobian():
    f = poly("x1^3 - x2^2")
    assert f.jacobian([2, 5]) == [[12, -10]]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_square_counts(p):
    f = igusa.corpus_system("x2", p)
    assert igusa.solution_levels(f, 8) == [p ** (i // 2) for i in range(9)]


@pytest.mark.parametrize("p", [2, 3])
def test_xy_counts(p):
    f = igusa.corpus_system("xy", p)
    want = [1] + [p ** (i - 1) * ((i + 1) * p - i) for i in range(1, 7)]
    assert igusa.solution_levels(f, 6) == want


def test_sum_of_squares_inert_prime():
    # p = 3 mod 4: x^2 + y^2 = 0 forces x = y = 0 mod p
    f = igusa.corpus_system("x2+y2", 3)
    assert igusa.solution_levels(f, 6) == [3 ** (2 * (i // 2)) for i in range(7)]


def test_linear_form_counts():
    f = igusa.PolySystem(1, 3, ((((1,), 1),),))
    assert igusa.solution_levels(f, 5) == [1] * 6


@pytest.mark.parametrize("name", sorted(igusa.CORPUS))
@pytest.mark.parametrize("p", [2, 3])
def test_tree_matches_naive(name, p):
    f = igusa.corpus_system(name, p)
    top = 6 if f.n == 1 else (5 if p == 2 else 3)
    tree = igusa.solution_levels(f, top)
    assert tree == [igusa.count_solutions(f, i, "naive") for i in range(top + 1)]


def test_naive_budget():
    f = igusa.corpus_system("xy", 3)
    with pytest.raises(igusa.BudgetExceeded):
        igusa.count_solutions(f, 6, "naive", budget=1000)
    with pytest.raises(ValueError):
        igusa.count_solutions(f, 2, "bogus")


def test_poincare_round_trip():
    f = igusa.corpus_system("x3-y2", 2)
    P, I = igusa.poincare_coeffs(f, 6)
    assert P.coeffs[0] == 1
    assert igusa.poincare_from_igusa(I).coeffs == P.coeffs


def test_slopes():
    rep = igusa.slope_report(igusa.corpus_system("x2", 2), 6)
    assert rep.valuations == (0, 0, 1, 1, 2, 2, 3)
    assert rep.slopes[1] == Fraction(1, 2)
    assert rep.liminf_estimate == 0
    assert "running-min" in rep.table()


def test_hensel_sqrt2_mod_7():
    # 3^2 = 2 mod 7, lifted to a square root of 2 mod 7^2
    f = igusa.PolySystem(1, 7, (igusa.parse_polynomial("x1^2 - 2", 1),))
    (b,) = igusa.hensel_lift(f, [3], 2)
    assert b == 10 and (b * b - 2) % 49 == 0


def test_hensel_not_applicable():
    f = igusa.corpus_system("x2", 2)
    assert igusa.hensel_lift(f, [0], 5) is None
    g = igusa.PolySystem(1, 2, (igusa.parse_polynomial("x1^2 - 2", 1),))
    assert igusa.hensel_lift(g, [0], 4) is None


def test_hensel_system():
    f = igusa.PolySystem(
        2, 5, (igusa.parse_polynomial("x1^2 + x2 - 3", 2), igusa.parse_polynomial("x1 - x2^2 + 1", 2))
    )
    # a simple root mod 5 lifted to 5^6
    for a in [(x, y) for x in range(5) for y in range(5)]:
        if all(v % 5 == 0 for v in f.evaluate(a)):
            b = igusa.hensel_lift(f, a, 6)
            if b is not None:
                assert all(v % 5**6 == 0 for v in f.evaluate(b))
                assert all((bi - ai) % 5 == 0 for ai, bi in zip(a, b))


def test_reverse_hensel_square():
    v = igusa.reverse_hensel_check(igusa.corpus_system("x2", 2), [1], 6)
    assert v.hypothesis_holds and v.slope_check
    assert v.bound == Fraction(-1, 2)


def test_reverse_hensel_counterexample():
    v = igusa.reverse_hensel_check(igusa.corpus_system("xy", 2), [Fraction(1, 2), Fraction(1, 2)], 4)
    assert not v.hypothesis_holds
    assert v.counterexample == (0, 1)
    assert "fails" in str(v)


def test_reverse_hensel_rejects_bad_lambdas():
    with pytest.raises(ValueError):
        igusa.reverse_hensel_check(igusa.corpus_system("x2", 2), [2], 3)


def test_jacobian_profile_padding():
    f = igusa.corpus_system("xy", 2)
    assert igusa.jacobian_profile(f, (0, 0), 4) == [4, 4]
    assert igusa.jacobian_profile(f, (1, 0), 4) == [0, 4]


def test_homogeneous_bound():
    h = igusa.homogeneous_bound_check(igusa.corpus_system("x2+y2", 3), 8)
    assert h.passed and h.target == Fraction(2, 3)
    with pytest.raises(ValueError):
        igusa.homogeneous_bound_check(igusa.corpus_system("cubic", 2), 3)


def test_cubic_is_not_homogeneous():
    assert not igusa.corpus_system("cubic", 2).is_homogeneous()


coeff = st.integers(-6, 6)


@st.composite
def systems(draw):
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, 2))
    terms = draw(st.lists(st.tuples(st.tuples(*[st.integers(0, 3)] * n), coeff), min_size=1, max_size=4))
    f = igusa.PolySystem(n, p, (tuple(terms),))
    if not f.polys[0]:
        f = igusa.PolySystem(n, p, ((((1,) + (0,) * (n - 1), 1),),))
    return f


@settings(max_examples=40)
@given(systems())
def test_tree_agrees_with_naive_random(f):
    top = 4 if f.n == 1 else 3
    assert igusa.solution_levels(f, top) == [igusa.count_solutions(f, i, "naive") for i in range(top + 1)]


@settings(max_examples=40)
@given(systems())
def test_counts_grow_at_most_by_p_to_n(f):
    M = igusa.solution_levels(f, 4)
    assert M[0] == 1
    for a, b in zip(M, M[1:]):
        assert b <= f.p**f.n * a


@settings(max_examples=40)
@given(systems())
def test_poincare_series_coefficients_are_decreasing_probabilities(f):
    P, I = igusa.poincare_coeffs(f, 4)
    assert all(0 <= c <= 1 for c in P.coeffs)
    assert all(c >= 0 for c in I.coeffs)
