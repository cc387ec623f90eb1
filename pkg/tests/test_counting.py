from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subzeta import catalog, counting
from subzeta.exactmath import gaussian_binomial, valuation
from subzeta.lattice import HNFLattice, canonicalize, divisor_type, enumerate_sublattices, is_primitive
from subzeta.parallel import pool_map


def test_membership_examples():
    H = catalog.heisenberg(2)
    lat = canonicalize([(1, 0, 0), (0, 1, 0), (0, 0, 2)], 2)
    assert not counting.is_subalgebra(lat, H)
    ideal = canonicalize([(2, 0, 0), (0, 1, 0), (0, 0, 1)], 2)
    assert counting.is_ideal(ideal, H) and counting.is_subalgebra(ideal, H)
    assert counting.is_subalgebra(HNFLattice.full(3, 2), H)


def test_abelian_everything_closes():
    A = catalog.abelian(3, 3)
    for lat in enumerate_sublattices(3, 3, 2):
        assert counting.is_subalgebra(lat, A) and counting.is_ideal(lat, A)
        if is_primitive(lat):
            assert counting.weight(lat, A) == 0


def test_counts():
    H = catalog.heisenberg(2)
    assert counting.count(H, 1) == 3
    assert counting.count(H, 2) == 19
    for kind in counting.KINDS:
        assert counting.count(H, 0, kind) == 1
    assert counting.non_subalgebra_counts(H, 1) == (4, 4)
    assert counting.non_subalgebra_counts(catalog.abelian(3, 2), 3) == (0, 0)


def test_ideal_implies_subalgebra():
    F = catalog.filiform4(2)
    for lat in enumerate_sublattices(4, 2, 2):
        if counting.is_ideal(lat, F):
            assert counting.is_subalgebra(lat, F)


def test_weight_matches_successive_scaling():
    F = catalog.filiform4(2)
    for lat in enumerate_sublattices(4, 2, 3):
        if not is_primitive(lat):
            continue
        w = counting.weight(lat, F)
        assert counting.is_subalgebra(lat.scaled(w), F)
        if w:
            assert not counting.is_subalgebra(lat.scaled(w - 1), F)


def test_weight_rejects_non_primitive():
    with pytest.raises(ValueError):
        counting.weight(HNFLattice.full(3, 2).scaled(1), catalog.heisenberg(2))


def test_zp2_strata_example():
    Z = catalog.zp2_componentwise(3)
    ws, ts = counting.stratified_counts(Z, 2)
    assert ws == {0: 3, 1: 6, 2: 3}
    assert sum(ws.values()) == 13 - 1


@pytest.mark.parametrize("p", [3, 5])
def test_zp2_strata_formula(p):
    Z = catalog.zp2_componentwise(p)
    for i in range(1, 6):
        ws, _ = counting.stratified_counts(Z, i)
        want = {w: 3 * (p**w - p ** (w - 1) if w else 1) for w in range(i)}
        want[i] = (p - 2) * p ** (i - 1)
        assert ws == want


@pytest.mark.parametrize("p,k_max", [(3, 11), (5, 8)])
def test_zp2_c_series_and_sum(p, k_max):
    c = counting.c_series(catalog.zp2_componentwise(p), k_max)
    assert c[0] == 1
    for k in range(1, k_max + 1):
        l, r = divmod(k, 3)
        assert c[k] == ((p + 1) * p ** (l - 1) if r == 0 else 3 * p**l)
    target = Fraction(8, 1 - p)
    vals = [valuation(sum(c[: k + 1]) - target, p) for k in range(2, k_max + 1, 3)]
    assert vals == list(range(len(vals)))


def test_type_strata_partition_weights():
    H = catalog.heisenberg(3)
    for i in range(5):
        ws, ts = counting.stratified_counts(H, i)
        by_w = Counter()
        for (key, w), cnt in ts.items():
            if sum(pos * jump for pos, jump in key) == i:
                by_w[w] += cnt
        assert dict(by_w) == ws


def test_type_key_matches_divisor_type():
    for lat in enumerate_sublattices(3, 2, 3):
        assert counting.lattice_type(lat.rows, 2) == divisor_type(lat).key


@pytest.mark.parametrize("name,p,i_max", [("heisenberg", 2, 5), ("filiform-4", 2, 3), ("zp2-componentwise", 3, 5)])
def test_homothety_recursion(name, p, i_max):
    A = catalog.get(name, p)
    sv = counting.survey(A, i_max, with_types=False)
    sub = sv.series("subalgebra")
    n = A.n
    for i in range(i_max + 1):
        prim = sum(sv.levels[i].weights.values())
        amax = gaussian_binomial(n - 1 + i, n - 1, p) - (gaussian_binomial(i - 1, n - 1, p) if i >= n else 0)
        assert prim == amax
        assert sub[i] - (sub[i - n] if i >= n else 0) >= 0


def test_parallel_survey_is_deterministic():
    H = catalog.heisenberg(3)
    counting._CACHE.clear()
    with pool_map(2) as pmap:
        par = counting.survey_level(H, 3, pmap, with_types=True)
    counting._CACHE.clear()
    seq = counting.survey_level(H, 3, map, with_types=True)
    assert (par.lattices, par.subalgebras, par.ideals, par.weights, par.types) == (
        seq.lattices,
        seq.subalgebras,
        seq.ideals,
        seq.weights,
        seq.types,
    )


def test_invariant_violation_is_raised():
    shard = counting.Shard(lattices=5, subalgebras=1, ideals=1)
    with pytest.raises(counting.InvariantViolation):
        counting._check_shard(catalog.heisenberg(2), 1, shard)


def test_class2_split():
    H = catalog.heisenberg(2)
    for i in range(5):
        assert counting.class2_split_count(H, i) == counting.count(H, i)
        assert counting.class2_split_count(H, i, "ideal") == counting.count(H, i, "ideal")
    A = catalog.abelian(2, 3)
    assert [counting.class2_split_count(A, i) for i in range(4)] == [gaussian_binomial(1 + i, 1, 3) for i in range(4)]
    with pytest.raises(ValueError):
        counting.class2_split_count(catalog.filiform4(2), 1)


def test_local_growth_identity():
    g = counting.local_growth_identity_check(catalog.heisenberg(2), 1)
    assert g.identity_holds and g.congruences_hold(2)
    for i in range(4):
        g = counting.local_growth_identity_check(catalog.heisenberg(2), i)
        assert all(v % 2 == 1 for v in g.a_values)
    ab = counting.local_growth_identity_check(catalog.abelian(3, 2), 1)
    assert ab.identity_holds
    assert ab.lhs == gaussian_binomial(3, 2, 2) * gaussian_binomial(3, 1, 2)


@given(st.sampled_from(["heisenberg", "filiform-4", "pi-zp2-componentwise"]), st.sampled_from([2, 3]), st.integers(0, 3))
def test_theorem_a_congruence(name, p, i):
    A = catalog.get(name, p)
    assert counting.count(A, i, "subalgebra") % p == 1
    assert counting.count(A, i, "ideal") % p == 1


def test_count_table_formats():
    sv = counting.survey(catalog.heisenberg(2), 2)
    t = counting.CountTable.from_survey(sv, "subalgebra")
    assert t.to_text() == "0: 1\n1: 3\n2: 19\n"
    assert t.to_jsonl().count("\n") == 3
    full = counting.CountTable.from_survey(sv, "subalgebra", strata=True).to_text()
    assert "i  w  primitive" in full and "type  w  primitive" in full
