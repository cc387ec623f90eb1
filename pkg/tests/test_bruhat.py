import itertools
import random

import pytest
from hypothesis import given, strategies as st

from subzeta import bruhat, catalog
from subzeta.counting import is_subalgebra, weight as lattice_weight
from subzeta.lattice import DivisorType


def ident(n):
    return tuple(tuple(1 if r == c else 0 for c in range(n)) for r in range(n))


H2 = catalog.heisenberg(2)


def test_identity_beta_is_diagonal():
    dt = DivisorType((3, 1, 0))
    cell = bruhat.BruhatCell(3, 2, dt, (0, 1, 2), ident(3))
    assert cell.lattice().rows == ((8, 0, 0), (0, 2, 0), (0, 0, 1))


def test_cell_rejects_bad_beta():
    dt = DivisorType((1, 0, 0))
    with pytest.raises(ValueError):
        bruhat.BruhatCell(3, 2, dt, (0, 1, 2), ((1, 1, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(ValueError):
        bruhat.BruhatCell(3, 2, DivisorType((1, 1, 1)), (0, 1, 2), ident(3))


def test_unitriangular_inverse():
    beta = ((1, 0, 0), (3, 1, 0), (5, 7, 1))
    inv = bruhat.unitriangular_inverse(beta)
    prod = [[sum(beta[r][k] * inv[k][c] for k in range(3)) for c in range(3)] for r in range(3)]
    assert prod == [list(r) for r in ident(3)]


@pytest.mark.parametrize("p,budget", [(2, 3), (3, 2)])
def test_cells_cover_primitive_types_n2(p, budget):
    for dt in bruhat.types_up_to(2, budget):
        ok, a, b = bruhat.coverage_check(2, p, dt)
        assert ok, (dt, a, b)


def test_cells_cover_primitive_types_n3():
    types = bruhat.types_up_to(3, 3)
    assert sorted(t.lam for t in types) == [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 0, 0), (2, 1, 0), (3, 0, 0)]
    for dt in types:
        ok, a, b = bruhat.coverage_check(3, 2, dt)
        assert ok and a == b


def test_cell_count_matches_enumeration():
    dt = DivisorType((2, 1, 0))
    cells = list(bruhat.cells_for_type(3, 2, dt, (0, 1, 2)))
    assert len(cells) == bruhat.cell_count(3, 2, dt) == 2 * 2 * 4
    with pytest.raises(ValueError):
        list(bruhat.cells_for_type(3, 2, dt, (0, 1, 2), budget=3))


def test_mult_matrix_zero_for_abelian():
    A = catalog.abelian(3, 2)
    assert bruhat.mult_matrix(A, [1, 2, 3]) == [[0] * 3] * 3


def test_mult_matrix_heisenberg():
    R = bruhat.mult_matrix(H2, [0, 0, 1])
    assert R[0][1] == 1 and R[1][0] == -1 and sum(map(sum, R)) == 0


def test_f_vanishes_for_abelian():
    A = catalog.abelian(3, 2)
    cell = bruhat.BruhatCell(3, 2, DivisorType((1, 0, 0)), (0, 1, 2), ((1, 0, 0), (1, 1, 0), (1, 0, 1)))
    assert not any(bruhat.all_f(cell, A).values())


def test_f_identity_beta_gives_structure_constants():
    cell = bruhat.BruhatCell(3, 2, DivisorType((1, 0, 0)), (0, 1, 2), ident(3))
    f = bruhat.all_f(cell, H2)
    nonzero = {k: v for k, v in f.items() if v}
    assert nonzero == {(0, 1, 2): 1, (1, 0, 2): -1}


def test_f_hand_value():
    # rows beta_1 = (1,1,0), beta_2 = (1,0,1); beta^{-1} row 3 = (-1,0,1)
    # [beta_1, beta_2] = (1*0 - 1*1) e_3, then e_3 = -b_1 + b_3 in the new basis
    cell = bruhat.BruhatCell(3, 2, DivisorType((1, 0, 0)), (0, 1, 2), ((1, 0, 0), (1, 1, 0), (1, 0, 1)))
    assert [bruhat.f_klm(cell, H2, 1, 2, m) for m in range(3)] == [1, 0, -1]


def test_subalgebra_condition_matches_membership():
    rng = random.Random(3)
    for dt in bruhat.types_up_to(3, 3):
        for sigma in itertools.permutations(range(3)):
            cell = bruhat.random_cell(rng, 3, 2, dt, sigma)
            assert bruhat.subalgebra_condition(cell, H2) == is_subalgebra(cell.lattice(), H2)
            assert bruhat.cell_weight(cell, H2) == lattice_weight(cell.lattice(), H2)


def test_large_homothety_always_closes():
    dt = DivisorType((3, 1, 0))
    for cell in bruhat.cells_for_type(3, 2, dt, (2, 0, 1)):
        assert bruhat.subalgebra_condition(cell, H2, homothety=dt.index_exponent)


def test_equivalence_sweep_small():
    rep = bruhat.equivalence_sweep(H2, 2)
    assert rep.passed and not rep.counterexamples


def test_homogeneity_lambda_one():
    rng = random.Random(0)
    cell = bruhat.random_cell(rng, 3, 2, DivisorType((2, 1, 0)), (1, 2, 0))
    assert bruhat.homogeneity_check(cell, H2, 1, 6).passed


def test_homogeneity_rejects_non_unit():
    cell = bruhat.BruhatCell(3, 2, DivisorType((1, 0, 0)), (0, 1, 2), ident(3))
    with pytest.raises(ValueError):
        bruhat.homogeneity_check(cell, H2, 2, 6)


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_homogeneity_random(seed, p):
    A = catalog.heisenberg(p)
    rng = random.Random(seed)
    dt = rng.choice(bruhat.types_up_to(3, 3))
    sigma = rng.sample(range(3), 3)
    cell = bruhat.random_cell(rng, 3, p, dt, sigma)
    lam = rng.randrange(1, p**6)
    if lam % p == 0:
        lam += 1
    assert bruhat.homogeneity_check(cell, A, lam, 6).passed


def test_identity_beta_orbit_valuation_zero():
    cell = bruhat.BruhatCell(3, 2, DivisorType((2, 1, 0)), (0, 1, 2), ident(3))
    st_ = bruhat.orbit_stats(cell, H2)
    assert st_.mult_orbit_valuation == 0 and st_.consistent


def test_printed_inverse_bound_counterexample():
    cell = bruhat.BruhatCell(3, 2, DivisorType((1, 0, 0)), (0, 1, 2), ((1, 0, 0), (0, 1, 0), (1, 0, 1)))
    stats = bruhat.orbit_stats(cell, H2)
    assert stats.mult_orbit_valuation == 0
    rep = bruhat.lemma_checks(stats, H2)
    assert not rep.influenced_inverse
    assert rep.influenced_inverse_transposed and rep.lemmas_hold


def test_orbit_lemmas_small_sweep():
    rep = bruhat.orbit_sweep(H2, 2, preservation_budget=2)
    assert rep.cells > 0
    assert rep.lemmas_ok == rep.consistent == rep.cells
    assert rep.preservation_ok == rep.preservation_checked > 0


def test_additive_mu_zero_keeps_weight():
    cell = bruhat.BruhatCell(3, 2, DivisorType((2, 1, 0)), (0, 1, 2), ((1, 0, 0), (1, 1, 0), (1, 1, 1)))
    assert bruhat.additive_weight_preservation(cell, H2, 0)


def test_additive_below_threshold_raises():
    for dt in bruhat.types_up_to(3, 3):
        if not dt.I:
            continue
        for cell in bruhat.cells_for_type(3, 2, dt, (0, 1, 2)):
            stats = bruhat.orbit_stats(cell, H2)
            need = bruhat.additive_threshold(stats, lattice_weight(cell.lattice(), H2), stats.eps_plus)
            if need > 0:
                with pytest.raises(ValueError):
                    bruhat.additive_weight_preservation(cell, H2, 1, stats)
                return
    pytest.skip("no cell with a positive threshold in range")
