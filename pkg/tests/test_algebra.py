import pytest
from hypothesis import given, strategies as st

from subzeta import catalog
from subzeta.algebra import (
    StructureAlgebra,
    apply_matrix,
    centre,
    dilation_matrix,
    is_lie,
    is_residually_nilpotent,
    multiply,
    nilpotency_class,
    pi_scale,
    product_chain,
    verify_grading,
)

vec3 = st.lists(st.integers(-20, 20), min_size=3, max_size=3)


def test_heisenberg_basics():
    H = catalog.heisenberg(2)
    assert is_lie(H)
    assert multiply(H, [1, 0, 0], [0, 1, 0]) == [0, 0, 1]
    assert multiply(H, [0, 1, 0], [1, 0, 0]) == [0, 0, -1]
    assert nilpotency_class(H) == 2
    c = centre(H)
    assert c.basis.vectors == ((0, 0, 1),) and c.a == 2 and c.b == 1


def test_filiform_class_three():
    F = catalog.filiform4(3)
    assert is_lie(F) and nilpotency_class(F) == 3
    assert verify_grading(F)


def test_abelian():
    A = catalog.abelian(3, 5)
    assert A.is_abelian and nilpotency_class(A) == 1
    assert centre(A).b == 3


def test_zp2_is_not_residually_nilpotent():
    Z = catalog.zp2_componentwise(3)
    assert not is_lie(Z)
    assert nilpotency_class(Z) is None
    assert is_residually_nilpotent(Z, 6).status == "refuted"
    v = is_residually_nilpotent(pi_scale(Z), 6)
    assert v.status == "verified" and bool(v)


def test_product_chain_shrinks_for_pi_scaled():
    P = pi_scale(catalog.zp2_componentwise(2))
    chain = product_chain(P, 4)
    mins = [T.min_valuation() for T in chain]
    assert mins == sorted(mins) and mins[-1] >= 3


def test_residual_nilpotency_of_nilpotent_algebras():
    for A in (catalog.heisenberg(2), catalog.filiform4(2)):
        assert is_residually_nilpotent(A, 5).status == "verified"


def test_constants_validated():
    with pytest.raises(ValueError):
        StructureAlgebra("bad", 2, 2, ((0, 2, 1, 1),))
    with pytest.raises(ValueError):
        StructureAlgebra("bad", 2, 4, ())
    with pytest.raises(ValueError):
        StructureAlgebra("bad", 2, 2, (), (2, 1))


def test_grading_rejects_wrong_weights():
    H = catalog.heisenberg(2)
    assert not verify_grading(H, (1, 1, 1))


def test_dilation_heisenberg():
    H = catalog.heisenberg(5)
    T = dilation_matrix(H, 3, 4)
    assert [T[i][i] for i in range(3)] == [3, 3, 9]
    assert dilation_matrix(H, 1, 4) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(ValueError):
        dilation_matrix(H, 10, 4)


@given(st.sampled_from(["heisenberg", "filiform-4"]), st.sampled_from([2, 3, 5]), st.integers(1, 10**6), st.integers(1, 8), st.data())
def test_dilation_is_endomorphism(name, p, lam, K, data):
    if lam % p == 0:
        lam += 1
    A = catalog.get(name, p)
    T = dilation_matrix(A, lam, K, check=False)
    x = data.draw(st.lists(st.integers(-20, 20), min_size=A.n, max_size=A.n))
    y = data.draw(st.lists(st.integers(-20, 20), min_size=A.n, max_size=A.n))
    lhs = multiply(A, apply_matrix(T, x), apply_matrix(T, y))
    rhs = apply_matrix(T, multiply(A, x, y))
    assert all((a - b) % p**K == 0 for a, b in zip(lhs, rhs))


@given(vec3, vec3, vec3)
def test_heisenberg_jacobi_and_bilinear(x, y, z):
    H = catalog.heisenberg(3)
    s = [a + b for a, b in zip(x, y)]
    assert multiply(H, s, z) == [a + b for a, b in zip(multiply(H, x, z), multiply(H, y, z))]
    assert multiply(H, x, x) == [0, 0, 0]


def test_catalog_lookup():
    assert catalog.get("pi-heisenberg", 3).name == "pi-heisenberg"
    with pytest.raises(KeyError):
        catalog.get("nope", 2)
    assert len(catalog.names()) == 14
