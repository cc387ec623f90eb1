"""The shipped algebras, each available at any prime."""

from __future__ import annotations

from typing import Callable

from .algebra import StructureAlgebra, pi_scale


def abelian(n: int, p: int) -> StructureAlgebra:
    return StructureAlgebra(f"abelian-{n}", n, p, (), tuple([1] * n))


def heisenberg(p: int) -> StructureAlgebra:
    # [x, y] = z
    return StructureAlgebra("heisenberg", 3, p, ((0, 1, 2, 1), (1, 0, 2, -1)), (1, 1, 2))


def filiform4(p: int) -> StructureAlgebra:
    # e1 e2 = e3, e1 e3 = e4, antisymmetric
    consts = ((0, 1, 2, 1), (1, 0, 2, -1), (0, 2, 3, 1), (2, 0, 3, -1))
    return StructureAlgebra("filiform-4", 4, p, consts, (1, 1, 2, 3))


def zp2_componentwise(p: int) -> StructureAlgebra:
    return StructureAlgebra("zp2-componentwise", 2, p, ((0, 0, 0, 1), (1, 1, 1, 1)))


_BASE: dict[str, Callable[[int], StructureAlgebra]] = {
    **{f"abelian-{n}": (lambda p, n=n: abelian(n, p)) for n in range(1, 5)},
    "heisenberg": heisenberg,
    "filiform-4": filiform4,
    "zp2-componentwise": zp2_componentwise,
}


def names() -> list[str]:
    return list(_BASE) + [f"pi-{k}" for k in _BASE]


def get(name: str, p: int) -> StructureAlgebra:
    """Look up a catalog algebra; a ``pi-`` prefix gives the scaled variant."""
    if name.startswith("pi-"):
        return pi_scale(get(name[3:], p))
    try:
        return _BASE[name](p)
    except KeyError:
        raise KeyError(f"unknown catalog algebra {name!r}; known: {', '.join(names())}") from None
