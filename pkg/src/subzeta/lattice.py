"""Finite-index sublattices of Z_p^n in lower-triangular Hermite normal form.

A lattice is the Z_p-span of the rows of a lower-triangular integer matrix
whose diagonal holds p-powers p^e_j and whose entry (r, c), c < r, is reduced
into [0, p^e_c).  That form is unique, so lattices compare and hash by their
matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exactmath import INF, int_valuation, smith_valuations


@dataclass(frozen=True)
class HNFLattice:
    p: int
    rows: tuple[tuple[int, ...], ...]
    exps: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def index_exponent(self) -> int:
        return sum(self.exps)

    @property
    def index(self) -> int:
        return self.p ** self.index_exponent

    @classmethod
    def full(cls, n: int, p: int) -> "HNFLattice":
        return cls.diagonal(p, (0,) * n)

    @classmethod
    def diagonal(cls, p: int, exps: Sequence[int]) -> "HNFLattice":
        n = len(exps)
        rows = tuple(
            tuple(p ** exps[r] if c == r else 0 for c in range(n)) for r in range(n)
        )
        return cls(p, rows, tuple(exps))

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]]) -> "HNFLattice":
        """Wrap rows already in canonical form, checking that they are."""
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        exps = []
        for r in range(n):
            if len(rows[r]) != n:
                raise ValueError("matrix must be square")
            d = rows[r][r]
            e = int_valuation(d, p)
            if e is INF or p**e != d:
                raise ValueError(f"diagonal entry {d} is not a power of {p}")
            exps.append(e)
            if any(rows[r][c] for c in range(r + 1, n)):
                raise ValueError("matrix is not lower triangular")
        for r in range(n):
            for c in range(r):
                if not 0 <= rows[r][c] < p ** exps[c]:
                    raise ValueError(f"entry ({r},{c}) is not reduced")
        return cls(p, rows, tuple(exps))

    def scaled(self, k: int) -> "HNFLattice":
        """p^k times this lattice."""
        f = self.p**k
        return HNFLattice(
            self.p,
            tuple(tuple(x * f for x in r) for r in self.rows),
            tuple(e + k for e in self.exps),
        )

    def to_text(self) -> str:
        width = max(len(str(x)) for r in self.rows for x in r)
        return "\n".join(" ".join(str(x).rjust(width) for x in r) for r in self.rows)

    def __str__(self):
        return self.to_text()


# ---------------------------------------------------------------------------
# enumeration


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def subdiagonal_slots(n: int) -> list[tuple[int, int]]:
    """Positions (r, c) with c < r, in row-major order."""
    return [(r, c) for r in range(1, n) for c in range(r)]


def slot_ranges(p: int, exps: Sequence[int]) -> list[range]:
    n = len(exps)
    return [range(p ** exps[c]) for _, c in subdiagonal_slots(n)]


def lattice_count_for(p: int, exps: Sequence[int]) -> int:
    out = 1
    for rg in slot_ranges(p, exps):
        out *= len(rg)
    return out


@dataclass(frozen=True)
class WorkUnit:
    """A slice of the enumeration: one diagonal composition, with the first
    sub-diagonal slot restricted to ``[start, stop)`` when n >= 2."""

    n: int
    p: int
    exps: tuple[int, ...]
    start: int = 0
    stop: int | None = None

    def ranges(self) -> list[range]:
        rgs = slot_ranges(self.p, self.exps)
        if rgs and self.stop is not None:
            rgs[0] = range(self.start, self.stop)
        return rgs

    def size(self) -> int:
        out = 1
        for rg in self.ranges():
            out *= len(rg)
        return out


def work_units(n: int, p: int, i: int, chunk: int = 1 << 16) -> list[WorkUnit]:
    """Partition of all index-p^i lattices into work units of roughly
    ``chunk`` lattices each; order is the enumeration order."""
    units = []
    for exps in compositions(i, n):
        total = lattice_count_for(p, exps)
        if n < 2 or total <= chunk:
            units.append(WorkUnit(n, p, exps))
            continue
        first = p ** exps[0]
        per_value = total // first
        step = max(1, chunk // max(per_value, 1))
        for s in range(0, first, step):
            units.append(WorkUnit(n, p, exps, s, min(first, s + step)))
    return units


def _rows_builder(n: int, p: int, exps: Sequence[int]):
    """Function turning a tuple of sub-diagonal values into a row tuple."""
    diag = [p**e for e in exps]
    slots = subdiagonal_slots(n)

    def build(vals):
        rows = [[0] * n for _ in range(n)]
        for r in range(n):
            rows[r][r] = diag[r]
        for (r, c), v in zip(slots, vals):
            rows[r][c] = v
        return tuple(tuple(row) for row in rows)

    return build


def iter_unit(unit: WorkUnit) -> Iterator[HNFLattice]:
    build = _rows_builder(unit.n, unit.p, unit.exps)
    for vals in itertools.product(*unit.ranges()):
        yield HNFLattice(unit.p, build(vals), unit.exps)


def enumerate_sublattices(n: int, p: int, i: int) -> Iterator[HNFLattice]:
    """All sublattices of Z_p^n of index p^i, each exactly once, lazily."""
    if n < 1 or i < 0:
        raise ValueError("need n >= 1 and i >= 0")
    for exps in compositions(i, n):
        yield from iter_unit(WorkUnit(n, p, exps))


def count_unit(unit: WorkUnit) -> int:
    """Walk the unit's enumeration and count; the loop runs in C."""
    return sum(1 for _ in itertools.product(*unit.ranges()))


def count_lattices(n: int, p: int, i: int, pmap=map) -> int:
    """Number of index-p^i sublattices, by walking the enumeration."""
    return sum(pmap(count_unit, work_units(n, p, i)))


# ---------------------------------------------------------------------------
# membership and normal forms


def contains(lat: HNFLattice, x: Sequence[int]) -> bool:
    return rows_contain(lat.rows, x)


def rows_contain(rows, x) -> bool:
    """Back-substitution against lower-triangular canonical rows."""
    x = list(x)
    for c in range(len(rows) - 1, -1, -1):
        xc = x[c]
        if xc:
            d = rows[c][c]
            if xc % d:
                return False
            q = xc // d
            row = rows[c]
            for k in range(c):
                x[k] -= q * row[k]
    return True


def coefficients(lat: HNFLattice, x: Sequence) -> list[Fraction]:
    """Coordinates of x with respect to the lattice rows (rationals)."""
    x = [Fraction(v) for v in x]
    out = [Fraction(0)] * lat.n
    for c in range(lat.n - 1, -1, -1):
        q = x[c] / lat.rows[c][c]
        out[c] = q
        if q:
            for k in range(c):
                x[k] -= q * lat.rows[c][k]
    return out


def deficiency(lat: HNFLattice, x: Sequence) -> int:
    """Least d >= 0 with p^d x in the lattice."""
    worst = 0
    for q in coefficients(lat, x):
        if q:
            v = int_valuation(q.denominator, lat.p)
            if v > worst:
                worst = v
    return worst


def canonicalize(generators: Sequence[Sequence], p: int) -> HNFLattice:
    """Canonical form of the Z_p-span of integer (or p-integral rational)
    generators, which must span a full-rank lattice."""
    gens = []
    for g in generators:
        g = [Fraction(x) for x in g]
        for x in g:
            if x.denominator % p == 0:
                raise ValueError("generator is not p-integral")
        # clear the prime-to-p denominators: a unit multiple spans the same line
        den = 1
        for x in g:
            den = den * x.denominator // _gcd(den, x.denominator)
        gens.append([int(x * den) for x in g])
    if not gens:
        raise ValueError("no generators")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise ValueError("generators of different lengths")
    pivots: list[list[int] | None] = [None] * n
    vals = [0] * n
    pool = [g for g in gens if any(g)]
    for c in range(n - 1, -1, -1):
        best = None
        for idx, g in enumerate(pool):
            if g[c]:
                v = int_valuation(g[c], p)
                if best is None or v < best[0]:
                    best = (v, idx)
        if best is None:
            raise ValueError("generators do not span a full-rank lattice")
        v, idx = best
        piv = pool.pop(idx)
        pv = p**v
        unit = piv[c] // pv
        rest = []
        for g in pool:
            b = g[c]
            if b:
                f = b // pv
                g = [unit * a - f * q for a, q in zip(g, piv)]
            if any(g):
                rest.append(g)
        pool = rest
        pivots[c] = piv
        vals[c] = v
    total = sum(vals)
    if total == 0:
        return HNFLattice.full(n, p)
    mod = p**total
    rows = []
    for c in range(n):
        piv = pivots[c]
        unit = piv[c] // p ** vals[c]
        inv = pow(unit % mod, -1, mod)
        row = [(x * inv) % mod for x in piv]
        row[c] = p ** vals[c]
        for k in range(c + 1, n):
            row[k] = 0
        rows.append(row)
    for r in range(n):
        row = rows[r]
        for c in range(r - 1, -1, -1):
            d = rows[c][c]
            q = row[c] // d
            if q:
                piv = rows[c]
                for k in range(c + 1):
                    row[k] -= q * piv[k]
    return HNFLattice(p, tuple(tuple(r) for r in rows), tuple(vals))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# elementary divisors


@dataclass(frozen=True)
class DivisorType:
    """Elementary-divisor exponents of a lattice, largest first, with the
    derived jump data.  ``I`` holds 1-based positions."""

    lam: tuple[int, ...]

    def __post_init__(self):
        if any(a < b for a, b in zip(self.lam, self.lam[1:])):
            raise ValueError("exponents must be non-increasing")

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def I(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.n - 1) if self.lam[k] > self.lam[k + 1])

    @property
    def r(self) -> dict[int, int]:
        return {k: self.lam[k - 1] - self.lam[k] for k in self.I}

    @property
    def h(self) -> int:
        return self.lam[-1]

    @property
    def R(self) -> int:
        return max(self.r.values(), default=0)

    @property
    def primitive(self) -> bool:
        return self.h == 0

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        """The pair (I, r) as a hashable tuple of (position, jump)."""
        return tuple(sorted(self.r.items()))

    @property
    def index_exponent(self) -> int:
        return sum(self.lam)

    @classmethod
    def from_key(cls, n: int, key, h: int = 0) -> "DivisorType":
        r = dict(key)
        lam = []
        acc = h
        for k in range(n, 0, -1):
            acc += r.get(k, 0)
            lam.append(acc)
        return cls(tuple(reversed(lam)))

    def r_sum(self, lo: int, hi: int) -> int:
        """Sum of r_k over lo <= k < hi (1-based positions)."""
        return sum(v for k, v in self.r.items() if lo <= k < hi)

    def __str__(self):
        inner = ",".join(f"{k}:{v}" for k, v in self.key)
        return f"lam=({','.join(map(str, self.lam))}) I.r={{{inner}}}"


def divisor_type(lat: HNFLattice) -> DivisorType:
    lam = smith_valuations(lat.rows, lat.p)
    return DivisorType(tuple(sorted(lam, reverse=True)))


def homothety(lat: HNFLattice) -> int:
    """Largest h with the lattice inside p^h Z_p^n."""
    best = None
    for r in lat.rows:
        for x in r:
            if x:
                v = int_valuation(x, lat.p)
                if best is None or v < best:
                    best = v
                    if v == 0:
                        return 0
    return best


def primitive_part(lat: HNFLattice) -> tuple[HNFLattice, int]:
    h = homothety(lat)
    if h == 0:
        return lat, 0
    f = lat.p**h
    rows = tuple(tuple(x // f for x in r) for r in lat.rows)
    return HNFLattice(lat.p, rows, tuple(e - h for e in lat.exps)), h


def is_primitive(lat: HNFLattice) -> bool:
    return homothety(lat) == 0


# ---------------------------------------------------------------------------
# sums, intersections, overlattices


def lattice_sum(a: HNFLattice, b: HNFLattice) -> HNFLattice:
    return canonicalize(list(a.rows) + list(b.rows), a.p)


def _lower_inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for col in range(n):
        inv[col][col] = Fraction(1, rows[col][col])
        for r in range(col + 1, n):
            s = sum(rows[r][k] * inv[k][col] for k in range(col, r))
            inv[r][col] = -s / rows[r][r]
    return inv


def _scaled_dual(lat: HNFLattice, scale: int) -> list[list[int]]:
    """Rows spanning p^scale times the dual lattice."""
    inv = _lower_inverse(lat.rows)
    n = lat.n
    f = lat.p**scale
    out = []
    for c in range(n):
        row = [inv[r][c] * f for r in range(n)]
        if any(x.denominator != 1 for x in row):
            raise ArithmeticError("scale too small for dual")
        out.append([int(x) for x in row])
    return out


def lattice_intersection(a: HNFLattice, b: HNFLattice) -> HNFLattice:
    """Intersection via duality: (A* + B*)* ."""
    p = a.p
    N = max(a.index_exponent, b.index_exponent)
    s = canonicalize(_scaled_dual(a, N) + _scaled_dual(b, N), p)
    # s = p^N (A* + B*); its dual scaled by p^N is A ∩ B
    return canonicalize(_scaled_dual(s, N), p)


def superlattices_index_p(k: HNFLattice) -> list[HNFLattice]:
    """Every H with K <= H <= Z_p^n and [H : K] = p."""
    p, n = k.p, k.n
    found = {}
    for coeffs in itertools.product(range(p), repeat=n):
        if not any(coeffs):
            continue
        v = [sum(a * k.rows[r][c] for r, a in enumerate(coeffs)) for c in range(n)]
        if any(x % p for x in v):
            continue
        x = [x // p for x in v]
        if rows_contain(k.rows, x):
            continue
        h = canonicalize(list(k.rows) + [x], p)
        found.setdefault(h.rows, h)
    return [found[key] for key in sorted(found)]
