"""Subalgebra, ideal and lattice counting with weight and type strata.

One enumeration pass per index records everything at once: the plain lattice
count, the subalgebra and ideal counts, and for primitive lattices the weight
and the elementary-divisor type.  Passes are split into work units that can be
farmed out to a process pool; shards are merged by addition.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .algebra import StructureAlgebra, centre, multiply, nilpotency_class
from .exactmath import int_valuation, smith_valuations, valuation
from .lattice import (
    DivisorType,
    HNFLattice,
    WorkUnit,
    _rows_builder,
    coefficients,
    enumerate_sublattices,
    is_primitive,
    superlattices_index_p,
    work_units,
)


class InvariantViolation(RuntimeError):
    """An internal cross-check failed; results cannot be trusted."""


KINDS = ("lattice", "subalgebra", "ideal")


# ---------------------------------------------------------------------------
# compiled multiplication


@dataclass(frozen=True)
class CompiledAlgebra:
    """Flat product data for the hot loop.  Picklable."""

    n: int
    p: int
    terms: tuple[tuple[int, int, int, int], ...]
    anti: bool

    @classmethod
    def of(cls, A: StructureAlgebra) -> "CompiledAlgebra":
        anti = all(A.constant(i, i, k) == 0 for i in range(A.n) for k in range(A.n)) and all(
            A.constant(i, j, k) == -A.constant(j, i, k)
            for i in range(A.n)
            for j in range(A.n)
            for k in range(A.n)
        )
        return cls(A.n, A.p, A.constants, anti)

    def pairs(self) -> list[tuple[int, int]]:
        """Row pairs whose products decide closure."""
        n = self.n
        if self.anti:
            return [(a, b) for a in range(n) for b in range(a + 1, n)]
        return [(a, b) for a in range(n) for b in range(n)]

    def left_terms(self) -> list[list[tuple[int, int, int]]]:
        """For each basis index i: the (j, k, c) with e_i e_j having a c e_k term."""
        out = [[] for _ in range(self.n)]
        for i, j, k, c in self.terms:
            out[i].append((j, k, c))
        return out

    def right_terms(self) -> list[list[tuple[int, int, int]]]:
        out = [[] for _ in range(self.n)]
        for i, j, k, c in self.terms:
            out[j].append((i, k, c))
        return out


def _product(terms, n, x, y):
    out = [0] * n
    for i, j, k, c in terms:
        a = x[i]
        if a:
            b = y[j]
            if b:
                out[k] += c * a * b
    return out


def _deficiency(rows, exps, p, x) -> int:
    """Least d with p^d x in the lattice spanned by canonical ``rows``."""
    x = list(x)
    d = 0
    for c in range(len(rows) - 1, -1, -1):
        xc = x[c]
        if xc:
            row = rows[c]
            dg = row[c]
            if xc % dg:
                t = exps[c] - int_valuation(xc, p)
                s = p**t
                x = [v * s for v in x]
                d += t
                xc = x[c]
            q = xc // dg
            for k in range(c):
                x[k] -= q * row[k]
    return d


def _contained(rows, x) -> bool:
    x = list(x)
    for c in range(len(rows) - 1, -1, -1):
        xc = x[c]
        if xc:
            row = rows[c]
            dg = row[c]
            if xc % dg:
                return False
            q = xc // dg
            for k in range(c):
                x[k] -= q * row[k]
    return True


# ---------------------------------------------------------------------------
# predicates on single lattices


def is_subalgebra(lat: HNFLattice, A: StructureAlgebra) -> bool:
    if lat.n != A.n:
        raise ValueError("dimension mismatch")
    ca = CompiledAlgebra.of(A)
    return all(_contained(lat.rows, _product(ca.terms, ca.n, lat.rows[a], lat.rows[b])) for a, b in ca.pairs())


def is_ideal(lat: HNFLattice, A: StructureAlgebra) -> bool:
    if lat.n != A.n:
        raise ValueError("dimension mismatch")
    for y in lat.rows:
        for k in range(A.n):
            e = A.basis(k)
            if not _contained(lat.rows, multiply(A, e, y)):
                return False
            if not _contained(lat.rows, multiply(A, y, e)):
                return False
    return True


def weight(lat: HNFLattice, A: StructureAlgebra) -> int:
    """Least w with p^w times the (primitive) lattice a subalgebra."""
    if not is_primitive(lat):
        raise ValueError("weight is defined for primitive lattices only")
    ca = CompiledAlgebra.of(A)
    return max(
        (_deficiency(lat.rows, lat.exps, lat.p, _product(ca.terms, ca.n, lat.rows[a], lat.rows[b])) for a, b in ca.pairs()),
        default=0,
    )


def lattice_type(rows, p) -> tuple[tuple[int, int], ...]:
    """Type key ((position, jump), ...) of a full-rank lattice; same as
    ``DivisorType.key`` without building the object."""
    lam = sorted(smith_valuations(rows, p), reverse=True)
    return tuple((k + 1, lam[k] - lam[k + 1]) for k in range(len(lam) - 1) if lam[k] != lam[k + 1])


# ---------------------------------------------------------------------------
# the survey pass


@dataclass
class Shard:
    """Counts from one slice of the enumeration at a fixed index."""

    lattices: int = 0
    subalgebras: int = 0
    ideals: int = 0
    weights: Counter = field(default_factory=Counter)  # w -> primitive count
    types: Counter = field(default_factory=Counter)  # (type key, w) -> count

    def merge(self, other: "Shard") -> "Shard":
        self.lattices += other.lattices
        self.subalgebras += other.subalgebras
        self.ideals += other.ideals
        self.weights.update(other.weights)
        self.types.update(other.types)
        return self


def survey_unit(args) -> Shard:
    """Worker entry point: ``args = (compiled algebra, work unit, with_types)``."""
    ca, unit, with_types = args
    n, p = ca.n, ca.p
    terms = ca.terms
    pairs = ca.pairs()
    left = ca.left_terms()
    right = ca.right_terms()
    exps = unit.exps
    build = _rows_builder(n, p, exps)
    abelian = not terms
    # a lattice is primitive iff some entry is a unit; the diagonal decides
    # unless every diagonal exponent is positive
    diag_unit = any(e == 0 for e in exps)
    shard = Shard()
    wcount = shard.weights
    tcount = shard.types
    sub = ideal = total = 0
    for vals in itertools.product(*unit.ranges()):
        total += 1
        rows = build(vals)
        primitive = diag_unit or any(v % p for v in vals)
        if abelian:
            sub += 1
            ideal += 1
            if primitive:
                wcount[0] += 1
                if with_types:
                    tcount[(lattice_type(rows, p), 0)] += 1
            continue
        if primitive:
            w = 0
            for a, b in pairs:
                x = _product(terms, n, rows[a], rows[b])
                if any(x):
                    d = _deficiency(rows, exps, p, x)
                    if d > w:
                        w = d
            wcount[w] += 1
            if with_types:
                tcount[(lattice_type(rows, p), w)] += 1
            is_sub = w == 0
        else:
            is_sub = True
            for a, b in pairs:
                x = _product(terms, n, rows[a], rows[b])
                if any(x) and not _contained(rows, x):
                    is_sub = False
                    break
        if not is_sub:
            continue
        sub += 1
        # ideals are subalgebras, so only subalgebras need the ideal test
        is_id = True
        for y in rows:
            for k in range(n):
                x = [0] * n
                for j, kk, c in left[k]:
                    if y[j]:
                        x[kk] += c * y[j]
                if any(x) and not _contained(rows, x):
                    is_id = False
                    break
                if not ca.anti:
                    x = [0] * n
                    for i, kk, c in right[k]:
                        if y[i]:
                            x[kk] += c * y[i]
                    if any(x) and not _contained(rows, x):
                        is_id = False
                        break
            if not is_id:
                break
        if is_id:
            ideal += 1
    shard.lattices = total
    shard.subalgebras = sub
    shard.ideals = ideal
    return shard


@dataclass
class Survey:
    """Everything one pass records, indexed by i."""

    algebra: str
    n: int
    p: int
    levels: dict[int, Shard] = field(default_factory=dict)

    @property
    def i_max(self) -> int:
        return max(self.levels) if self.levels else -1

    def series(self, kind: str) -> list[int]:
        attr = {"lattice": "lattices", "subalgebra": "subalgebras", "ideal": "ideals"}[kind]
        return [getattr(self.levels[i], attr) for i in range(self.i_max + 1)]

    def weight_strata(self) -> dict[tuple[int, int], int]:
        return {(i, w): c for i, s in self.levels.items() for w, c in sorted(s.weights.items())}

    def type_strata(self) -> dict[tuple, int]:
        out = {}
        for s in self.levels.values():
            for key, c in s.types.items():
                out[key] = out.get(key, 0) + c
        return out


_CACHE: dict[tuple, Shard] = {}


def survey_level(A: StructureAlgebra, i: int, pmap: Callable = map, with_types: bool = True) -> Shard:
    """One enumeration pass at index p^i.  Results are memoised per process."""
    key = (A, i, with_types)
    hit = _CACHE.get(key)
    if hit is None and not with_types:
        hit = _CACHE.get((A, i, True))
    if hit is not None:
        return hit
    ca = CompiledAlgebra.of(A)
    units = work_units(A.n, A.p, i)
    shard = Shard()
    for part in pmap(survey_unit, [(ca, u, with_types) for u in units]):
        shard.merge(part)
    _check_shard(A, i, shard)
    _CACHE[key] = shard
    return shard


def _check_shard(A: StructureAlgebra, i: int, shard: Shard) -> None:
    from .exactmath import gaussian_binomial

    expected = gaussian_binomial(A.n - 1 + i, A.n - 1, A.p)
    if shard.lattices != expected:
        raise InvariantViolation(f"enumerated {shard.lattices} lattices at i={i}, expected {expected}")
    if not shard.ideals <= shard.subalgebras <= shard.lattices:
        raise InvariantViolation("ideal/subalgebra/lattice counts out of order")
    prim = expected - (gaussian_binomial(A.n - 1 + i - A.n, A.n - 1, A.p) if i >= A.n else 0)
    if sum(shard.weights.values()) != prim:
        raise InvariantViolation("weight strata do not add up to the primitive count")
    if i == 0 and (shard.subalgebras, shard.ideals) != (1, 1):
        raise InvariantViolation("the full lattice must count once")


def survey(A: StructureAlgebra, i_max: int, pmap: Callable = map, with_types: bool = True) -> Survey:
    out = Survey(A.name, A.n, A.p)
    for i in range(i_max + 1):
        out.levels[i] = survey_level(A, i, pmap, with_types)
    return out


def count(A: StructureAlgebra, i: int, kind: str = "subalgebra", pmap: Callable = map) -> int:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if i < 0:
        raise ValueError("i must be >= 0")
    s = survey_level(A, i, pmap, with_types=False)
    return {"lattice": s.lattices, "subalgebra": s.subalgebras, "ideal": s.ideals}[kind]


def stratified_counts(A: StructureAlgebra, i: int, pmap: Callable = map):
    """(w -> count, (type key, w) -> count) for primitive lattices of index p^i."""
    s = survey_level(A, i, pmap, with_types=True)
    return dict(sorted(s.weights.items())), dict(sorted(s.types.items()))


def c_series(A: StructureAlgebra, k_max: int, pmap: Callable = map) -> list[int]:
    """c_k = sum of primitive counts at (i, w) with i + n w = k."""
    n = A.n
    levels = {i: survey_level(A, i, pmap, with_types=False) for i in range(k_max + 1)}
    c = [0] * (k_max + 1)
    for i, s in levels.items():
        for w, cnt in s.weights.items():
            k = i + n * w
            if k <= k_max:
                c[k] += cnt
    zeta = [levels[i].subalgebras for i in range(k_max + 1)]
    for k in range(k_max + 1):
        expected = zeta[k] - (zeta[k - n] if k >= n else 0)
        if c[k] != expected:
            raise InvariantViolation(f"c_{k} = {c[k]} but (1 - t^n) zeta gives {expected}")
    return c


def non_subalgebra_counts(A: StructureAlgebra, i: int, pmap: Callable = map) -> tuple[int, int]:
    s = survey_level(A, i, pmap, with_types=False)
    return s.lattices - s.subalgebras, s.lattices - s.ideals


# ---------------------------------------------------------------------------
# serialisation


@dataclass
class CountTable:
    algebra: str
    p: int
    kind: str
    entries: dict[int, int]
    weight_strata: dict[tuple[int, int], int] | None = None
    type_strata: dict[tuple, int] | None = None

    @classmethod
    def from_survey(cls, sv: Survey, kind: str, strata: bool = False) -> "CountTable":
        entries = dict(enumerate(sv.series(kind)))
        ws = ts = None
        if strata:
            ws = sv.weight_strata()
            ts = sv.type_strata() or None
        return cls(sv.algebra, sv.p, kind, entries, ws, ts)

    def to_text(self) -> str:
        lines = [f"{i}: {c}" for i, c in sorted(self.entries.items())]
        if self.weight_strata:
            lines.append("")
            lines.append("i  w  primitive")
            width = max(len(str(c)) for c in self.weight_strata.values())
            for (i, w), c in sorted(self.weight_strata.items()):
                lines.append(f"{i:<2} {w:<2} {str(c).rjust(width)}")
        if self.type_strata:
            lines.append("")
            lines.append("type  w  primitive")
            for (key, w), c in sorted(self.type_strata.items()):
                lines.append(f"{_type_text(key)}  {w}  {c}")
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        base = {"algebra": self.algebra, "p": self.p, "kind": self.kind}
        recs = [dict(base, i=i, count=c) for i, c in sorted(self.entries.items())]
        for (i, w), c in sorted((self.weight_strata or {}).items()):
            recs.append(dict(base, kind="weight", i=i, w=w, count=c))
        for (key, w), c in sorted((self.type_strata or {}).items()):
            recs.append(dict(base, kind="type", type=[list(t) for t in key], w=w, count=c))
        return "".join(json.dumps(r) + "\n" for r in recs)


def _type_text(key) -> str:
    return "{" + ",".join(f"{a}:{b}" for a, b in key) + "}"


# ---------------------------------------------------------------------------
# centre splitting for class-2 algebras


def _induced_mod(ctr, mod: int):
    """The class-2 product table reduced to integers mod ``mod``."""
    out = []
    for row in ctr.induced:
        r = []
        for vec in row:
            ints = []
            for x in vec:
                x = Fraction(x)
                ints.append(x.numerator * pow(x.denominator, -1, mod) % mod)
            r.append(ints)
        out.append(r)
    return out


def _gamma(table, x, y, b, mod):
    out = [0] * b
    for s, xs in enumerate(x):
        if xs:
            for t, yt in enumerate(y):
                if yt:
                    v = table[s][t]
                    for k in range(b):
                        out[k] += xs * yt * v[k]
    return [v % mod for v in out]


def class2_split_count(A: StructureAlgebra, i: int, kind: str = "subalgebra") -> int:
    """Count subalgebras (or ideals) of index p^i through pairs of lattices
    in A/Z(A) and Z(A), weighting each pair by p^(a i_2)."""
    if kind not in ("subalgebra", "ideal"):
        raise ValueError("kind must be subalgebra or ideal")
    cls = nilpotency_class(A, 2)
    if cls is None:
        raise ValueError("algebra is not nilpotent of class at most 2")
    ctr = centre(A)
    a, b, p = ctr.a, ctr.b, A.p
    total = 0
    for i2 in range(i + 1):
        i1 = i - i2
        if a == 0:
            if i1:
                continue
            lam1_list = [None]
        else:
            lam1_list = list(enumerate_sublattices(a, p, i1))
        mod = p ** max(i2, 1)
        table = _induced_mod(ctr, mod) if a else None
        lam2_list = list(enumerate_sublattices(b, p, i2))
        pairs = 0
        for l1 in lam1_list:
            if a == 0:
                pairs += len(lam2_list)
                continue
            if kind == "subalgebra":
                prods = [_gamma(table, x, y, b, mod) for x in l1.rows for y in l1.rows]
            else:
                es = [[1 if k == t else 0 for k in range(a)] for t in range(a)]
                prods = [_gamma(table, x, e, b, mod) for x in l1.rows for e in es]
                prods += [_gamma(table, e, x, b, mod) for x in l1.rows for e in es]
            prods = [v for v in prods if any(v)]
            for l2 in lam2_list:
                if all(_contained(l2.rows, v) for v in prods):
                    pairs += 1
        total += p ** (a * i2) * pairs
    return total


# ---------------------------------------------------------------------------
# double counting of index-p steps


def induced_algebra(H: HNFLattice, A: StructureAlgebra) -> StructureAlgebra:
    """Multiplication of a subalgebra H written in H's own row basis."""
    consts = []
    for a, x in enumerate(H.rows):
        for b, y in enumerate(H.rows):
            prod = multiply(A, x, y)
            if not any(prod):
                continue
            coords = coefficients(H, prod)
            for k, q in enumerate(coords):
                if q.denominator != 1:
                    raise ValueError("lattice is not a subalgebra")
                if q:
                    consts.append((a, b, k, int(q)))
    return StructureAlgebra(f"{A.name}|H", A.n, A.p, tuple(consts))


def _index_p_subalgebras(B: StructureAlgebra) -> int:
    return sum(1 for lat in enumerate_sublattices(B.n, B.p, 1) if is_subalgebra(lat, B))


@dataclass(frozen=True)
class GrowthReport:
    i: int
    lhs: int  # sum over H of a_p(H)
    rhs: int  # sum over K of b_p(K)
    a_values: tuple[int, ...]
    b_values: tuple[int, ...]

    @property
    def identity_holds(self) -> bool:
        return self.lhs == self.rhs

    def congruences_hold(self, p: int) -> bool:
        return all(v % p == 1 for v in self.a_values + self.b_values)


def local_growth_identity_check(A: StructureAlgebra, i: int) -> GrowthReport:
    """Both sides of  sum_{H} a_p(H) = sum_{K} b_p(K)  over subalgebras
    H of index p^i and K of index p^(i+1), by direct enumeration."""
    a_vals = []
    for H in enumerate_sublattices(A.n, A.p, i):
        if is_subalgebra(H, A):
            a_vals.append(_index_p_subalgebras(induced_algebra(H, A)))
    b_vals = []
    for K in enumerate_sublattices(A.n, A.p, i + 1):
        if is_subalgebra(K, A):
            b_vals.append(sum(1 for H in superlattices_index_p(K) if is_subalgebra(H, A)))
    return GrowthReport(i, sum(a_vals), sum(b_vals), tuple(a_vals), tuple(b_vals))
