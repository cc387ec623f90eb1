"""Finite-dimensional Z_p-algebras given by integer structure constants.

Indices are 0-based throughout the library; ``e_i * e_j = sum_k c[i][j][k] e_k``
is stored sparsely as a mapping ``(i, j) -> ((k, c), ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactmath import INF, int_valuation, is_prime, smith_valuations


@dataclass(frozen=True)
class StructureAlgebra:
    name: str
    n: int
    p: int
    constants: tuple[tuple[int, int, int, int], ...]
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        merged: dict[tuple[int, int, int], int] = {}
        for i, j, k, c in self.constants:
            for idx in (i, j, k):
                if not 0 <= idx < self.n:
                    raise ValueError(f"index {idx} out of range for dimension {self.n}")
            merged[(i, j, k)] = merged.get((i, j, k), 0) + int(c)
        consts = tuple(sorted((i, j, k, c) for (i, j, k), c in merged.items() if c))
        object.__setattr__(self, "constants", consts)
        if self.weights is not None:
            w = tuple(int(x) for x in self.weights)
            if len(w) != self.n or any(x < 1 for x in w):
                raise ValueError("weights must be n positive integers")
            if any(a > b for a, b in zip(w, w[1:])):
                raise ValueError("weights must be non-decreasing")
            object.__setattr__(self, "weights", w)
        table: dict[tuple[int, int], list] = {}
        for i, j, k, c in consts:
            table.setdefault((i, j), []).append((k, c))
        object.__setattr__(self, "_table", {key: tuple(v) for key, v in table.items()})

    @classmethod
    def from_table(cls, name, n, p, products: Mapping, weights=None) -> "StructureAlgebra":
        """Build from ``{(i, j): {k: c}}``."""
        consts = [(i, j, k, c) for (i, j), vec in products.items() for k, c in vec.items()]
        return cls(name, n, p, tuple(consts), weights)

    @property
    def table(self) -> dict[tuple[int, int], tuple[tuple[int, int], ...]]:
        return self._table  # type: ignore[attr-defined]

    def constant(self, i: int, j: int, k: int) -> int:
        for kk, c in self.table.get((i, j), ()):
            if kk == k:
                return c
        return 0

    def dense(self) -> list[list[list[int]]]:
        c = [[[0] * self.n for _ in range(self.n)] for _ in range(self.n)]
        for i, j, k, v in self.constants:
            c[i][j][k] = v
        return c

    def with_prime(self, p: int) -> "StructureAlgebra":
        return StructureAlgebra(self.name, self.n, p, self.constants, self.weights)

    def basis(self, i: int) -> list[int]:
        v = [0] * self.n
        v[i] = 1
        return v

    @property
    def is_abelian(self) -> bool:
        return not self.constants


def multiply(A: StructureAlgebra, x: Sequence, y: Sequence) -> list:
    out = [0] * A.n
    for (i, j), terms in A.table.items():
        xi = x[i]
        if not xi:
            continue
        yj = y[j]
        if not yj:
            continue
        s = xi * yj
        for k, c in terms:
            out[k] += c * s
    return out


def is_lie(A: StructureAlgebra) -> bool:
    n = A.n
    e = [A.basis(i) for i in range(n)]
    for i in range(n):
        if any(multiply(A, e[i], e[i])):
            return False
        for j in range(i + 1, n):
            a = multiply(A, e[i], e[j])
            b = multiply(A, e[j], e[i])
            if any(x + y for x, y in zip(a, b)):
                return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                t1 = multiply(A, e[i], multiply(A, e[j], e[k]))
                t2 = multiply(A, e[j], multiply(A, e[k], e[i]))
                t3 = multiply(A, e[k], multiply(A, e[i], e[j]))
                if any(a + b + c for a, b, c in zip(t1, t2, t3)):
                    return False
    return True


# ---------------------------------------------------------------------------
# submodules of Z_p^n


@dataclass(frozen=True)
class SubmoduleBasis:
    n: int
    p: int
    vectors: tuple[tuple[int, ...], ...]
    saturated: bool = False

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def elementary_valuations(self) -> list:
        if not self.vectors:
            return []
        return smith_valuations(self.vectors, self.p)

    def min_valuation(self):
        """Largest m with the submodule inside p^m Z_p^n (INF when zero)."""
        best = INF
        for v in self.vectors:
            for x in v:
                if x:
                    best = min(best, int_valuation(x, self.p))
        return best

    def same_as_nested(self, other: "SubmoduleBasis") -> bool:
        """Equality test valid when one of the two contains the other."""
        if self.rank != other.rank:
            return False
        return sum(self.elementary_valuations()) == sum(other.elementary_valuations())


def _strip_unit_content(v: list[int], p: int) -> list[int]:
    g = 0
    for x in v:
        g = _gcd(g, x)
    if g == 0:
        return v
    while g % p == 0:
        g //= p
    if g > 1:
        v = [x // g for x in v]
    return v


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def submodule_basis(vectors: Iterable[Sequence[int]], n: int, p: int) -> SubmoduleBasis:
    """A basis of the Z_p-span of integer vectors, by p-local elimination."""
    pool = [_strip_unit_content(list(v), p) for v in vectors if any(v)]
    basis = []
    while pool:
        best = None
        for ri, v in enumerate(pool):
            for ci, x in enumerate(v):
                if x:
                    val = int_valuation(x, p)
                    if best is None or val < best[0]:
                        best = (val, ri, ci)
        val, ri, ci = best
        piv = pool.pop(ri)
        pv = p**val
        unit = piv[ci] // pv
        rest = []
        for v in pool:
            b = v[ci]
            if b:
                f = b // pv
                v = [unit * a - f * q for a, q in zip(v, piv)]
            if any(v):
                rest.append(_strip_unit_content(v, p))
        pool = rest
        basis.append(tuple(piv))
    return SubmoduleBasis(n, p, tuple(basis))


def _nullspace_mod_p(vectors: list[list[int]], p: int):
    """A nonzero coefficient vector a with sum a_i v_i = 0 mod p, or None."""
    m = len(vectors)
    n = len(vectors[0]) if vectors else 0
    # rows: vectors augmented with identity to track combinations
    rows = [[x % p for x in v] + [1 if k == i else 0 for k in range(m)] for i, v in enumerate(vectors)]
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, m) if rows[k][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for k in range(m):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [(a - f * b) % p for a, b in zip(rows[k], rows[r])]
        r += 1
    if r == m:
        return None
    return rows[r][n:]


def saturate(vectors: Sequence[Sequence[int]], n: int, p: int) -> SubmoduleBasis:
    """Basis of (Q_p-span of vectors) intersected with Z_p^n."""
    vecs = [list(v) for v in submodule_basis(vectors, n, p).vectors]
    while vecs:
        comb = _nullspace_mod_p(vecs, p)
        if comb is None:
            break
        k = next(i for i, a in enumerate(comb) if a)
        s = [sum(a * v[c] for a, v in zip(comb, vecs)) for c in range(n)]
        vecs[k] = _strip_unit_content([x // p for x in s], p)
    return SubmoduleBasis(n, p, tuple(tuple(v) for v in vecs), saturated=True)


def _rational_kernel(matrix: list[list[int]], n: int) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} over Q, for M with n columns."""
    rows = [[Fraction(x) for x in r] for r in matrix if any(r)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -rows[row_idx][fc]
        out.append(v)
    return out


def _integral(v: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in v:
        den = den * x.denominator // _gcd(den, x.denominator)
    return [int(x * den) for x in v]


# ---------------------------------------------------------------------------
# product chain, nilpotency


def product_chain_step(A: StructureAlgebra, Tk: SubmoduleBasis) -> SubmoduleBasis:
    """T_{k+1} = span{x*y, y*x : x in T_k, y in Z_p^n}."""
    gens = []
    for x in Tk.vectors:
        for j in range(A.n):
            e = A.basis(j)
            gens.append(multiply(A, x, e))
            gens.append(multiply(A, e, x))
    return submodule_basis(gens, A.n, A.p)


def product_chain(A: StructureAlgebra, length: int) -> list[SubmoduleBasis]:
    """[T_1, ..., T_length]."""
    T = submodule_basis([A.basis(i) for i in range(A.n)], A.n, A.p)
    chain = [T]
    while len(chain) < length:
        T = product_chain_step(A, T)
        chain.append(T)
    return chain


def nilpotency_class(A: StructureAlgebra, depth_bound: int = 32) -> int | None:
    """Least c with T_{c+1} = 0, or None when T_{depth_bound+1} is nonzero."""
    if depth_bound < 1:
        raise ValueError("depth_bound must be >= 1")
    T = submodule_basis([A.basis(i) for i in range(A.n)], A.n, A.p)
    for c in range(1, depth_bound + 1):
        T = product_chain_step(A, T)
        if T.rank == 0:
            return c
    return None


@dataclass(frozen=True)
class ResidualVerdict:
    status: str  # "verified" | "refuted" | "inconclusive"
    depth: int | None
    precision: int

    def __bool__(self):
        return self.status == "verified"


def is_residually_nilpotent(A: StructureAlgebra, precision: int, depth_bound: int = 32) -> ResidualVerdict:
    """Semidecide whether the product chain shrinks into p^precision Z_p^n."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    T = submodule_basis([A.basis(i) for i in range(A.n)], A.n, A.p)
    for k in range(1, depth_bound + 1):
        if T.min_valuation() >= precision:
            return ResidualVerdict("verified", k, precision)
        nxt = product_chain_step(A, T)
        if nxt.same_as_nested(T):
            return ResidualVerdict("refuted", k, precision)
        T = nxt
    return ResidualVerdict("inconclusive", None, precision)


def verify_grading(A: StructureAlgebra, weights: Sequence[int] | None = None) -> bool:
    w = A.weights if weights is None else tuple(weights)
    if w is None:
        raise ValueError("no weights supplied")
    if len(w) != A.n or any(x < 1 for x in w):
        raise ValueError("weights must be n positive integers")
    return all(w[k] == w[i] + w[j] for i, j, k, _ in A.constants)


# ---------------------------------------------------------------------------
# centre


@dataclass(frozen=True)
class Centre:
    """Saturated basis of the centre, a complement, and (for class 2) the
    product of complement vectors written in centre coordinates."""

    basis: SubmoduleBasis
    complement: tuple[tuple[int, ...], ...]
    induced: tuple | None  # induced[s][t] = centre coordinates of u_s * u_t

    @property
    def rank(self) -> int:
        return self.basis.rank

    @property
    def a(self) -> int:
        return len(self.complement)

    @property
    def b(self) -> int:
        return self.basis.rank


def _coordinates(vec: Sequence[int], basis: Sequence[Sequence[int]]) -> list[Fraction] | None:
    """Solve vec = sum x_k basis_k over Q; None when vec is outside the span."""
    m = len(basis)
    n = len(vec)
    aug = [[Fraction(basis[k][c]) for k in range(m)] + [Fraction(vec[c])] for c in range(n)]
    r = 0
    pivcols = []
    for c in range(m):
        piv = next((k for k in range(r, n) if aug[k][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        lead = aug[r][c]
        aug[r] = [x / lead for x in aug[r]]
        for k in range(n):
            if k != r and aug[k][c]:
                f = aug[k][c]
                aug[k] = [a - f * b for a, b in zip(aug[k], aug[r])]
        pivcols.append(c)
        r += 1
    if any(aug[k][m] for k in range(r, n)):
        return None
    out = [Fraction(0)] * m
    for row, c in enumerate(pivcols):
        out[c] = aug[row][m]
    return out


def centre(A: StructureAlgebra) -> Centre:
    n, p = A.n, A.p
    # x is central iff x*e_j = e_j*x = 0 for all j; rows of the linear map
    rows = []
    for j in range(n):
        e = A.basis(j)
        for out in range(n):
            rows.append([multiply(A, A.basis(i), e)[out] for i in range(n)])
            rows.append([multiply(A, e, A.basis(i))[out] for i in range(n)])
    kernel = [_integral(v) for v in _rational_kernel(rows, n)]
    basis = saturate(kernel, n, p) if kernel else SubmoduleBasis(n, p, (), saturated=True)
    # complement: standard vectors extending the centre basis mod p
    chosen = [list(v) for v in basis.vectors]
    complement = []
    for j in range(n):
        cand = chosen + [A.basis(j)]
        if _nullspace_mod_p(cand, p) is None:
            chosen.append(A.basis(j))
            complement.append(tuple(A.basis(j)))
    induced = None
    if nilpotency_class(A, 2) is not None and basis.rank:
        induced = []
        for u in complement:
            row = []
            for v in complement:
                coords = _coordinates(multiply(A, u, v), basis.vectors)
                if coords is None:
                    raise ArithmeticError("product of class-2 algebra left the centre")
                row.append(tuple(coords))
            induced.append(tuple(row))
        induced = tuple(induced)
    return Centre(basis, tuple(complement), induced)


# ---------------------------------------------------------------------------
# derived algebras


def pi_scale(A: StructureAlgebra) -> StructureAlgebra:
    """The algebra on the basis p*e_i: every structure constant times p."""
    return StructureAlgebra(
        f"pi-{A.name}", A.n, A.p, tuple((i, j, k, c * A.p) for i, j, k, c in A.constants), A.weights
    )


def dilation_matrix(A: StructureAlgebra, lam: int, precision: int, check: bool = True) -> list[list[int]]:
    """diag(lam^w_1, ..., lam^w_n) mod p^precision for a graded algebra."""
    if lam % A.p == 0:
        raise ValueError(f"{lam} is not a unit mod {A.p}")
    if A.weights is None or not verify_grading(A):
        raise ValueError("algebra has no verified grading")
    mod = A.p**precision
    diag = [pow(lam, w, mod) for w in A.weights]
    T = [[diag[i] if i == j else 0 for j in range(A.n)] for i in range(A.n)]
    if check:
        for i in range(A.n):
            for j in range(A.n):
                lhs = multiply(A, [x * diag[i] if k == i else 0 for k, x in enumerate(A.basis(i))],
                               [x * diag[j] if k == j else 0 for k, x in enumerate(A.basis(j))])
                rhs = [diag[k] * x for k, x in enumerate(multiply(A, A.basis(i), A.basis(j)))]
                if any((a - b) % mod for a, b in zip(lhs, rhs)):
                    raise ArithmeticError("dilation is not an algebra endomorphism")
    return T


def apply_matrix(T: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    """T acting on a column vector."""
    return [sum(T[r][c] * x[c] for c in range(len(x))) for r in range(len(T))]

