"""Exact arithmetic: p-adic valuations, q-analogs, truncated series and
rational-function reconstruction.

Everything here works over the integers and ``fractions.Fraction``; no
floating point is used anywhere in the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class _Infinity:
    """Valuation of zero. Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("subzeta.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("INF - INF is undefined")
        return self

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def int_valuation(x: int, p: int):
    """v_p of an integer; INF for 0."""
    if x == 0:
        return INF
    if x < 0:
        x = -x
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def valuation(x, p: int):
    """p-adic valuation of an integer or rational.

    >>> valuation(8, 2), valuation(Fraction(3, 4), 2), valuation(5, 3)
    (3, -2, 0)
    >>> valuation(0, 7)
    INF
    """
    x = Fraction(x)
    if x == 0:
        return INF
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def capped_valuation(x: int, p: int, cap: int) -> int:
    v = int_valuation(x, p)
    return cap if v is INF or v > cap else v


def gaussian_binomial(a: int, b: int, q: int) -> int:
    """Gaussian binomial coefficient, via the product formula.

    Returns 0 when ``b > a`` and 1 when ``b == 0``.
    """
    if b < 0 or b > a:
        return 0
    num = 1
    for k in range(b):
        num *= 1 - q ** (a - k)
    den = 1
    for k in range(1, b + 1):
        den *= 1 - q**k
    quotient, rem = divmod(num, den)
    assert rem == 0
    return quotient


def limit_gaussian(n: int, q: int) -> Fraction:
    """The p-adic limit 1/((1-q)(1-q^2)...(1-q^(n-1)))."""
    den = 1
    for j in range(1, n):
        den *= 1 - q**j
    return Fraction(1, den)


def smith_valuations(matrix: Sequence[Sequence[int]], p: int, cap: int | None = None):
    """Valuations of the elementary divisors of an integer matrix over Z_p.

    Returned in ascending order; there are ``min(rows, cols)`` of them, with
    INF for zero divisors.  With ``cap`` the computation is done modulo
    ``p**cap`` and every valuation is reported as at most ``cap``.
    """
    mod = p**cap if cap is not None else None
    rows = [list(r) for r in matrix]
    if mod is not None:
        rows = [[x % mod for x in r] for r in rows]
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    out = []
    for _ in range(min(m, ncols)):
        best = None
        for ri, r in enumerate(rows):
            for ci, x in enumerate(r):
                if x:
                    v = int_valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, ri, ci)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, ri, ci = best
        pivot_row = rows.pop(ri)
        a = pivot_row[ci]
        unit = a // p**v
        pv = p**v
        for r in rows:
            b = r[ci]
            if b:
                f = b // pv
                for j in range(ncols):
                    r[j] = unit * r[j] - f * pivot_row[j]
                if mod is not None:
                    for j in range(ncols):
                        r[j] %= mod
        # column elimination is implied: the pivot divides everything left
        for r in rows:
            r[ci] = 0
        out.append(v)
    k = min(m, ncols)
    fill = cap if cap is not None else INF
    out = [min(v, cap) if cap is not None else v for v in out]
    out.extend([fill] * (k - len(out)))
    return out


# ---------------------------------------------------------------------------
# polynomials in t (lists of coefficients, constant term first)


def poly_mul(a: Sequence, b: Sequence, limit: int | None = None) -> list:
    if not a or not b:
        return []
    size = len(a) + len(b) - 1
    if limit is not None:
        size = min(size, limit)
    out = [0] * size
    for i, x in enumerate(a):
        if not x or i >= size:
            continue
        for j, y in enumerate(b):
            if i + j >= size:
                break
            out[i + j] += x * y
    return out


def poly_trim(a: Sequence) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def factor_poly(a: int, b: int, p: int) -> list[int]:
    """Coefficients of 1 - p^a t^b."""
    out = [0] * (b + 1)
    out[0] = 1
    out[b] -= p**a
    return out


def factors_poly(factors: Iterable[tuple[int, int, int]], p: int) -> list[int]:
    out = [1]
    for a, b, mult in factors:
        for _ in range(mult):
            out = poly_mul(out, factor_poly(a, b, p))
    return out


def _exact_divide(num: Sequence, den: Sequence):
    """Polynomial quotient num/den if exact, else None. den[0] must be 1."""
    num = poly_trim(num)
    den = poly_trim(den)
    if len(num) < len(den):
        return None if num else []
    rem = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot)):
        c = rem[i]
        quot[i] = c
        if c:
            for j, d in enumerate(den):
                rem[i + j] -= c * d
    if any(rem):
        return None
    return quot


def format_poly(coeffs: Sequence, var: str = "t") -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        terms.append((sign, body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


def format_factor(a: int, b: int, p: int) -> str:
    mono = "t" if b == 1 else f"t^{b}"
    coef = p**a
    return f"(1 - {mono})" if coef == 1 else f"(1 - {coef}*{mono})"


# ---------------------------------------------------------------------------
# truncated power series


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in t known through t^(len(coeffs)-1)."""

    p: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_poly(cls, p: int, poly: Sequence, order: int) -> "TruncatedSeries":
        c = list(poly[: order + 1]) + [0] * max(0, order + 1 - len(poly))
        return cls(p, tuple(c))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.p, self.coeffs[: order + 1])

    def _common(self, other: "TruncatedSeries") -> int:
        if self.p != other.p:
            raise ValueError("series over different primes")
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        k = self._common(other)
        return TruncatedSeries(self.p, tuple(a + b for a, b in zip(self.coeffs[: k + 1], other.coeffs)))

    def __neg__(self):
        return TruncatedSeries(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        k = self._common(other)
        return TruncatedSeries(self.p, tuple(poly_mul(self.coeffs, other.coeffs, limit=k + 1)))

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries(self.p, tuple(c * a for a in self.coeffs))

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv = [Fraction(1) / c0]
        for k in range(1, len(self.coeffs)):
            s = sum(self.coeffs[j] * inv[k - j] for j in range(1, k + 1))
            inv.append(-s / c0)
        return TruncatedSeries(self.p, tuple(inv))

    def __truediv__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self * other.inverse()


# ---------------------------------------------------------------------------
# rational reconstruction


@dataclass(frozen=True)
class RationalFit:
    """numerator / prod (1 - p^a t^b)^mult, checked through ``verified_through``.

    ``numerator_factors`` is set when the numerator itself is presented as a
    product of factors of the same shape.
    """

    p: int
    numerator: tuple
    denominator: tuple[tuple[int, int, int], ...]
    verified_through: int
    numerator_factors: tuple[tuple[int, int, int], ...] | None = None

    @property
    def denominator_degree(self) -> int:
        return sum(b * m for _, b, m in self.denominator)

    def denominator_poly(self) -> list[int]:
        return factors_poly(self.denominator, self.p)

    def expand(self, order: int) -> TruncatedSeries:
        num = TruncatedSeries.from_poly(self.p, self.numerator, order)
        den = TruncatedSeries.from_poly(self.p, self.denominator_poly(), order)
        return num / den

    def same_function(self, other: "RationalFit") -> bool:
        lhs = poly_trim(poly_mul(self.numerator, other.denominator_poly()))
        rhs = poly_trim(poly_mul(other.numerator, self.denominator_poly()))
        return lhs == rhs

    def __str__(self):
        if self.numerator_factors:
            num = "".join(format_factor(a, b, self.p) * m for a, b, m in self.numerator_factors)
        else:
            num = f"({format_poly(self.numerator)})"
        den = "".join(format_factor(a, b, self.p) * m for a, b, m in self.denominator) or "1"
        return f"{num} / ({den})" if self.denominator else num


def _group(multiset: Sequence[tuple[int, int]]) -> tuple[tuple[int, int, int], ...]:
    out = []
    for key, grp in itertools.groupby(multiset):
        out.append((key[0], key[1], len(list(grp))))
    return tuple(out)


def _multisets(cands: list[tuple[int, int]], max_mult: int, max_degree: int):
    """All multisets of candidate factors with total t-degree <= max_degree."""
    out = []

    def rec(start, chosen, degree):
        out.append(tuple(chosen))
        for idx in range(start, len(cands)):
            a, b = cands[idx]
            count = 0
            for c in reversed(chosen):
                if c == (a, b):
                    count += 1
                else:
                    break
            if count >= max_mult or degree + b > max_degree:
                continue
            chosen.append((a, b))
            rec(idx, chosen, degree + b)
            chosen.pop()

    rec(0, [], 0)
    out.sort(key=lambda ms: (sum(b for _, b in ms), ms))
    return out


def fit_rational(
    series: TruncatedSeries,
    candidate_exponents: Iterable[tuple[int, int]],
    max_multiplicity: int,
    margin: int = 2,
) -> RationalFit | None:
    """Find the lowest-degree denominator prod (1 - p^a t^b)^m reproducing ``series``.

    For each trial denominator Q the numerator is read off from series*Q; the
    fit is accepted only when the coefficients above the numerator degree
    vanish in at least ``deg Q + margin`` places.  Returns None when no
    candidate denominator works.
    """
    cands = sorted(set((int(a), int(b)) for a, b in candidate_exponents))
    if any(a < 0 or b < 1 for a, b in cands):
        raise ValueError("candidate exponents need a >= 0, b >= 1")
    coeffs = list(series.coeffs)
    length = len(coeffs)
    max_degree = length - 1 - margin
    if max_degree < 0:
        return None
    for ms in _multisets(cands, max_multiplicity, max_degree):
        factors = _group(ms)
        d = sum(b for _, b in ms)
        den = factors_poly(factors, series.p)
        prod = poly_mul(coeffs, den, limit=length)
        num = poly_trim(prod)
        if not num:
            continue
        zeros = length - len(num)
        if zeros < d + margin:
            continue
        num = tuple(int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in num)
        return RationalFit(series.p, num, factors, length - 1)
    return None


def _factorizations(poly: list, cands: list[tuple[int, int]], p: int, start: int = 0):
    """First way of writing ``poly`` as a product of (1 - p^a t^b) factors."""
    if poly == [1]:
        return []
    for idx in range(start, len(cands)):
        a, b = cands[idx]
        q = _exact_divide(poly, factor_poly(a, b, p))
        if q is None:
            continue
        rest = _factorizations(poly_trim(q), cands, p, idx)
        if rest is not None:
            return [(a, b)] + rest
    return None


def factored_presentation(
    fit: RationalFit,
    candidate_exponents: Iterable[tuple[int, int]],
    max_multiplicity: int,
    max_extra_degree: int = 4,
) -> RationalFit | None:
    """Rewrite a fit so that numerator and denominator are both products of
    (1 - p^a t^b) factors, multiplying through by the smallest such product.

    Returns None when no multiplier of degree <= ``max_extra_degree`` works.
    """
    cands = sorted(set((int(a), int(b)) for a, b in candidate_exponents))
    num = poly_trim(list(fit.numerator))
    if not num or num[0] != 1 or any(Fraction(c).denominator != 1 for c in num):
        return None
    num = [int(c) for c in num]
    for ms in _multisets(cands, max_multiplicity, max_extra_degree):
        extra = _group(ms)
        lifted = poly_trim(poly_mul(num, factors_poly(extra, fit.p)))
        fac = _factorizations(lifted, cands, fit.p)
        if fac is None:
            continue
        den_ms = sorted(
            [(a, b) for a, b, m in fit.denominator for _ in range(m)] + list(ms)
        )
        return RationalFit(
            fit.p,
            tuple(lifted),
            _group(den_ms),
            fit.verified_through,
            numerator_factors=_group(sorted(fac)),
        )
    return None


# ---------------------------------------------------------------------------
# p-adic convergence at finite depth


@dataclass(frozen=True)
class LimitReport:
    p: int
    differences: tuple  # v_p(a_i - a_{i+1})
    to_target: tuple | None  # v_p(a_i - target)
    target: Fraction | None = None

    @staticmethod
    def _nondecreasing(vals) -> bool:
        return all(a <= b for a, b in zip(vals, vals[1:]))

    @staticmethod
    def _increasing(vals) -> bool:
        return all(a < b or (a is INF and b is INF) for a, b in zip(vals, vals[1:]))

    @property
    def differences_nondecreasing(self) -> bool:
        return self._nondecreasing(self.differences)

    @property
    def target_nondecreasing(self) -> bool:
        return self.to_target is not None and self._nondecreasing(self.to_target)

    @property
    def target_increasing(self) -> bool:
        return self.to_target is not None and self._increasing(self.to_target)


def padic_limit_report(sequence: Sequence, p: int, target=None) -> LimitReport:
    """Valuation table for a_i -> target p-adically, over the given window."""
    if not sequence:
        raise ValueError("empty sequence")
    seq = [Fraction(a) for a in sequence]
    diffs = tuple(valuation(a - b, p) for a, b in zip(seq, seq[1:]))
    to_target = None
    if target is not None:
        target = Fraction(target)
        to_target = tuple(valuation(a - target, p) for a in seq)
    return LimitReport(p, diffs, to_target, target)
