"""Counting solutions of polynomial congruences mod p^i.

M_i(f) is the number of a in (Z/p^i)^n with f(a) = 0 mod p^i.  From the
counts we assemble the Poincare series, read off slopes v_p(M_i)/i, check
Jacobian-degeneracy hypotheses, and lift simple roots with Newton's method.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactmath import INF, TruncatedSeries, int_valuation, is_prime, smith_valuations, valuation

Monomial = tuple[tuple[int, ...], int]  # (exponents, coefficient)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PolySystem:
    n: int
    p: int
    polys: tuple[tuple[Monomial, ...], ...]
    name: str = ""

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        cleaned = []
        for poly in self.polys:
            acc: dict[tuple[int, ...], int] = {}
            for exps, c in poly:
                exps = tuple(int(e) for e in exps)
                if len(exps) != self.n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps}")
                acc[exps] = acc.get(exps, 0) + int(c)
            cleaned.append(tuple(sorted((e, c) for e, c in acc.items() if c)))
        if not cleaned:
            raise ValueError("a system needs at least one polynomial")
        object.__setattr__(self, "polys", tuple(cleaned))

    @property
    def m(self) -> int:
        return len(self.polys)

    def evaluate(self, a: Sequence[int]) -> list[int]:
        out = []
        for poly in self.polys:
            s = 0
            for exps, c in poly:
                t = c
                for x, e in zip(a, exps):
                    if e:
                        t *= x**e
                s += t
            out.append(s)
        return out

    def jacobian(self, a: Sequence[int]) -> list[list[int]]:
        J = []
        for poly in self.polys:
            row = [0] * self.n
            for exps, c in poly:
                for v in range(self.n):
                    e = exps[v]
                    if not e:
                        continue
                    t = c * e
                    for u, (x, f) in enumerate(zip(a, exps)):
                        k = f - 1 if u == v else f
                        if k:
                            t *= x**k
                    row[v] += t
            J.append(row)
        return J

    def degrees(self) -> list[set[int]]:
        return [{sum(e) for e, _ in poly} for poly in self.polys]

    def is_homogeneous(self) -> bool:
        return all(len(d) <= 1 for d in self.degrees())

    def min_degree(self):
        ds = [min(d) for d in self.degrees() if d]
        return min(ds) if ds else INF

    def with_prime(self, p: int) -> "PolySystem":
        return PolySystem(self.n, p, self.polys, self.name)


# ---------------------------------------------------------------------------
# text format


_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_polynomial(text: str, n: int) -> tuple[Monomial, ...]:
    """Parse ``3*x1^2*x2 - x2^3 + 5`` into monomials."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    out = []
    pos = 0
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        sign = -1 if mt.group(1) == "-" else 1
        coef = sign
        exps = [0] * n
        for factor in mt.group(2).replace(" ", "").split("*"):
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            fm = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
            if fm:
                v = int(fm.group(1))
                if not 1 <= v <= n:
                    raise ValueError(f"variable x{v} outside x1..x{n}")
                exps[v - 1] += int(fm.group(2) or 1)
            elif re.fullmatch(r"\d+", factor):
                coef *= int(factor)
            else:
                raise ValueError(f"bad factor {factor!r}")
        out.append((tuple(exps), coef))
        pos = mt.end()
    return tuple(out)


def parse_system(text: str, name: str = "") -> PolySystem:
    """Header ``n=2 p=3`` then one polynomial per line; ``#`` starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty polynomial file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        n, p = int(header["n"]), int(header["p"])
    except KeyError as e:
        raise ValueError(f"header must declare n and p, missing {e}") from None
    polys = tuple(parse_polynomial(line, n) for line in lines[1:])
    sys_ = PolySystem(n, p, polys, name or header.get("name", ""))
    if header.get("homogeneous", "").lower() in ("1", "yes", "true") and not sys_.is_homogeneous():
        raise ValueError("system declared homogeneous but is not")
    return sys_


def format_polynomial(poly: Sequence[Monomial]) -> str:
    if not poly:
        return "0"
    parts = []
    for exps, c in poly:
        factors = [f"x{v + 1}" + (f"^{e}" if e > 1 else "") for v, e in enumerate(exps) if e]
        mag = abs(c)
        body = "*".join(([str(mag)] if mag != 1 or not factors else []) + factors)
        parts.append(("-" if c < 0 else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# counting


def _naive_count(f: PolySystem, i: int, budget: int) -> int:
    mod = f.p**i
    if mod**f.n > budget:
        raise BudgetExceeded(f"{mod ** f.n} points exceed the budget of {budget}")
    return sum(
        1 for a in itertools.product(range(mod), repeat=f.n) if all(v % mod == 0 for v in f.evaluate(a))
    )


def _solve_mod_p(J: list[list[int]], rhs: list[int], p: int):
    """Affine solution set of J t = rhs over F_p: (particular, kernel basis) or None."""
    m = len(J)
    n = len(J[0]) if J else 0
    rows = [[x % p for x in J[r]] + [rhs[r] % p] for r in range(m)]
    pivots = []
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
                fct = rows[k][c]
                rows[k] = [(a - fct * b) % p for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[k][n] for k in range(r, m)):
        return None
    part = [0] * n
    for row_idx, c in enumerate(pivots):
        part[c] = rows[row_idx][n]
    kernel = []
    for fc in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[fc] = 1
        for row_idx, c in enumerate(pivots):
            v[c] = (-rows[row_idx][fc]) % p
        kernel.append(v)
    return part, kernel


def solution_levels(f: PolySystem, i_max: int, max_solutions: int = 2_000_000) -> list[int]:
    """[M_0, ..., M_imax] by lifting solutions one p-adic digit at a time.

    Level 0 -> 1 is a full sweep of (Z/p)^n.  From level k >= 1 on,
    f(a + p^k t) = f(a) + p^k J(a) t mod p^(k+1), so the lifts of a solution a
    are the solutions t of the linear system J(a) t = -f(a)/p^k over F_p.
    """
    p, n = f.p, f.n
    counts = [1]
    if i_max == 0:
        return counts
    sols = [a for a in itertools.product(range(p), repeat=n) if all(v % p == 0 for v in f.evaluate(a))]
    counts.append(len(sols))
    for k in range(1, i_max):
        pk = p**k
        nxt = []
        for a in sols:
            vals = f.evaluate(a)
            rhs = [-(v // pk) for v in vals]
            solved = _solve_mod_p(f.jacobian(a), rhs, p)
            if solved is None:
                continue
            part, kernel = solved
            for coeffs in itertools.product(range(p), repeat=len(kernel)):
                t = list(part)
                for cf, vec in zip(coeffs, kernel):
                    if cf:
                        t = [(x + cf * y) % p for x, y in zip(t, vec)]
                nxt.append(tuple(x + pk * y for x, y in zip(a, t)))
            if len(nxt) > max_solutions:
                raise BudgetExceeded(f"more than {max_solutions} solutions at level {k + 1}")
        sols = nxt
        counts.append(len(sols))
    return counts


def count_solutions(f: PolySystem, i: int, method: str = "tree", budget: int = 2_000_000) -> int:
    if i < 0:
        raise ValueError("i must be >= 0")
    if method == "naive":
        return _naive_count(f, i, budget) if i else 1
    if method == "tree":
        return solution_levels(f, i, budget)[i]
    raise ValueError("method must be 'naive' or 'tree'")


# ---------------------------------------------------------------------------
# series and slopes


def poincare_coeffs(f: PolySystem, i_max: int, counts: Sequence[int] | None = None):
    """(P, I): P has coefficients M_i p^(-n i); I is the truncated series of
    I_f in t = p^(-s), recovered from (1 - t I_f) / (1 - t) = P."""
    counts = list(counts) if counts is not None else solution_levels(f, i_max)
    P = [Fraction(m, f.p ** (f.n * i)) for i, m in enumerate(counts[: i_max + 1])]
    I = [P[j] - P[j + 1] for j in range(len(P) - 1)]
    return TruncatedSeries(f.p, tuple(P)), TruncatedSeries(f.p, tuple(I))


def poincare_from_igusa(I: TruncatedSeries) -> TruncatedSeries:
    """Inverse of the step above: P_0 = 1, P_(j+1) = P_j - I_j."""
    P = [Fraction(1)]
    for c in I.coeffs:
        P.append(P[-1] - c)
    return TruncatedSeries(I.p, tuple(P))


@dataclass(frozen=True)
class SolutionCounts:
    p: int
    M: tuple[int, ...]

    @property
    def valuations(self) -> tuple:
        return tuple(int_valuation(m, self.p) for m in self.M)

    @property
    def slopes(self) -> tuple:
        """v_p(M_i)/i for i >= 1 (INF when M_i = 0)."""
        out = []
        for i, v in enumerate(self.valuations):
            if i:
                out.append(INF if v is INF else Fraction(v, i))
        return tuple(out)

    @property
    def running_min(self) -> tuple:
        out = []
        cur = INF
        for s in self.slopes:
            cur = s if cur is INF or (s is not INF and s < cur) else cur
            out.append(cur)
        return tuple(out)

    @property
    def liminf_estimate(self):
        """Running minimum of the slopes over the window -- an estimate only;
        a finite window can overshoot the true liminf."""
        return self.running_min[-1] if self.running_min else INF

    def table(self) -> str:
        lines = ["i  M_i  v_p(M_i)  slope"]
        for i, m in enumerate(self.M):
            v = self.valuations[i]
            slope = "-" if i == 0 else str(self.slopes[i - 1])
            lines.append(f"{i}  {m}  {v}  {slope}")
        lines.append(f"running-min slope (estimate of liminf): {self.liminf_estimate}")
        return "\n".join(lines)


def slope_report(f: PolySystem, i_max: int) -> SolutionCounts:
    return SolutionCounts(f.p, tuple(solution_levels(f, i_max)))



# ---------------------------------------------------------------------------
# Jacobians and the degeneracy hypothesis


def jacobian_profile(f: PolySystem, a: Sequence[int], K: int) -> list[int]:
    """Valuations of the elementary divisors of J_f(a), ascending, capped at
    K and padded with K up to n entries."""
    if K < 1:
        raise ValueError("K must be >= 1")
    vals = smith_valuations(f.jacobian(a), f.p, cap=K)
    vals = [min(v, K) for v in vals]
    vals += [K] * (f.n - len(vals))
    return sorted(vals)[: f.n]


def capped_f_valuation(f: PolySystem, a: Sequence[int], K: int) -> int:
    best = K
    for v in f.evaluate(a):
        val = int_valuation(v % f.p**K, f.p)
        if val is not INF and val < best:
            best = val
    return best


@dataclass(frozen=True)
class ReverseHenselVerdict:
    hypothesis_holds: bool
    precision: int
    counterexample: tuple | None
    bound: Fraction | None  # -n + sum(lambda)/2 when the hypothesis holds
    slope_check: bool | None
    slope_details: tuple = ()

    def __str__(self):
        if not self.hypothesis_holds:
            return f"hypothesis fails at a={self.counterexample} (precision {self.precision})"
        return (
            f"hypothesis holds mod p^{self.precision}; pole bound Re(s0) >= {self.bound}; "
            f"slope cross-check {'passes' if self.slope_check else 'FAILS'}"
        )


def reverse_hensel_check(f: PolySystem, lambdas: Sequence, K: int, i_max: int | None = None) -> ReverseHenselVerdict:
    """Sweep a mod p^K for 2 v(delta_j(J_f(a))) >= lambda_j v(f(a)).

    Both valuations are taken mod p^K, so a capped value stands for ">= K".
    Elementary divisors (ascending) are paired with the lambdas sorted
    ascending.  On success the proof's bounds v(M_2j), v(M_2j+1) >= j sum(lambda)
    are checked on the solution counts up to ``i_max`` (default 2K).
    """
    lam = sorted(Fraction(x) for x in lambdas)
    if len(lam) != f.n or any(not 0 <= x <= 1 for x in lam):
        raise ValueError("need n values in [0, 1]")
    for a in itertools.product(range(f.p**K), repeat=f.n):
        nu_f = capped_f_valuation(f, a, K)
        prof = jacobian_profile(f, a, K)
        for d, l in zip(prof, lam):
            # 2 d >= l nu_f, denominators cleared
            if 2 * l.denominator * d < l.numerator * nu_f:
                return ReverseHenselVerdict(False, K, a, None, None)
    total = sum(lam)
    bound = -f.n + total / 2
    i_max = 2 * K if i_max is None else i_max
    counts = SolutionCounts(f.p, tuple(solution_levels(f, i_max)))
    ok = True
    details = []
    for i, v in enumerate(counts.valuations):
        need = (i // 2) * total
        good = v is INF or v >= need
        details.append((i, v, need, good))
        ok = ok and good
    return ReverseHenselVerdict(True, K, None, bound, ok, tuple(details))


def hensel_lift(f: PolySystem, a: Sequence[int], K_target: int, max_steps: int = 64):
    """Newton iteration from a; returns b mod p^K_target with f(b) = 0 mod
    p^K_target, or None when 2 v(det J(a)) < v(f(a)) fails."""
    if f.m != f.n:
        raise ValueError("Hensel lifting needs a square system")
    p = f.p
    a = [int(x) for x in a]
    d = _det_valuation(f.jacobian(a), p)
    nu = min(valuation(v, p) for v in f.evaluate(a))
    if d is INF or not 2 * d < nu:
        return None
    if nu is INF:
        return tuple(x % p**K_target for x in a)
    M = K_target + 2 * d + 2
    mod = p**M
    x = list(a)
    for _ in range(max_steps):
        vals = f.evaluate(x)
        if all(v % p**K_target == 0 for v in vals) and all(v % mod == 0 for v in vals):
            break
        step = _solve_rational(f.jacobian(x), vals)
        x = [_reduce(Fraction(xi) - s, p, mod) for xi, s in zip(x, step)]
    b = tuple(xi % p**K_target for xi in x)
    if any(v % p**K_target for v in f.evaluate(b)):
        raise ArithmeticError("Newton iteration did not converge")
    return b


def _reduce(q: Fraction, p: int, mod: int) -> int:
    if q.denominator % p == 0:
        raise ArithmeticError("Newton step left the p-adic integers")
    return q.numerator * pow(q.denominator, -1, mod) % mod


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                fct = M[r][c] / M[c][c]
                M[r] = [x - fct * y for x, y in zip(M[r], M[c])]
    return det


def _det_valuation(J, p):
    return valuation(_det(J), p)


def _solve_rational(J, rhs) -> list[Fraction]:
    n = len(J)
    aug = [[Fraction(x) for x in J[r]] + [Fraction(rhs[r])] for r in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        lead = aug[c][c]
        aug[c] = [x / lead for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                fct = aug[r][c]
                aug[r] = [x - fct * y for x, y in zip(aug[r], aug[c])]
    return [aug[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# homogeneous systems


@dataclass(frozen=True)
class HomogeneousVerdict:
    passed: bool
    target: Fraction  # n/(n+1)
    margins: tuple  # v_p(M_i) - (target * 2 floor(i/2) - 1)
    counts: tuple


def homogeneous_bound_check(f: PolySystem, i_max: int) -> HomogeneousVerdict:
    """v_p(M_i) >= (n/(n+1)) * 2 floor(i/2) - 1 over the window.

    The -1 is the orbit-counting loss in the argument (an orbit of units acting
    on a point of valuation v mod p^(2j) has size with valuation 2j - 1 - v);
    divided by i it vanishes, so the slopes approach n/(n+1) from the bound.
    """
    if not f.is_homogeneous():
        raise ValueError("system is not homogeneous")
    if f.min_degree() is not INF and f.min_degree() < 2:
        raise ValueError("all degrees must be at least 2")
    target = Fraction(f.n, f.n + 1)
    counts = solution_levels(f, i_max)
    margins = []
    for i, m in enumerate(counts):
        v = int_valuation(m, f.p)
        need = target * 2 * (i // 2) - 1
        margins.append(INF if v is INF else v - need)
    passed = all(x is INF or x >= 0 for x in margins)
    return HomogeneousVerdict(passed, target, tuple(margins), tuple(counts))


CORPUS = {
    "x2": "n=1 p=2\nx1^2\n",
    "xy": "n=2 p=2\nx1*x2\n",
    "x2+y2": "n=2 p=2 homogeneous=yes\nx1^2 + x2^2\n",
    "x3-y2": "n=2 p=2\nx1^3 - x2^2\n",
    "cubic": "n=2 p=2\nx1^3 + 2*x1^2*x2 + 3*x1*x2^2 + 5*x2^3 + 7*x1^2 + 11*x1*x2 + 13*x2^2 + x1 + 2*x2 + 3\n",
}


def corpus_system(name: str, p: int) -> PolySystem:
    return parse_system(CORPUS[name], name).with_prime(p)
