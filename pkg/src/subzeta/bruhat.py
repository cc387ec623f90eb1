"""Primitive lattices as Bruhat cells  D * beta * C_sigma.

D = diag(p^lam_1, ..., p^lam_n) carries the elementary-divisor type, beta is
lower unitriangular with entry (r, c) reduced modulo p^(r_c + ... + r_(r-1))
(1-based jump positions), and C_sigma is the permutation matrix with
(C_sigma)[i][sigma(i)] = 1, so row i of beta*C_sigma has beta[i][a] in column
sigma(a).  Everything here is 0-based except where a docstring says
otherwise; jump positions of a ``DivisorType`` stay 1-based as in
``DivisorType.r``.

The closure polynomials are

    f^m_{k,l}(beta) = sum_{a,b,c} beta[k][a] beta[l][b] C[s(a)][s(b)][s(c)] inv(beta)[c][m]

with C the structure constants and s = sigma.  The lattice is a subalgebra
iff  lam_k + lam_l - lam_m + v(f^m_{k,l}) >= 0  for all k, l, m.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .algebra import StructureAlgebra, verify_grading
from .counting import weight as lattice_weight, is_subalgebra
from .exactmath import INF, int_valuation
from .lattice import DivisorType, HNFLattice, canonicalize, enumerate_sublattices, is_primitive


# ---------------------------------------------------------------------------
# cells


def cell_modulus_exponent(dtype: DivisorType, r: int, c: int) -> int:
    """Exponent of the modulus of beta[r][c] (0-based r > c)."""
    return dtype.r_sum(c + 1, r + 1)


@dataclass(frozen=True)
class BruhatCell:
    n: int
    p: int
    dtype: DivisorType
    sigma: tuple[int, ...]
    beta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.dtype.primitive:
            raise ValueError("cells are for primitive types")
        if sorted(self.sigma) != list(range(self.n)):
            raise ValueError("sigma is not a permutation")
        for r in range(self.n):
            for c in range(self.n):
                x = self.beta[r][c]
                if r == c and x != 1:
                    raise ValueError("beta must have unit diagonal")
                if c > r and x != 0:
                    raise ValueError("beta must be lower triangular")

    @property
    def lam(self) -> tuple[int, ...]:
        return self.dtype.lam

    def beta_inverse(self) -> list[list[int]]:
        return unitriangular_inverse(self.beta)

    def generators(self) -> list[list[int]]:
        """Rows of D * beta * C_sigma."""
        out = []
        for k in range(self.n):
            row = [0] * self.n
            f = self.p ** self.lam[k]
            for a in range(self.n):
                row[self.sigma[a]] = f * self.beta[k][a]
            out.append(row)
        return out

    def lattice(self) -> HNFLattice:
        return canonicalize(self.generators(), self.p)

    def with_beta(self, beta) -> "BruhatCell":
        return BruhatCell(self.n, self.p, self.dtype, self.sigma, tuple(tuple(r) for r in beta))

    def to_text(self) -> str:
        rows = "\n".join("  " + " ".join(str(x) for x in r) for r in self.beta)
        return f"type {self.dtype} sigma={tuple(s + 1 for s in self.sigma)}\n{rows}"


def unitriangular_inverse(beta: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(beta)
    inv = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for c in range(n):
        for r in range(c + 1, n):
            inv[r][c] = -sum(beta[r][k] * inv[k][c] for k in range(c, r))
    return inv


def types_up_to(n: int, budget: int) -> list[DivisorType]:
    """Primitive types with sum of position * jump at most ``budget``."""
    out = []
    positions = list(range(1, n))

    def rec(idx, acc, used):
        if idx == len(positions):
            out.append(DivisorType.from_key(n, tuple(acc)))
            return
        pos = positions[idx]
        rec(idx + 1, acc, used)
        r = 1
        while used + pos * r <= budget:
            rec(idx + 1, acc + [(pos, r)], used + pos * r)
            r += 1

    rec(0, [], 0)
    out.sort(key=lambda t: (t.index_exponent, t.key))
    return out


def beta_slots(n: int, dtype: DivisorType) -> list[tuple[int, int, int]]:
    """(r, c, modulus exponent) for the free entries of beta."""
    return [(r, c, cell_modulus_exponent(dtype, r, c)) for r in range(1, n) for c in range(r)]


def cell_count(n: int, p: int, dtype: DivisorType) -> int:
    return p ** sum(e for _, _, e in beta_slots(n, dtype))


def cells_for_type(n: int, p: int, dtype: DivisorType, sigma: Sequence[int], budget: int | None = None) -> Iterator[BruhatCell]:
    """Every reduced beta for the type and permutation."""
    slots = beta_slots(n, dtype)
    total = cell_count(n, p, dtype)
    if budget is not None and total > budget:
        raise ValueError(f"{total} cells exceed the budget of {budget}")
    sigma = tuple(sigma)
    for vals in itertools.product(*[range(p**e) for _, _, e in slots]):
        beta = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for (r, c, _), v in zip(slots, vals):
            beta[r][c] = v
        yield BruhatCell(n, p, dtype, sigma, tuple(tuple(r) for r in beta))


def coverage_check(n: int, p: int, dtype: DivisorType) -> tuple[bool, int, int]:
    """Do the cells of all permutations cover exactly the primitive lattices
    of this type?  Returns (equal, cell lattices, enumerated lattices)."""
    from .lattice import divisor_type

    from_cells = set()
    for sigma in itertools.permutations(range(n)):
        for cell in cells_for_type(n, p, dtype, sigma):
            from_cells.add(cell.lattice().rows)
    direct = set()
    for lat in enumerate_sublattices(n, p, dtype.index_exponent):
        if is_primitive(lat) and divisor_type(lat).key == dtype.key:
            direct.add(lat.rows)
    return from_cells == direct, len(from_cells), len(direct)


# ---------------------------------------------------------------------------
# closure polynomials


def mult_matrix(A: StructureAlgebra, x: Sequence) -> list[list]:
    """R(x)[i][j] = sum_q C[i][j][q] x_q."""
    R = [[0] * A.n for _ in range(A.n)]
    for i, j, q, c in A.constants:
        R[i][j] += c * x[q]
    return R


def _sigma_constants(A: StructureAlgebra, sigma) -> list[tuple[int, int, int, int]]:
    """Structure constants relabelled through sigma: (a, b, c, C[s(a)][s(b)][s(c)])."""
    inv = [0] * A.n
    for a, s in enumerate(sigma):
        inv[s] = a
    return [(inv[i], inv[j], inv[k], c) for i, j, k, c in A.constants]


def f_klm(cell: BruhatCell, A: StructureAlgebra, k: int, l: int, m: int, _inv=None, _consts=None) -> int:
    """f^m_{k,l}(beta), 0-based indices.  Integral since beta is unitriangular."""
    inv = _inv if _inv is not None else cell.beta_inverse()
    consts = _consts if _consts is not None else _sigma_constants(A, cell.sigma)
    b = cell.beta
    total = 0
    for a, bb, c, v in consts:
        x = b[k][a]
        if x:
            y = b[l][bb]
            if y:
                z = inv[c][m]
                if z:
                    total += v * x * y * z
    return total


def all_f(cell: BruhatCell, A: StructureAlgebra) -> dict[tuple[int, int, int], int]:
    inv = cell.beta_inverse()
    consts = _sigma_constants(A, cell.sigma)
    n = cell.n
    return {
        (k, l, m): f_klm(cell, A, k, l, m, inv, consts)
        for k in range(n)
        for l in range(n)
        for m in range(n)
    }


def congruence_exponent(dtype: DivisorType, k: int, l: int, m: int) -> int:
    """The power of p multiplying f^m_{k,l} in the closure congruence
    (0-based k, l, m); the congruence is modulo p^(sum of jumps)."""
    n = dtype.n
    return dtype.r_sum(1, m + 1) + dtype.r_sum(k + 1, n) + dtype.r_sum(l + 1, n)


def subalgebra_condition(cell: BruhatCell, A: StructureAlgebra, homothety: int = 0) -> bool:
    """Closure of p^homothety * (cell lattice) under multiplication, decided
    through the polynomial congruences."""
    total = cell.dtype.r_sum(1, cell.n)
    for (k, l, m), f in all_f(cell, A).items():
        if f == 0:
            continue
        if congruence_exponent(cell.dtype, k, l, m) + homothety + int_valuation(f, cell.p) < total:
            return False
    return True


def cell_weight(cell: BruhatCell, A: StructureAlgebra) -> int:
    """Least homothety w making the congruences hold."""
    total = cell.dtype.r_sum(1, cell.n)
    w = 0
    for (k, l, m), f in all_f(cell, A).items():
        if f:
            need = total - congruence_exponent(cell.dtype, k, l, m) - int_valuation(f, cell.p)
            if need > w:
                w = need
    return w


# ---------------------------------------------------------------------------
# weighted homogeneity


def sigma_weights(A: StructureAlgebra, sigma) -> list[int]:
    return [A.weights[s] for s in sigma]


def _unit_power(lam: int, e: int, mod: int) -> int:
    if e >= 0:
        return pow(lam, e, mod)
    return pow(pow(lam, -1, mod), -e, mod)


def scale_beta(cell: BruhatCell, A: StructureAlgebra, lam: int, mod: int, sign: int) -> list[list[int]]:
    """beta[r][c] -> lam^(sign * (w_s(c) - w_s(r))) beta[r][c]  mod ``mod``."""
    w = sigma_weights(A, cell.sigma)
    n = cell.n
    return [
        [(cell.beta[r][c] * _unit_power(lam, sign * (w[c] - w[r]), mod)) % mod if c < r else cell.beta[r][c] for c in range(n)]
        for r in range(n)
    ]


@dataclass(frozen=True)
class HomogeneityResult:
    """Outcome for one (beta, lambda).

    ``entry_weights``: beta[r][c] carries weight w_s(c) - w_s(r) and every f
    scales by lam^(w_s(m) - w_s(k) - w_s(l)).  ``mirrored``: the opposite
    entry weights with the opposite factor.  ``mixed``: entry weights
    w_s(r) - w_s(c) combined with lam^(w_s(m) - w_s(k) - w_s(l)), which is
    only consistent when the factors happen to agree.
    """

    entry_weights: bool
    mirrored: bool
    mixed: bool

    @property
    def passed(self) -> bool:
        return self.entry_weights and self.mirrored


def homogeneity_check(cell: BruhatCell, A: StructureAlgebra, lam: int, precision: int) -> HomogeneityResult:
    if lam % cell.p == 0:
        raise ValueError(f"{lam} is not a unit mod {cell.p}")
    if A.weights is None or not verify_grading(A):
        raise ValueError("algebra has no verified grading")
    mod = cell.p**precision
    w = sigma_weights(A, cell.sigma)
    base = all_f(cell, A)
    results = {}
    for sign in (1, -1):
        scaled = cell.with_beta(scale_beta(cell, A, lam, mod, sign))
        new = all_f(scaled, A)
        ok = True
        mixed = True
        for (k, l, m), f in base.items():
            d = w[m] - w[k] - w[l]
            if (new[(k, l, m)] - _unit_power(lam, sign * d, mod) * f) % mod:
                ok = False
            if (new[(k, l, m)] - _unit_power(lam, d, mod) * f) % mod:
                mixed = False
        results[sign] = (ok, mixed)
    return HomogeneityResult(results[1][0], results[-1][0], results[-1][1])


# ---------------------------------------------------------------------------
# orbit statistics


def _capped_val(x: int, p: int, cap: int) -> int:
    """Valuation of an entry known only modulo p^cap."""
    v = int_valuation(x, p)
    return cap if v is INF or v > cap else v


@dataclass(frozen=True)
class OrbitStats:
    cell: BruhatCell
    iota_star: int  # 1-based jump position carrying R
    r_star: int  # 0-based row index
    c_star: int  # 0-based column index
    mult_orbit_valuation: int
    mult_orbit_direct: int
    delta: int
    add_orbit_direct: int

    @property
    def eps_plus(self) -> int:
        return (self.mult_orbit_valuation + 1) * (self.cell.n - 1)

    @property
    def eps_minus(self) -> int:
        return (self.mult_orbit_valuation - 1) * (self.cell.n - 1)

    @property
    def eps(self) -> int:
        return self.eps_plus

    @property
    def consistent(self) -> bool:
        """Stabiliser-derived valuations agree with direct orbit counts."""
        return self.mult_orbit_valuation == self.mult_orbit_direct and self.delta == self.add_orbit_direct


def choose_stars(dtype: DivisorType, A: StructureAlgebra, sigma) -> tuple[int, int, int]:
    """(iota*, r*, c*): iota* is the first position with the largest jump
    (1-based); r* > iota* has least weight and c* <= iota* has greatest
    weight (both 0-based row/column indices; ties go to the smaller index)."""
    R = dtype.R
    iota = min(k for k, v in dtype.r.items() if v == R)
    w = sigma_weights(A, sigma)
    n = dtype.n
    r_star = min(range(iota, n), key=lambda r: (w[r], r))
    c_star = min(range(0, iota), key=lambda c: (-w[c], c))
    return iota, r_star, c_star


def _units(p: int, K: int) -> list[int]:
    return [u for u in range(p**K) if u % p]


def mult_stabiliser_size(cell: BruhatCell, A: StructureAlgebra, K: int) -> int:
    n, p = cell.n, cell.p
    w = sigma_weights(A, cell.sigma)
    b = cell.beta
    inv = cell.beta_inverse()
    checks = []
    for r in range(n):
        for c in range(r):
            e = cell_modulus_exponent(cell.dtype, r, c)
            if e:
                checks.append((r, c, p**e, [(w[k], b[r][k] * inv[k][c]) for k in range(c, r + 1)]))
    size = 0
    for lam in _units(p, K):
        ok = True
        for r, c, mod, terms in checks:
            if sum(pow(lam, wk, mod) * t for wk, t in terms) % mod:
                ok = False
                break
        if ok:
            size += 1
    return size


def _scale_columns(gens, A: StructureAlgebra, lam: int):
    w = A.weights
    return [[x * lam ** w[j] for j, x in enumerate(row)] for row in gens]


def orbit_stats(cell: BruhatCell, A: StructureAlgebra) -> OrbitStats:
    if A.weights is None or not verify_grading(A):
        raise ValueError("algebra has no verified grading")
    dtype = cell.dtype
    if not dtype.I:
        raise ValueError("the full lattice has no orbit data")
    n, p = cell.n, cell.p
    K = dtype.r_sum(1, n)
    iota, r_star, c_star = choose_stars(dtype, A, cell.sigma)
    # multiplicative action through the stabiliser congruences
    units = _units(p, K)
    stab = mult_stabiliser_size(cell, A, K)
    mult_val = int_valuation(len(units) // stab, p)
    # ... and directly: the lattice moved by T_lambda
    gens = cell.generators()
    orbit = {canonicalize(_scale_columns(gens, A, lam), p).rows for lam in units}
    mult_direct = int_valuation(len(orbit), p)
    # additive action
    b = cell.beta
    inv = cell.beta_inverse()
    delta = 0
    for i in range(n):
        for j in range(i):
            e = cell_modulus_exponent(dtype, i, j)
            x = b[i][r_star] * inv[c_star][j]
            if e and x % p**e:
                need = e - int_valuation(x, p)
                delta = max(delta, need)
    add_orbit = {transvect(cell, r_star, c_star, mu).lattice().rows for mu in range(p**K)}
    add_direct = int_valuation(len(add_orbit), p)
    return OrbitStats(cell, iota, r_star, c_star, mult_val, mult_direct, delta, add_direct)


def transvect(cell: BruhatCell, r_star: int, c_star: int, mu: int) -> BruhatCell:
    """beta * M_{r*c*}(mu): add mu times column r* to column c*."""
    moved = [list(r) for r in cell.beta]
    for i in range(cell.n):
        moved[i][c_star] += mu * cell.beta[i][r_star]
    return cell.with_beta(moved)


# ---------------------------------------------------------------------------
# the lemma inequalities


@dataclass(frozen=True)
class LemmaReport:
    influenced: bool  # bound with (v+1)(l - iota*)
    influenced_inverse: bool  # bound with (v+1)(iota* - m), as printed
    influenced_inverse_transposed: bool  # transposed analogue: (v+1)(iota* - m + 1)
    added: bool
    added_inverse: bool
    eps_plus_forms: bool  # the eps-forms of the first two with (v+1)(n-1)
    eps_minus_forms: bool  # ... with (v-1)(n-1)
    failures: tuple[str, ...]

    @property
    def lemmas_hold(self) -> bool:
        """The four bounds, the inverse-influenced one in transposed form."""
        return self.influenced and self.influenced_inverse_transposed and self.added and self.added_inverse


def lemma_checks(stats: OrbitStats, A: StructureAlgebra) -> LemmaReport:
    cell = stats.cell
    dtype, n, p = cell.dtype, cell.n, cell.p
    b = cell.beta
    inv = cell.beta_inverse()
    w = sigma_weights(A, cell.sigma)
    iota = stats.iota_star  # rows/cols 0..iota-1 are "<= iota*" in 1-based terms
    v = stats.mult_orbit_valuation
    delta = stats.delta
    fails = []
    flags = {"inf": True, "inf_inv": True, "inf_inv_t": True, "add": True, "add_inv": True, "eps+": True, "eps-": True}

    def val_beta(r, c):
        return _capped_val(b[r][c], p, cell_modulus_exponent(dtype, r, c))

    def val_inv(r, c):
        return _capped_val(inv[r][c], p, cell_modulus_exponent(dtype, r, c))

    min_upper = min(w[r] for r in range(iota, n))
    max_lower = max(w[c] for c in range(iota))
    for j in range(iota):
        if not w[j] < min_upper:
            continue
        for l in range(iota, n):
            # 1-based: l1 = l + 1; sum over iota* <= k < l1
            s = dtype.r_sum(iota, l + 1)
            nu = val_beta(l, j)
            if nu < s - (v + 1) * (l + 1 - iota):
                flags["inf"] = False
                fails.append(f"influenced beta[{l + 1}][{j + 1}]")
            if nu < s - stats.eps_plus:
                flags["eps+"] = False
            if nu < s - stats.eps_minus:
                flags["eps-"] = False
    for q in range(iota, n):
        if not w[q] > max_lower:
            continue
        for m in range(iota):
            s = dtype.r_sum(m + 1, iota + 1)
            nu = val_inv(q, m)
            if nu < s - (v + 1) * (iota - (m + 1)):
                flags["inf_inv"] = False
                fails.append(f"influenced inverse[{q + 1}][{m + 1}]")
            if nu < s - (v + 1) * (iota - m):
                flags["inf_inv_t"] = False
                fails.append(f"transposed influenced inverse[{q + 1}][{m + 1}]")
            if nu < s - stats.eps_plus:
                flags["eps+"] = False
            if nu < s - stats.eps_minus:
                flags["eps-"] = False
    r_star, c_star = stats.r_star, stats.c_star
    for i in range(n):
        nu = val_beta(i, r_star) if i > r_star else (0 if i == r_star else INF)
        if nu < dtype.r_sum(c_star + 1, i + 1) - delta:
            flags["add"] = False
            fails.append(f"added beta[{i + 1}][{r_star + 1}]")
    for j in range(n):
        nu = val_inv(c_star, j) if c_star > j else (0 if c_star == j else INF)
        if nu < dtype.r_sum(j + 1, r_star + 1) - delta:
            flags["add_inv"] = False
            fails.append(f"added inverse[{c_star + 1}][{j + 1}]")
    return LemmaReport(
        flags["inf"], flags["inf_inv"], flags["inf_inv_t"], flags["add"], flags["add_inv"], flags["eps+"], flags["eps-"], tuple(fails)
    )


# ---------------------------------------------------------------------------
# additive weight preservation


def additive_threshold(stats: OrbitStats, w: int, eps: int) -> Fraction:
    R = stats.cell.dtype.R
    return max(Fraction(stats.delta) - Fraction(R + w, 2), Fraction(stats.delta - (R + w - eps)))


def additive_weight_preservation(cell: BruhatCell, A: StructureAlgebra, mu: int, stats: OrbitStats | None = None, eps: int | None = None) -> bool:
    """Does the transvection by mu keep the weight?  mu must meet the
    valuation threshold for the cell (eps defaults to (v+1)(n-1))."""
    stats = stats or orbit_stats(cell, A)
    eps = stats.eps_plus if eps is None else eps
    w = lattice_weight(cell.lattice(), A)
    need = additive_threshold(stats, w, eps)
    nu = int_valuation(mu, cell.p)
    if nu is not INF and nu < need:
        raise ValueError(f"v(mu) = {nu} is below the threshold {need}")
    moved = transvect(cell, stats.r_star, stats.c_star, mu)
    return lattice_weight(moved.lattice(), A) == w


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepReport:
    cells: int = 0
    agree: int = 0
    weight_agree: int = 0
    counterexamples: list = None

    def __post_init__(self):
        if self.counterexamples is None:
            self.counterexamples = []

    @property
    def passed(self) -> bool:
        return self.cells > 0 and self.agree == self.cells and self.weight_agree == self.cells


def equivalence_sweep(A: StructureAlgebra, budget: int, limit: int = 10) -> SweepReport:
    """Congruence test versus direct membership on every cell of every
    primitive type with index exponent <= budget and every permutation."""
    rep = SweepReport()
    n, p = A.n, A.p
    for dtype in types_up_to(n, budget):
        for sigma in itertools.permutations(range(n)):
            for cell in cells_for_type(n, p, dtype, sigma):
                lat = cell.lattice()
                rep.cells += 1
                direct = is_subalgebra(lat, A)
                if subalgebra_condition(cell, A) == direct:
                    rep.agree += 1
                elif len(rep.counterexamples) < limit:
                    rep.counterexamples.append(cell.to_text())
                if cell_weight(cell, A) == lattice_weight(lat, A):
                    rep.weight_agree += 1
                elif len(rep.counterexamples) < limit:
                    rep.counterexamples.append("weight mismatch\n" + cell.to_text())
    return rep


def random_cell(rng: random.Random, n: int, p: int, dtype: DivisorType, sigma) -> BruhatCell:
    beta = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for r, c, e in beta_slots(n, dtype):
        beta[r][c] = rng.randrange(p**e)
    return BruhatCell(n, p, dtype, tuple(sigma), tuple(tuple(r) for r in beta))


def homogeneity_sweep(A: StructureAlgebra, budget: int, trials: int = 20, precision: int = 8, seed: int = 0):
    """(passed, failed) over random (beta, lambda) per type and permutation."""
    rng = random.Random(seed)
    n, p = A.n, A.p
    passed = failed = 0
    for dtype in types_up_to(n, budget):
        for sigma in itertools.permutations(range(n)):
            for _ in range(trials):
                cell = random_cell(rng, n, p, dtype, sigma)
                lam = rng.randrange(1, p**precision)
                while lam % p == 0:
                    lam = rng.randrange(1, p**precision)
                if homogeneity_check(cell, A, lam, precision).passed:
                    passed += 1
                else:
                    failed += 1
    return passed, failed


@dataclass
class OrbitSweepReport:
    cells: int = 0
    lemmas_ok: int = 0
    consistent: int = 0
    eps_plus_ok: int = 0
    eps_minus_ok: int = 0
    preservation_checked: int = 0
    preservation_ok: int = 0
    failures: list = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []


def orbit_sweep(A: StructureAlgebra, budget: int, preservation_budget: int | None = None, limit: int = 10) -> OrbitSweepReport:
    """Orbit statistics, lemma inequalities and (for index exponents up to
    ``preservation_budget``) additive weight preservation on every cell."""
    rep = OrbitSweepReport()
    n, p = A.n, A.p
    for dtype in types_up_to(n, budget):
        if not dtype.I:
            continue
        K = dtype.r_sum(1, n)
        for sigma in itertools.permutations(range(n)):
            for cell in cells_for_type(n, p, dtype, sigma):
                rep.cells += 1
                st = orbit_stats(cell, A)
                lr = lemma_checks(st, A)
                rep.consistent += st.consistent
                rep.eps_plus_ok += lr.eps_plus_forms
                rep.eps_minus_ok += lr.eps_minus_forms
                if lr.lemmas_hold:
                    rep.lemmas_ok += 1
                elif len(rep.failures) < limit:
                    rep.failures.append(", ".join(lr.failures) + "\n" + cell.to_text())
                if preservation_budget is None or dtype.index_exponent > preservation_budget:
                    continue
                w = lattice_weight(cell.lattice(), A)
                need = additive_threshold(st, w, st.eps_plus)
                for mu in range(p**K):
                    nu = int_valuation(mu, p)
                    if nu is not INF and nu < need:
                        continue
                    rep.preservation_checked += 1
                    if additive_weight_preservation(cell, A, mu, st):
                        rep.preservation_ok += 1
                    elif len(rep.failures) < limit:
                        rep.failures.append(f"weight changed by mu={mu}\n" + cell.to_text())
    return rep
