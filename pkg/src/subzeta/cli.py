"""Command-line front end: ``subzeta {count,verify,fit,igusa,catalog}``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog, counting, igusa, suites
from .exactmath import INF
from .formats import FormatError, RunConfig, load_algebra, load_config, parse_series
from .parallel import pool_map


def _algebra(spec: str, p: int | None):
    """Catalog name or path to an algebra file; --prime overrides the file's prime."""
    path = Path(spec)
    if path.exists():
        A = load_algebra(path)
        return A.with_prime(p) if p else A
    return catalog.get(spec, p or 2)


def _system(spec: str, p: int | None) -> igusa.PolySystem:
    if spec.startswith("corpus:"):
        f = igusa.parse_system(igusa.CORPUS[spec[7:]], spec[7:])
    else:
        f = igusa.parse_system(Path(spec).read_text(encoding="utf-8"), Path(spec).stem)
    return f.with_prime(p) if p else f


def _fmt(x) -> str:
    return "inf" if x is INF else str(x)


def _config(args) -> RunConfig:
    cfg = RunConfig()
    flags = {
        "i_max": args.imax,
        "k_max": args.kmax,
        "budget": args.budget,
        "precision": args.precision,
        "workers": args.workers,
        "out": args.out,
    }
    cfg = cfg.updated({k: v for k, v in flags.items() if v is not None})
    if args.config:
        cfg = load_config(args.config, cfg)
    return cfg


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_count(args, cfg: RunConfig) -> int:
    A = _algebra(args.algebra, args.prime)
    with pool_map(cfg.workers) as pmap:
        sv = counting.Survey(A.name, A.n, A.p)
        for i in range(cfg.i_max + 1):
            sv.levels[i] = counting.survey_level(A, i, pmap, with_types=args.strata)
            print(f"# i={i} done", file=sys.stderr, flush=True)
    table = counting.CountTable.from_survey(sv, args.kind, strata=args.strata)
    _emit(table.to_jsonl() if args.format == "jsonl" else table.to_text(), cfg)
    return 0


def _suite_call(name: str, args, cfg: RunConfig, pmap):
    explicit = args.algebra is not None
    A = _algebra(args.algebra, args.prime) if explicit else None
    imax = args.imax
    if name == "abelian-oracle":
        if explicit:
            return suites.abelian_oracle([(A.n, A.p, cfg.i_max)], pmap)
        return suites.abelian_oracle(pmap=pmap)
    if name == "heisenberg-oracle":
        return suites.heisenberg_oracle(pmap=pmap) if imax is None else suites.heisenberg_oracle(i_max=imax, pmap=pmap)
    if name in ("theorem-a", "limits", "weight-bounds"):
        fn = {"theorem-a": suites.theorem_a, "limits": suites.limits, "weight-bounds": suites.weight_bounds}[name]
        return fn([(A, cfg.i_max)] if explicit else None, pmap)
    if name == "zp2-revisited":
        primes = (args.prime,) if args.prime else (3, 5)
        return suites.zp2_revisited(primes, imax if imax is not None else 6, args.kmax or 8, pmap)
    if name == "class2":
        return suites.class2(A, imax if imax is not None else 5, pmap=pmap)
    if name == "bruhat-equivalence":
        return suites.bruhat_equivalence(A, args.budget or 4, precision=args.precision or 8)
    if name == "double-count":
        return suites.double_count([(A, imax if imax is not None else 2)] if explicit else None)
    if name == "igusa":
        return suites.igusa_suite((args.prime,) if args.prime else (2, 3))
    raise KeyError(name)


def cmd_verify(args, cfg: RunConfig) -> int:
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    failed = refused = False
    with pool_map(cfg.workers) as pmap:
        out = []
        for name in names:
            try:
                res = _suite_call(name, args, cfg, pmap)
            except suites.SuiteRefused as e:
                out.append(f"{name}: REFUSED ({e})")
                refused = True
                continue
            out.append(res.report())
            failed = failed or not res.passed
    _emit("\n".join(out) + "\n", cfg)
    if failed:
        return 1
    return 4 if refused else 0


def cmd_fit(args, cfg: RunConfig) -> int:
    series = parse_series(Path(args.series).read_text(encoding="utf-8"))
    grid = [(a, b) for a in range(args.max_a + 1) for b in range(1, args.max_b + 1)]
    p = args.prime or 2
    fit, factored = suites.fit_series(series, p, grid, args.max_mult)
    if fit is None:
        _emit("no fit within the candidate grid\n", cfg)
        return 1
    lines = [f"fit: {fit}", f"numerator: {' '.join(map(str, fit.numerator))}", f"verified through t^{fit.verified_through}"]
    if factored is not None:
        lines.append(f"product form: {factored}")
    _emit("\n".join(lines) + "\n", cfg)
    return 0


def cmd_igusa(args, cfg: RunConfig) -> int:
    f = _system(args.poly, args.prime)
    sub = args.action
    if sub == "count":
        method = args.method
        lines = ["i  M_i"]
        for i in range(cfg.i_max + 1):
            lines.append(f"{i}  {igusa.count_solutions(f, i, method, 10**7)}")
        text = "\n".join(lines) + "\n"
    elif sub == "slopes":
        rep = igusa.slope_report(f, cfg.i_max)
        P, I = igusa.poincare_coeffs(f, cfg.i_max, rep.M)
        text = rep.table() + "\nPoincare coefficients: " + " ".join(map(str, P.coeffs)) + "\n"
    elif sub == "hensel":
        a = [int(x) for x in args.point.split(",")]
        b = igusa.hensel_lift(f, a, cfg.precision)
        text = "not applicable: 2 v(det J) < v(f(a)) fails\n" if b is None else f"root mod {f.p}^{cfg.precision}: {b}\n"
    elif sub == "reverse-hensel":
        lam = [Fraction(x) for x in args.lambdas.split(",")]
        text = str(igusa.reverse_hensel_check(f, lam, cfg.precision, cfg.i_max)) + "\n"
    elif sub == "homog":
        h = igusa.homogeneous_bound_check(f, cfg.i_max)
        text = (
            f"{'passes' if h.passed else 'FAILS'}: slope target {h.target}\n"
            + "i  M_i  margin\n"
            + "".join(f"{i}  {m}  {_fmt(g)}\n" for i, (m, g) in enumerate(zip(h.counts, h.margins)))
        )
    else:
        raise ValueError(sub)
    _emit(text, cfg)
    return 0


def cmd_catalog(args, cfg: RunConfig) -> int:
    from .formats import format_algebra

    if args.name:
        _emit(format_algebra(catalog.get(args.name, args.prime or 2)), cfg)
    else:
        _emit("\n".join(catalog.names()) + "\n", cfg)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--imax", type=int)
    common.add_argument("--kmax", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--precision", type=int)
    common.add_argument("--out")
    common.add_argument("--config", help="JSON file; its keys override the flags")
    common.add_argument("--format", choices=("text", "jsonl"), default="text")

    ap = argparse.ArgumentParser(prog="subzeta", description="Count subalgebras and ideals of Z_p-algebras, verify their zeta-function properties, and count polynomial congruence solutions.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="subalgebra/ideal/lattice counts by index")
    c.add_argument("algebra", help="catalog name or algebra file")
    c.add_argument("--kind", choices=counting.KINDS, default="subalgebra")
    c.add_argument("--strata", action="store_true", help="also report weight and type strata")
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=list(suites.SUITES) + ["all"])
    v.add_argument("--algebra", help="run on this algebra instead of the default set")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fit", parents=[common], help="rational function through a series")
    f.add_argument("series")
    f.add_argument("--max-a", type=int, default=4)
    f.add_argument("--max-b", type=int, default=3)
    f.add_argument("--max-mult", type=int, default=3)
    f.set_defaults(func=cmd_fit)

    g = sub.add_parser("igusa", parents=[common], help="polynomial congruence tools")
    g.add_argument("action", choices=("count", "slopes", "hensel", "reverse-hensel", "homog"))
    g.add_argument("poly", help="polynomial file or corpus:NAME")
    g.add_argument("--method", choices=("tree", "naive"), default="tree")
    g.add_argument("--point", default="0", help="comma-separated start point for hensel")
    g.add_argument("--lambdas", default="1", help="comma-separated lambda_j for reverse-hensel")
    g.set_defaults(func=cmd_igusa)

    k = sub.add_parser("catalog", parents=[common], help="list or print shipped algebras")
    k.add_argument("name", nargs="?")
    k.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except counting.InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 3
    except (FormatError, ValueError, KeyError, FileNotFoundError, igusa.BudgetExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
