"""Command-line entry point: every verification and sweep as a subcommand.

Exit codes: 0 success, 1 a check exceeded its tolerance, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
from dataclasses import asdict, dataclass
from typing import Any

from . import __version__
from .errors import HeckeMomentsError
from .gaussian import GaussianInt, factor

def parse_gaussian(text: str) -> GaussianInt:
    """Parse '3+2i', '-1-2i', '5', '2i', '-i'."""
    s = text.replace(" ", "")
    if re.fullmatch(r"[+-]?\d+", s):
        return GaussianInt(int(s), 0)
    m = re.fullmatch(r"(?:([+-]?\d+)(?=[+-]))?([+-]?)(\d*)i", s)
    if m is None:
        raise argparse.ArgumentTypeError(f"not a Gaussian integer: {text!r}")
    im = int(m.group(3) or "1") * (-1 if m.group(2) == "-" else 1)
    return GaussianInt(int(m.group(1) or 0), im)


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


@dataclass
class RunConfig:
    subcommand: str
    X: float | None
    j: int | None
    theta: float | None
    max_norm: int | None
    cutoff_scale: float
    cache: str | None
    workers: int
    out: str | None
    seed: int
    tolerance: float | None
    args: dict


def _emit(cfg: RunConfig, rows: list[dict], fmt: str) -> None:
    if fmt == "json":
        text = json.dumps({"version": __version__, "config": asdict(cfg), "rows": rows}, default=str) + "\n"
    else:
        buf = io.StringIO()
        fields = list(rows[0]) if rows else []
        writer = csv.writer(buf)
        writer.writerow(fields + ["version", "config"])
        cfg_text = json.dumps(asdict(cfg), default=str, sort_keys=True)
        for r in rows:
            writer.writerow([_fmt(r[f]) for f in fields] + [__version__, cfg_text])
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+.17g}j"
    return str(v)


# subcommands return (rows, ok)

def cmd_factor(a, cfg):
    f = factor(a.z)
    rows = [{"z": str(a.z), "unit": str(f.unit), "two_exp": f.two_exp,
             "odd_part": " ".join(f"({p})^{e}" for p, e in f.odd_part)}]
    return rows, True


def cmd_symbol(a, cfg):
    from .symbol import chi_d, symbol

    value = chi_d(a.a, a.n) if a.chi else symbol(a.a, a.n)
    return [{"a": str(a.a), "n": str(a.n), "chi": a.chi, "value": value}], True


def cmd_gauss(a, cfg):
    from .gauss_sums import gauss_brute, gauss_fast, gauss_oracle_suite

    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    if a.check or a.r is None:
        s = gauss_oracle_suite(cfg.max_norm or 1500)
        ok = s.max_scaled_error <= tol
        return [{"max_norm": s.max_norm, "moduli": s.moduli, "cases": s.cases,
                 "max_scaled_error": s.max_scaled_error, "worst": str(s.worst), "pass": ok}], ok
    fast = gauss_fast(a.r, a.n)
    brute = gauss_brute(a.r, a.n)
    ok = abs(fast - brute) <= tol * a.n.norm()
    return [{"r": str(a.r), "n": str(a.n), "fast": fast, "brute": brute, "pass": ok}], ok


def cmd_poisson(a, cfg):
    from .gauss_sums import poisson_check
    from .primary_table import primary_table

    tol = cfg.tolerance if cfg.tolerance is not None else 1e-6
    if a.n is not None:
        ns = [a.n]
    else:
        bound = cfg.max_norm or 45
        t = primary_table(bound)
        rows = t.rows_upto(bound)
        ns = [GaussianInt(int(x), int(y)) for x, y in zip(t.re[:rows], t.im[:rows])]
    Xs = [cfg.X] if cfg.X else [10.0, 25.0]
    rows, ok = [], True
    for n in ns:
        for X in Xs:
            r = poisson_check(n, X)
            ok &= r.residual < tol
            rows.append({"n": str(n), "X": X, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual})
    return rows, ok


def cmd_lvalue(a, cfg):
    from .lfunction import afe_value
    from .special import CutoffG

    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    one = afe_value(a.d, a.shift, cutoff_scale=cfg.cutoff_scale)
    other = afe_value(a.d, a.shift, G=CutoffG(a.g_width), cutoff_scale=cfg.cutoff_scale, tol=1e-9)
    diff = abs(one.value - other.value) / max(abs(one.value), 1.0)
    ok = diff < tol
    return [{"d": str(a.d), "shift": a.shift, "value": one.value, "cutoff_norm": one.cutoff_norm,
             "other_g": other.g_choice, "other_value": other.value, "relative_diff": diff, "pass": ok}], ok


def cmd_identities(a, cfg):
    from .special import Gamma_alpha, archimedean_identity_sides, g_identity_sides

    rng = random.Random(cfg.seed)
    rows, ok = [], True
    for _ in range(a.samples):
        u = complex(rng.uniform(0.1, 0.9), rng.uniform(-10, 10))
        lhs, rhs = archimedean_identity_sides(u)
        r1 = abs(lhs - rhs)
        al = complex(rng.uniform(-0.2, 0.2), rng.uniform(-5, 5))
        r2 = abs(Gamma_alpha(al) * Gamma_alpha(-al) - 1)
        s = complex(rng.uniform(-0.2, 0.2), rng.uniform(-5, 5))
        g1, g2 = g_identity_sides(s, al)
        r3 = abs(g1 - g2) / max(abs(g2), 1.0)
        good = r1 < 1e-8 and r2 < 1e-12 and r3 < 1e-10
        ok &= good
        rows.append({"u": u, "archimedean_residual": r1, "alpha": al, "gamma_pair_residual": r2,
                     "s": s, "g_identity_residual": r3, "pass": good})
    return rows, ok


def _c2(w, cfg, a):
    from .moments import fit_C2, moment_sweep

    base = moment_sweep(a.c2_from, 1, w, cfg.workers, cfg.cache)
    return fit_C2(a.c2_from, base.empirical, w)


def cmd_moment(a, cfg):
    from .moments import moment_sweep
    from .weights import weight_make

    w = weight_make()
    C2 = _c2(w, cfg, a) if cfg.j == 1 else None
    r = moment_sweep(cfg.X, cfg.j, w, cfg.workers, cfg.cache, C2=C2)
    ok = True
    if cfg.tolerance is not None and r.residual is not None:
        ok = r.residual <= cfg.tolerance
    return [asdict(r) | {"C2": C2}], ok


def cmd_twisted(a, cfg):
    from .moments import twisted_first_moment
    from .weights import weight_make

    w = weight_make()
    C2 = _c2(w, cfg, a)
    r = twisted_first_moment(cfg.X, a.l, w, C2, cfg.workers, cfg.cache)
    ok = True if cfg.tolerance is None else r.residual <= cfg.tolerance
    return [asdict(r) | {"l": str(a.l), "C2": C2}], ok


def cmd_sqfree(a, cfg):
    from .moments import sqfree_count

    count, ratio = sqfree_count(cfg.X)
    tol = cfg.tolerance if cfg.tolerance is not None else 0.01
    ok = abs(ratio - 1) <= tol
    return [{"X": cfg.X, "count": count, "ratio": ratio, "pass": ok}], ok


def cmd_mollify(a, cfg):
    from .mollifier import build_mollifier, mollified_moment, mollifier_values
    from .moments import sweep
    from .weights import weight_make

    w = weight_make()
    C2 = _c2(w, cfg, a)
    p = build_mollifier(cfg.X, cfg.theta)
    if a.tables:
        p.export_csv(a.tables)
    data = sweep(cfg.X, w, cfg.workers, cfg.cache, cfg.cutoff_scale)
    mv = mollifier_values(p, data)
    rows = []
    for j in (1, 2):
        r = mollified_moment(p, j, data, w, C2, mvals=mv)
        rows.append(asdict(r.report) | {"theta": cfg.theta, "M": p.M, "predicted_pi2_over_4": r.predicted_alt,
                                        "predicted_finite_X": r.predicted_finite})
    return rows, True


def cmd_nonvanishing(a, cfg):
    from .mollifier import build_mollifier, nonvanishing_report
    from .moments import sweep
    from .weights import weight_make

    w = weight_make()
    p = build_mollifier(cfg.X, cfg.theta)
    data = sweep(cfg.X, w, cfg.workers, cfg.cache, cfg.cutoff_scale)
    r = nonvanishing_report(p, data, w)
    floor = cfg.tolerance if cfg.tolerance is not None else 0.875
    ok = r.empirical_proportion >= floor and 0 < r.cs_bound <= r.empirical_proportion + 1e-12
    return [asdict(r) | {"X": cfg.X, "theta": cfg.theta, "pass": ok}], ok


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--X", type=_float, default=None)
    common.add_argument("--j", type=int, choices=(1, 2, 3), default=1)
    common.add_argument("--theta", type=_float, default=0.5)
    common.add_argument("--max-norm", type=int, default=None)
    common.add_argument("--cutoff-scale", type=_float, default=1.0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--cache", default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=_float, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    ap = argparse.ArgumentParser(prog="heckemoments", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("factor", parents=[common], help="canonical factorisation in Z[i]")
    p.add_argument("z", type=parse_gaussian)
    p.set_defaults(fn=cmd_factor)

    p = sub.add_parser("symbol", parents=[common], help="quadratic residue symbol (a/n)")
    p.add_argument("a", type=parse_gaussian)
    p.add_argument("n", type=parse_gaussian)
    p.add_argument("--chi", action="store_true", help="evaluate chi_{(1+i)^5 a}(n) instead")
    p.set_defaults(fn=cmd_symbol)

    p = sub.add_parser("gauss", parents=[common], help="Gauss sums; --check runs the closed-form oracle suite")
    p.add_argument("r", type=parse_gaussian, nargs="?")
    p.add_argument("n", type=parse_gaussian, nargs="?")
    p.add_argument("--check", action="store_true")
    p.set_defaults(fn=cmd_gauss)

    p = sub.add_parser("poisson-check", parents=[common], help="Poisson summation with a Gaussian weight")
    p.add_argument("n", type=parse_gaussian, nargs="?")
    p.set_defaults(fn=cmd_poisson)

    p = sub.add_parser("lvalue", parents=[common], help="L(1/2 + shift) by the approximate functional equation")
    p.add_argument("d", type=parse_gaussian)
    p.add_argument("--shift", type=_float, default=0.0)
    p.add_argument("--g-width", type=_float, default=1.0, help="second cutoff G(s) = exp(s^2 / width)")
    p.set_defaults(fn=cmd_lvalue)

    p = sub.add_parser("identities", parents=[common], help="Archimedean and Gamma-factor identities")
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(fn=cmd_identities)

    for name, fn, hlp in (("moment", cmd_moment, "smoothed moment sweep"),
                          ("twisted-moment", cmd_twisted, "first moment twisted by chi(l)"),
                          ("mollify", cmd_mollify, "mollified first and second moments")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--c2-from", type=_float, default=1e3, help="X at which C2 is fitted")
        if name == "twisted-moment":
            p.add_argument("--l", type=parse_gaussian, required=True)
        if name == "mollify":
            p.add_argument("--tables", default=None, help="write the lambda/xi table as CSV")
        p.set_defaults(fn=fn)

    p = sub.add_parser("sqfree-count", parents=[common], help="odd squarefree count against its density")
    p.set_defaults(fn=cmd_sqfree)

    p = sub.add_parser("nonvanishing", parents=[common], help="Cauchy-Schwarz bound and observed proportion")
    p.set_defaults(fn=cmd_nonvanishing)
    return ap


_NEEDS_X = {"moment", "twisted-moment", "sqfree-count", "mollify", "nonvanishing"}


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # keep negative Gaussian literals such as -1+2i from being read as options
    argv = [" " + t if re.fullmatch(r"-\d*([+-]\d*)?i|-\d+", t) else t for t in argv]
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if a.subcommand in _NEEDS_X and a.X is None:
        print(f"{a.subcommand}: --X is required", file=sys.stderr)
        return 2
    extra = {k: str(v) for k, v in vars(a).items() if k not in {
        "fn", "subcommand", "X", "j", "theta", "max_norm", "cutoff_scale", "cache", "workers", "out", "seed", "tolerance"}}
    cfg = RunConfig(a.subcommand, a.X, a.j, a.theta, a.max_norm, a.cutoff_scale, a.cache, a.workers,
                    a.out, a.seed, a.tolerance, extra)
    try:
        rows, ok = a.fn(a, cfg)
    except (HeckeMomentsError, ValueError) as exc:
        print(f"{a.subcommand}: {exc}", file=sys.stderr)
        return 2
    _emit(cfg, rows, a.format)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
