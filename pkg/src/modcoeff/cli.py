"""Command-line front end.

    modcoeff coeff --form delta --n 1000000
    modcoeff verify --form delta --max-n 10000 --epsilon 0.01
    modcoeff density --x 1e6 --mertens
    modcoeff liouville --poly 1,0,-2 --convergents 10
    modcoeff wirsing --f one --x 1e6 --tau 1

Hard invariants (exact identities, Deligne, Liouville) set a nonzero exit
status; asymptotic bounds only annotate the report.  Output is a pure
function of the configuration, so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction

import mpmath
import sympy

from . import __version__
from .bounds import (
    BOUND_NAMES,
    DEFAULT_EPSILON,
    THM2_MIN_N,
    reports_to_csv,
    report_to_dict,
    sandwich_table,
    summarize,
    verify_sandwich,
)
from .coeff_engine import (
    FormKind,
    FormSpec,
    PrimePower,
    coeff_at,
    frobenius_angle,
    hecke_prime_power,
    prime_coeff,
    tau_series,
)
from .constants import PROVENANCE
from .density import (
    ThresholdKind,
    classify_primes,
    constant_crosscheck,
    density_report,
    harmonic_sum,
    mertens_product,
    wirsing_eval,
)
from .diophantine import (
    MinimalPolynomial,
    RationalApprox,
    gap_squared_exact,
    liouville_check,
    mahler_height,
    real_root_intervals,
    root_convergents,
    threshold_squared_exact,
    unimodular_gap_check,
)
from .arith import primes_up_to
from .errors import BadReductionError, ModCoeffError, PrecisionError

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_ERROR = 2


def parse_form(text: str | None, weight: int | None = None) -> FormSpec | None:
    """'delta', or 'ec:a=0,b=1' with an optional ',k=2'."""
    if text is None or text == "none":
        return None
    if text == "delta":
        return FormSpec.delta()
    if text.startswith("ec:"):
        kv = dict(part.split("=", 1) for part in text[3:].split(","))
        k = int(kv.get("k", weight or 2))
        return FormSpec.elliptic_curve(int(kv["a"]), int(kv["b"]), k)
    raise argparse.ArgumentTypeError(f"unknown form {text!r}")


def parse_int(text: str) -> int:
    """Accepts '1000', '1e6', '10**5'."""
    text = text.strip()
    if "**" in text:
        b, e = text.split("**")
        return int(b) ** int(e)
    if "e" in text.lower():
        m, e = text.lower().split("e")
        v = Fraction(m) * 10 ** int(e)
        if v.denominator != 1:
            raise argparse.ArgumentTypeError(f"{text} is not an integer")
        return int(v)
    return int(text)


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    return int(v) if v else default


def _nstr(x, digits: int = 20) -> str:
    return mpmath.nstr(x, digits)


def _envelope(args, body: dict) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    return {
        "schema": "modcoeff.report/1",
        "tool": {"name": "modcoeff", "version": __version__},
        "config": cfg,
        "precision_bits": args.precision,
        "seed": args.seed,
        "constants": PROVENANCE,
        "result": body,
    }


def _dump(args, body: dict, table_lines: list[str], csv_text: str | None = None) -> str:
    if args.format == "json":
        return json.dumps(_envelope(args, body), indent=1, sort_keys=True, default=str) + "\n"
    if args.format == "csv" and csv_text is not None:
        head = f"# modcoeff {__version__} seed={args.seed} precision={args.precision}\n"
        return head + csv_text
    return "\n".join(table_lines) + "\n"


# -- subcommands -----------------------------------------------------------

def _coeff_or_none(form: FormSpec, n: int) -> int | None:
    """Table entry; None where n meets a prime of bad reduction."""
    try:
        return coeff_at(form, n)
    except BadReductionError:
        return None


def cmd_coeff(args) -> tuple[int, str]:
    form = parse_form(args.form, args.weight)
    if form is None:
        raise ModCoeffError("coeff needs --form")
    if args.table is not None:
        if form.kind is FormKind.DELTA:
            table = tau_series(args.table)
            rows = list(table.items())
        else:
            rows = [(n, _coeff_or_none(form, n)) for n in range(1, args.table + 1)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lambda"])
        for n, v in rows:
            w.writerow([n, "" if v is None else str(v)])
        body = {"form": form.to_dict(), "limit": args.table,
                "values": {str(n): (None if v is None else str(v)) for n, v in rows}}
        lines = [f"{n:>8} {'bad reduction' if v is None else v}" for n, v in rows]
        return EXIT_OK, _dump(args, body, lines, buf.getvalue())
    value = coeff_at(form, args.n)
    body = {"form": form.to_dict(), "n": args.n, "value": str(value)}
    return EXIT_OK, _dump(args, body, [str(value)], f"n,lambda\n{args.n},{value}\n")


def _gap_scan(args, form: FormSpec) -> tuple[dict, list[str], bool]:
    k = args.k or form.weight
    if args.p is not None:
        primes = [args.p]
    else:
        primes = [int(p) for p in primes_up_to(args.p_max)]
    rows, lines, violations = [], [], []
    exact_mismatch = False
    for p in primes:
        lam = prime_coeff(form, p)
        angle = frobenius_angle(lam, p, k, args.precision)
        for m in range(1, args.m_max + 1):
            rep = unimodular_gap_check(angle, m, k)
            lam_pm = hecke_prime_power(lam, PrimePower(p, m), k)
            exact_ok = gap_squared_exact(lam, lam_pm, p, m, k) > threshold_squared_exact(p, m, k)
            if exact_ok != rep.satisfied and not rep.degenerate:
                exact_mismatch = True
            if not rep.satisfied:
                violations.append([p, m])
            rows.append(rep.to_dict() | {"exact_satisfied": exact_ok})
    lines.append(f"gap checks: {len(rows)}  violations: {len(violations)}")
    for p, m in violations:
        lines.append(f"  violation p={p} m={m}")
    body = {"checks": rows, "violations": violations, "paths_disagree": exact_mismatch}
    return body, lines, exact_mismatch


def cmd_verify(args) -> tuple[int, str]:
    form = parse_form(args.form, args.weight) or FormSpec.delta()
    if args.gap:
        body, lines, bad = _gap_scan(args, form)
        # gap violations are soft; only a disagreement between the two exact/float paths is a bug
        return (EXIT_INVARIANT if bad else EXIT_OK), _dump(args, body, lines)
    if args.n is not None:
        rows = sandwich_table(form, args.n, args.precision)
        reps = verify_sandwich(form, [args.n], args.epsilon, args.precision)
        body = {"n": args.n, "table": [{"quantity": q, "value": v} for q, v in rows],
                "report": report_to_dict(reps[0])}
        lines = [f"{q} = {v}" for q, v in rows]
        code = EXIT_OK if reps[0].satisfied["deligne"] else EXIT_INVARIANT
        return code, _dump(args, body, lines, reports_to_csv(reps))
    lo = args.min_n
    reps = verify_sandwich(form, range(lo, args.max_n + 1), args.epsilon, args.precision)
    summ = summarize(reps)
    deligne_bad = summ["deligne"]["exceptions"]
    lines = [f"form={form.label} n in [{lo}, {args.max_n}] epsilon={args.epsilon}",
             f"vanishing coefficients: {len(summ['vanishing'])}"]
    for name in BOUND_NAMES:
        s = summ[name]
        frac = "-" if s["fraction"] is None else f"{s['fraction']:.6f}"
        lines.append(f"{name:>11}: checked {s['checked']:>7}  satisfied {s['satisfied']:>7}  "
                     f"fraction {frac}  exceptions {len(s['exceptions'])}")
    lines.append(f"Deligne violations = {len(deligne_bad)}")
    body = {"summary": summ, "deligne_violations": deligne_bad}
    code = EXIT_OK if not deligne_bad else EXIT_INVARIANT
    return code, _dump(args, body, lines, reports_to_csv(reps))


def _checkpoints(x: int) -> list[int]:
    out, c = [], 1000
    while c < x:
        out.append(c)
        c *= 10
    return out + [x]


def cmd_density(args) -> tuple[int, str]:
    form = parse_form(args.form, args.weight)
    x = args.x
    lines: list[str] = []
    body: dict = {"x": x}
    if args.mertens or form is None:
        table = []
        for c in _checkpoints(x):
            m = mertens_product(None, c, 1.0, args.precision)
            h = harmonic_sum(None, c, 1.0, args.precision)
            table.append({"x": c, "mertens_ratio": _nstr(m.ratio), "harmonic_diff": _nstr(h.diff)})
            lines.append(f"x={c:>10}  mertens lhs/rhs={_nstr(m.ratio, 12)}  harmonic diff={_nstr(h.diff, 6)}")
        cc = constant_crosscheck(x, args.precision)
        body["mertens"] = table
        body["constant_crosscheck"] = {k: (v if isinstance(v, int) else _nstr(v)) for k, v in cc.items()}
        lines.append(f"gamma from prime sum: {_nstr(cc['gamma_limit'], 8)} (literal {_nstr(cc['gamma_literal'], 8)})")
        lines.append(f"B from prime sum:     {_nstr(cc['b_limit'], 8)} (literal {_nstr(cc['b_literal'], 8)})")
    if form is not None:
        cls = classify_primes(form, x, args.threshold, args.precision)
        rows = []
        for c in _checkpoints(x):
            rep = density_report(cls, c, args.tau, args.precision)
            rows.append(rep.to_dict())
            lines.append(f"x={c:>8}  P_f {rep.count_Pf}/{rep.pi_x} = {rep.count_Pf / rep.pi_x:.4f}  "
                         f"N_f(x)/x = {rep.Nf_count / c:.4f}  wirsing rhs/lhs = "
                         f"{_nstr(rep.wirsing.rhs / rep.wirsing.lhs, 6)}")
        body["classification"] = {"form": form.label, "threshold": ThresholdKind(args.threshold).value,
                                  "member_fraction": cls.fraction, "members": cls.count,
                                  "primes": len(cls.primes), "bad_primes": list(cls.bad_primes)}
        body["checkpoints"] = rows
        lines.insert(0, f"member fraction ({form.label}, {ThresholdKind(args.threshold).value}) "
                        f"up to {x}: {cls.fraction:.4f}")
    return EXIT_OK, _dump(args, body, lines)


def _random_polys(rng: random.Random):
    """Irreducible factors of degree >= 2 from random integer polynomials."""
    while True:
        d = rng.randint(2, 5)
        high = [rng.choice([-3, -2, -1, 1, 2, 3])] + [rng.randint(-20, 20) for _ in range(d)]
        _, factors = sympy.Poly(high, sympy.Symbol("x")).factor_list()
        for g, _mult in factors:
            if g.degree() >= 2:
                yield MinimalPolynomial.from_high([int(c) for c in g.all_coeffs()])


def liouville_suite(f: MinimalPolynomial, count: int, bits: int, root_index: int | None = None):
    """Liouville checks of f's real roots against their own convergents."""
    roots = real_root_intervals(f)
    idxs = range(len(roots)) if root_index is None else [root_index]
    h = mahler_height(f, bits)
    out = []
    for i in idxs:
        for r in root_convergents(f, i, count, bits):
            try:
                out.append(liouville_check(f, i, r, bits, height=h))
            except PrecisionError:
                break
    return out


def cmd_liouville(args) -> tuple[int, str]:
    results = []
    lines = []
    if args.random:
        gen = _random_polys(random.Random(args.seed))
        n_polys = 0
        while n_polys < args.random:
            f = next(gen)
            if not real_root_intervals(f):
                continue
            n_polys += 1
            for rep in liouville_suite(f, args.convergents, args.precision):
                results.append({"poly": list(reversed(f.coeffs))} | rep.to_dict())
        lines.append(f"random polynomials: {n_polys} (seed {args.seed})")
    else:
        f = MinimalPolynomial.from_high([int(c) for c in args.poly.split(",")], allow_content=True)
        roots = real_root_intervals(f)
        if not roots:
            raise ModCoeffError("polynomial has no real root")
        idx = len(roots) - 1 if args.root_index is None else args.root_index
        reps = []
        if args.rational:
            h = mahler_height(f, args.precision)
            for text in args.rational:
                reps.append(liouville_check(f, idx, RationalApprox.from_fraction(Fraction(text)),
                                            args.precision, height=h))
        else:
            reps = liouville_suite(f, args.convergents, args.precision, idx)
        results = [rep.to_dict() for rep in reps]
        for rep in reps:
            lines.append(f"{str(rep.r):>30}  |alpha - r| = {_nstr(rep.lhs, 8):>14}  "
                         f">= {_nstr(rep.rhs, 8):>14}  {'ok' if rep.satisfied else 'VIOLATED'}")
    failed = sum(1 for r in results if not r["satisfied"])
    lines.append(f"checks: {len(results)}  satisfied: {len(results) - failed}")
    body = {"checks": results, "failed": failed}
    return (EXIT_INVARIANT if failed else EXIT_OK), _dump(args, body, lines)


def _wirsing_function(args):
    if args.f == "one":
        return lambda p, k: 1.0
    if args.f == "mod4":
        return lambda p, k: 1.0 if p % 4 == 1 else 0.0
    form = parse_form(args.form, args.weight)
    if form is None:
        raise ModCoeffError("--f chi needs --form")
    cls = classify_primes(form, args.x, args.threshold, args.precision)
    members = set(int(p) for p in cls.members)
    return lambda p, k: 1.0 if p in members else 0.0


def cmd_wirsing(args) -> tuple[int, str]:
    f = _wirsing_function(args)
    res = wirsing_eval(f, args.x, args.tau, args.precision)
    body = {"f": args.f, "x": args.x, "tau": args.tau, "lhs": _nstr(res.lhs),
            "rhs": _nstr(res.rhs), "rhs_over_lhs": _nstr(res.rhs / res.lhs)}
    lines = [f"sum_(n<=x) f(n) = {_nstr(res.lhs, 15)}",
             f"Wirsing main term = {_nstr(res.rhs, 15)}",
             f"rhs/lhs = {_nstr(res.rhs / res.lhs, 10)}"]
    return EXIT_OK, _dump(args, body, lines)


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=_env_int("MODCOEFF_PRECISION", 128),
                        help="working precision in bits (env MODCOEFF_PRECISION)")
    common.add_argument("--threads", type=int, default=_env_int("MODCOEFF_THREADS", 1),
                        help="worker threads (env MODCOEFF_THREADS); results do not depend on it")
    common.add_argument("--weight", type=int, default=None, help="weight override for ec forms")

    p = argparse.ArgumentParser(prog="modcoeff", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"modcoeff {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeff", parents=[common], help="single coefficient or a table")
    c.add_argument("--form", default="delta")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=parse_int)
    g.add_argument("--table", type=parse_int)
    c.set_defaults(func=cmd_coeff)

    v = sub.add_parser("verify", parents=[common], help="bound sandwich and gap checks")
    v.add_argument("--form", default="delta")
    v.add_argument("--n", type=parse_int, default=None)
    v.add_argument("--min-n", type=parse_int, default=1)
    v.add_argument("--max-n", type=parse_int, default=10_000)
    v.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    v.add_argument("--gap", action="store_true")
    v.add_argument("--p", type=parse_int, default=None)
    v.add_argument("--p-max", type=parse_int, default=100)
    v.add_argument("--k", type=int, default=None)
    v.add_argument("--m-max", type=int, default=20)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("density", aliases=["density-scan"], parents=[common], help="prime classification and Mertens scans")
    d.add_argument("--form", default=None)
    d.add_argument("--x", type=parse_int, default=100_000)
    d.add_argument("--threshold", choices=("gt", "nonvanishing"), default="gt")
    d.add_argument("--tau", type=float, default=None)
    d.add_argument("--mertens", action="store_true")
    d.set_defaults(func=cmd_density)

    lv = sub.add_parser("liouville", parents=[common], help="explicit Liouville inequality")
    lv.add_argument("--poly", default="1,0,-2", help="integer coefficients, highest degree first")
    lv.add_argument("--root-index", type=int, default=None, help="real root, ascending (default largest)")
    lv.add_argument("--convergents", type=int, default=10)
    lv.add_argument("--rational", action="append", help="p/q as a decimal-integer fraction")
    lv.add_argument("--random", type=int, default=0, help="check this many random polynomials instead")
    lv.set_defaults(func=cmd_liouville)

    w = sub.add_parser("wirsing", parents=[common], help="Wirsing mean-value comparison")
    w.add_argument("--f", choices=("one", "mod4", "chi"), default="one")
    w.add_argument("--form", default=None)
    w.add_argument("--threshold", choices=("gt", "nonvanishing"), default="gt")
    w.add_argument("--x", type=parse_int, default=1_000_000)
    w.add_argument("--tau", type=float, default=1.0)
    w.set_defaults(func=cmd_wirsing)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.precision < 64:
        print("error: --precision must be >= 64", file=sys.stderr)
        return EXIT_ERROR
    try:
        code, text = args.func(args)
    except (ModCoeffError, ValueError, argparse.ArgumentTypeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
