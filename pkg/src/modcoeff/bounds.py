"""Upper and lower envelopes for |lambda(n)|, all evaluated as natural logs.

Exact coefficients enter through certified log intervals so a comparison
never depends on float rounding of a 30-digit integer.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import mpmath

from .arith import divisor_count, factorize
from .coeff_engine import (
    TAU_TABLE_CAP,
    FormKind,
    FormSpec,
    PrimePower,
    coeff_at,
    tau_series,
)
from ._mp import iv_ctx, mp_ctx
from .errors import DomainError, UnsupportedWeightError

DEFAULT_EPSILON = 0.01
DEFAULT_PRECISION_BITS = 128
BOUND_NAMES = ("hecke", "deligne", "gt_lower", "thm1_lower", "thm2_lower")
UPPER_BOUNDS = ("hecke", "deligne")
# e^e ~ 15.154; log log log n is real and defined only above it
THM2_MIN_N = 16



def hecke_upper(pp: PrimePower, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of p^((k-1)m), the Hecke estimate with its constant taken as 1."""
    if pp.m < 1:
        raise DomainError("Hecke estimate needs m >= 1")
    ctx = mp_ctx(precision_bits)
    return (k - 1) * pp.m * ctx.log(pp.p)


def deligne_upper(n: int, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    if n < 1:
        raise DomainError("n must be >= 1")
    return _deligne_log(divisor_count(n), n, k, precision_bits)


def _deligne_log(d: int, n: int, k: int, precision_bits: int):
    ctx = mp_ctx(precision_bits)
    return ctx.log(d) + ctx.mpf(k - 1) / 2 * ctx.log(n)


def gt_lower(p: int, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of p^((k-1)/2) loglog p / sqrt(log p), the prime-level lower envelope."""
    if p <= 2:
        raise DomainError("log log p <= 0 for p <= 2")
    ctx = mp_ctx(precision_bits)
    lp = ctx.log(p)
    return ctx.mpf(k - 1) / 2 * lp + ctx.log(ctx.log(lp)) - ctx.log(lp) / 2


def gt_lower_prime_power(pp: PrimePower, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of 2 p^((k-1)n/2) loglog p^n / sqrt(log p^n)."""
    if pp.value <= 2:
        raise DomainError("log log p^n <= 0 for p^n <= 2")
    ctx = mp_ctx(precision_bits)
    lq = pp.m * ctx.log(pp.p)
    return ctx.log(2) + ctx.mpf(k - 1) / 2 * lq + ctx.log(ctx.log(lq)) - ctx.log(lq) / 2


def thm1_lower(pp: PrimePower, k: int, epsilon: float = DEFAULT_EPSILON,
               precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of (1/8) p^((k-3)n/2 - 2k + 2 - eps)."""
    if k < 4:
        raise UnsupportedWeightError(f"prime-power lower bound needs k >= 4, got {k}")
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    ctx = mp_ctx(precision_bits)
    expo = ctx.mpf((k - 3) * pp.m) / 2 - 2 * k + 2 - ctx.mpf(epsilon)
    return -ctx.log(8) + expo * ctx.log(pp.p)


def thm1_nontrivial(pp: PrimePower) -> bool:
    """p^(n/2) > p^5."""
    return pp.m > 10


def thm2_lower(n: int, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of n^((k-3)/2 + logloglog n / loglog n)."""
    if n < THM2_MIN_N:
        raise DomainError(f"n = {n} is not above e^e")
    ctx = mp_ctx(precision_bits)
    l1 = ctx.log(n)
    l2 = ctx.log(l1)
    return (ctx.mpf(k - 3) / 2 + ctx.log(l2) / l2) * l1


def log_abs_interval(value: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """Certified [lo, hi] containing log|value|; None for zero."""
    if value == 0:
        return None
    iv = iv_ctx(precision_bits)
    r = iv.log(iv.mpf(abs(value)))
    return r.a, r.b


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    exact_abs_coeff: int
    epsilon: float
    divisors: int
    bounds: dict = field(compare=False)
    log_abs: tuple | None = field(default=None, compare=False)

    @property
    def vanishing(self) -> bool:
        return self.exact_abs_coeff == 0

    @property
    def satisfied(self) -> dict[str, bool | None]:
        out: dict[str, bool | None] = {}
        for name in BOUND_NAMES:
            b = self.bounds.get(name)
            if b is None:
                out[name] = None
            elif name == "deligne":
                v = self.exact_abs_coeff
                out[name] = v * v <= self.divisors**2 * self.n ** (self.k - 1)
            elif self.vanishing:
                # lower bounds concern nonvanishing coefficients only
                out[name] = True if name in UPPER_BOUNDS else None
            elif name in UPPER_BOUNDS:
                out[name] = bool(self.log_abs[1] <= b)
            else:
                out[name] = bool(self.log_abs[0] >= b)
        return out

    def flags(self) -> list[str]:
        fl = ["vanishing"] if self.vanishing else []
        fl += [f"{name}_exception" for name, ok in self.satisfied.items() if ok is False]
        return fl


def bound_report(n: int, value: int, k: int, epsilon: float = DEFAULT_EPSILON,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    fac = factorize(n)
    bounds: dict = dict.fromkeys(BOUND_NAMES)
    d = math.prod(v + 1 for v in fac.values())
    bounds["deligne"] = _deligne_log(d, n, k, precision_bits)
    if len(fac) == 1:
        (p, m), = fac.items()
        pp = PrimePower(p, m)
        bounds["hecke"] = hecke_upper(pp, k, precision_bits)
        if m == 1 and p > 2:
            bounds["gt_lower"] = gt_lower(p, k, precision_bits)
        elif m > 1:
            bounds["gt_lower"] = gt_lower_prime_power(pp, k, precision_bits)
        if k >= 4:
            bounds["thm1_lower"] = thm1_lower(pp, k, epsilon, precision_bits)
    if n >= THM2_MIN_N:
        bounds["thm2_lower"] = thm2_lower(n, k, precision_bits)
    return BoundReport(n, k, abs(value), epsilon, d, bounds,
                       log_abs_interval(value, precision_bits))


def _coefficients(form: FormSpec, ns: list[int]) -> dict[int, int]:
    if form.kind is FormKind.DELTA and ns and max(ns) <= TAU_TABLE_CAP and len(ns) > 32:
        table = tau_series(max(ns))
        return {n: table[n] for n in ns}
    return {n: coeff_at(form, n) for n in ns}


def verify_sandwich(form: FormSpec, ns: Iterable[int], epsilon: float = DEFAULT_EPSILON,
                    precision_bits: int = DEFAULT_PRECISION_BITS) -> list[BoundReport]:
    """One report per n, in ascending order."""
    ns = sorted(set(int(n) for n in ns))
    if ns and ns[0] < 1:
        raise DomainError("n must be >= 1")
    coeffs = _coefficients(form, ns)
    return [bound_report(n, coeffs[n], form.weight, epsilon, precision_bits) for n in ns]


def summarize(reports: list[BoundReport]) -> dict:
    """Per-bound checked / satisfied counts and the list of exceptional n."""
    out = {"count": len(reports), "vanishing": [r.n for r in reports if r.vanishing]}
    for name in BOUND_NAMES:
        checked = [(r.n, r.satisfied[name]) for r in reports if r.satisfied[name] is not None]
        exc = [n for n, ok in checked if not ok]
        out[name] = {
            "checked": len(checked),
            "satisfied": len(checked) - len(exc),
            "fraction": (len(checked) - len(exc)) / len(checked) if checked else None,
            "exceptions": exc,
        }
    return out


def _fmt_log(x) -> str:
    return "" if x is None else mpmath.nstr(x, 25)


def reports_to_csv(reports: list[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "abs_coeff", "log_abs_coeff"] + [f"log_{b}" for b in BOUND_NAMES] + ["flags"])
    for r in reports:
        la = "" if r.log_abs is None else _fmt_log((r.log_abs[0] + r.log_abs[1]) / 2)
        w.writerow([r.n, str(r.exact_abs_coeff), la]
                   + [_fmt_log(r.bounds[b]) for b in BOUND_NAMES] + [";".join(r.flags())])
    return buf.getvalue()


def report_to_dict(r: BoundReport) -> dict:
    return {
        "n": r.n,
        "k": r.k,
        "epsilon": r.epsilon,
        "abs_coeff": str(r.exact_abs_coeff),
        "log_abs_coeff": None if r.log_abs is None else [_fmt_log(x) for x in r.log_abs],
        "log_bounds": {b: (None if r.bounds[b] is None else _fmt_log(r.bounds[b])) for b in BOUND_NAMES},
        "satisfied": r.satisfied,
        "flags": r.flags(),
    }


def reports_to_json(reports: list[BoundReport]) -> str:
    return json.dumps([report_to_dict(r) for r in reports], indent=1)


def sci(log_value, digits: int = 3) -> str:
    """exp(log_value) in scientific notation with a fixed mantissa, e.g. '1.60e+29'."""
    ctx = mp_ctx(128)
    l10 = ctx.mpf(log_value) / ctx.log(10)
    e = int(ctx.floor(l10))
    mant = ctx.power(10, l10 - e)
    text = mpmath.nstr(mant, digits, strip_zeros=False, min_fixed=-1, max_fixed=2)
    if text.startswith("10"):
        e += 1
        text = mpmath.nstr(mant / 10, digits, strip_zeros=False, min_fixed=-1, max_fixed=2)
    return f"{text}e{e:+03d}"


def sandwich_table(form: FormSpec, n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[tuple[str, str]]:
    """The three-line lower / exact / upper comparison at a single n."""
    value = coeff_at(form, n)
    k = form.weight
    ctx = mp_ctx(precision_bits)
    rows = [
        ("n^((k-3)/2 + logloglog n / loglog n)", sci(thm2_lower(n, k, precision_bits))),
        (f"|lambda({n})|", f"{abs(value)} = {sci(ctx.log(abs(value))) if value else '0'}"),
        ("d(n) n^((k-1)/2)", sci(deligne_upper(n, k, precision_bits))),
    ]
    return rows
