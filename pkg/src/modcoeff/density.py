"""Prime classifications by coefficient size, the multiplicative set they
generate, and numeric checks of the Mertens / Wirsing asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import mpmath
import numpy as np

from ._mp import mp_ctx
from .arith import (
    divisor_count,
    factorize,
    omega,
    omega_sieve,
    p_adic_val,
    primes_up_to,
    radical,
)
from .bounds import gt_lower
from .coeff_engine import TAU_TABLE_CAP, FormKind, FormSpec, prime_coeff, tau_series
from .constants import EULER_GAMMA, MERTENS_B
from .errors import BadReductionError, DomainError, HypothesisError, RangeError

__all__ = [
    "ThresholdKind", "PrimeClassification", "classify_primes", "chi_f", "count_Nf",
    "harmonic_sum", "mertens_product", "wirsing_eval", "hr_bounds_check",
    "constant_crosscheck", "density_report", "DensityReport",
    "divisor_count", "omega", "radical", "p_adic_val",
]

DEFAULT_PRECISION_BITS = 128
EULER_TRUNCATION = 1e-30


class ThresholdKind(str, Enum):
    NONVANISHING = "nonvanishing"
    GT_LOWER_BOUND = "gt"


@dataclass(frozen=True)
class PrimeClassification:
    form_label: str
    x_limit: int
    threshold_kind: ThresholdKind
    primes: np.ndarray = field(repr=False, compare=False)
    member_mask: np.ndarray = field(repr=False, compare=False)
    bad_primes: tuple[int, ...] = ()

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.member_mask.setflags(write=False)

    def member(self, p: int) -> bool:
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            raise RangeError(f"{p} is not a classified prime (limit {self.x_limit})")
        return bool(self.member_mask[i])

    @property
    def members(self) -> np.ndarray:
        return self.primes[self.member_mask]

    @property
    def count(self) -> int:
        return int(self.member_mask.sum())

    @property
    def fraction(self) -> float:
        return self.count / len(self.primes) if len(self.primes) else 0.0

    @classmethod
    def from_members(cls, members: Iterable[int], x: int, label: str = "custom") -> PrimeClassification:
        ps = np.array(primes_up_to(x))
        mask = np.isin(ps, np.fromiter(members, dtype=np.int64))
        return cls(label, x, ThresholdKind.NONVANISHING, ps, mask)


def _prime_values(form: FormSpec, ps: np.ndarray) -> tuple[list[int | None], list[int]]:
    if form.kind is FormKind.DELTA:
        if len(ps) == 0:
            return [], []
        table = tau_series(min(int(ps[-1]), TAU_TABLE_CAP))
        return [table[int(p)] for p in ps], []
    vals: list[int | None] = []
    bad = []
    for p in ps:
        try:
            vals.append(prime_coeff(form, int(p)))
        except BadReductionError:
            vals.append(None)
            bad.append(int(p))
    return vals, bad


def classify_primes(form: FormSpec, x: int, threshold_kind: ThresholdKind | str,
                    precision_bits: int = DEFAULT_PRECISION_BITS) -> PrimeClassification:
    """Membership per prime p <= x.

    NONVANISHING: lambda(p) != 0.  GT_LOWER_BOUND: |lambda(p)| >= max(0, L),
    L = p^((k-1)/2) loglog p / sqrt(log p); for p = 2 the threshold is
    negative so the prime is a member.  Primes of bad reduction are never
    members and are listed in ``bad_primes``.
    """
    kind = ThresholdKind(threshold_kind)
    ps = np.array(primes_up_to(int(x)))
    vals, bad = _prime_values(form, ps)
    ctx = mp_ctx(precision_bits)
    mask = np.zeros(len(ps), dtype=bool)
    for i, (p, v) in enumerate(zip(ps, vals)):
        if v is None:
            continue
        if kind is ThresholdKind.NONVANISHING:
            mask[i] = v != 0
        elif p == 2:
            mask[i] = True
        else:
            mask[i] = v != 0 and ctx.log(abs(v)) >= gt_lower(int(p), form.weight, precision_bits)
    return PrimeClassification(form.label, int(x), kind, ps, mask, tuple(bad))


def chi_f(n: int, classification: PrimeClassification) -> int:
    """1 iff every prime divisor of n is a member; completely multiplicative."""
    if n < 1:
        raise DomainError("n must be >= 1")
    for p in factorize(n):
        if p > classification.x_limit:
            raise RangeError(f"prime divisor {p} of {n} beyond classification limit")
        if not classification.member(p):
            return 0
    return 1


def _nf_mask(classification: PrimeClassification, x: int) -> np.ndarray:
    if x > classification.x_limit:
        raise RangeError(f"x = {x} beyond classification limit {classification.x_limit}")
    good = np.ones(x + 1, dtype=bool)
    good[0] = False
    for p in classification.primes[~classification.member_mask]:
        if p > x:
            break
        good[p::p] = False
    return good


def count_Nf(classification: PrimeClassification, x: int) -> int:
    """#{n <= x : every p | n is a member}."""
    return int(_nf_mask(classification, int(x)).sum())


def _member_primes(src, x: int) -> np.ndarray:
    if src is None:
        return primes_up_to(x)
    if isinstance(src, PrimeClassification):
        if x > src.x_limit:
            raise RangeError(f"x = {x} beyond classification limit {src.x_limit}")
        m = src.members
        return m[m <= x]
    arr = np.asarray(sorted(int(p) for p in src), dtype=np.int64)
    return arr[arr <= x]


@dataclass(frozen=True)
class Comparison:
    lhs: object
    rhs: object
    tau: float

    @property
    def ratio(self):
        return self.lhs / self.rhs if self.rhs else None

    @property
    def diff(self):
        return self.lhs - self.rhs


def harmonic_sum(src, x: int, tau: float | None = None,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> Comparison:
    """sum_{p <= x, p in P} 1/p against tau (loglog x + B).

    ``src`` is None for all primes, a PrimeClassification, or an iterable of
    primes.  ``tau`` defaults to 1 for all primes and to 0 for an empty set.
    """
    if x < 3:
        raise DomainError("x must be >= 3")
    ps = _member_primes(src, int(x))
    if tau is None:
        tau = 1.0 if src is None else (1.0 if len(ps) else 0.0)
    ctx = mp_ctx(precision_bits)
    lhs = ctx.fsum(ctx.mpf(1) / int(p) for p in ps)
    rhs = ctx.mpf(tau) * (ctx.log(ctx.log(x)) + ctx.mpf(MERTENS_B))
    return Comparison(lhs, rhs, tau)


def mertens_product(src, x: int, tau: float | None = None,
                    precision_bits: int = DEFAULT_PRECISION_BITS) -> Comparison:
    """prod_{p <= x, p in P} (1 - 1/p)^(-1) against (e^gamma log x)^tau."""
    if x < 3:
        raise DomainError("x must be >= 3")
    ps = _member_primes(src, int(x))
    if tau is None:
        tau = 1.0 if src is None else (1.0 if len(ps) else 0.0)
    ctx = mp_ctx(precision_bits)
    log_lhs = ctx.fsum(ctx.log(ctx.mpf(int(p)) / (int(p) - 1)) for p in ps)
    rhs = (ctx.exp(ctx.mpf(EULER_GAMMA)) * ctx.log(x)) ** ctx.mpf(tau)
    return Comparison(ctx.exp(log_lhs), rhs, tau)


def constant_crosscheck(x: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> dict:
    """Finite-x values of the limits defining gamma and B next to the literals.

    sum_{p<=x} log p / (p - 1) - log x tends to -gamma (the sign is easy to
    get wrong), and sum 1/p - loglog x tends to B.
    """
    ctx = mp_ctx(precision_bits)
    ps = primes_up_to(int(x))
    s_gamma = ctx.fsum(ctx.log(int(p)) / (int(p) - 1) for p in ps) - ctx.log(x)
    s_b = ctx.fsum(ctx.mpf(1) / int(p) for p in ps) - ctx.log(ctx.log(x))
    return {
        "x": int(x),
        "gamma_limit": -s_gamma,
        "gamma_literal": ctx.mpf(EULER_GAMMA),
        "b_limit": s_b,
        "b_literal": ctx.mpf(MERTENS_B),
    }


def multiplicative_table(f: Callable[[int, int], float], x: int) -> np.ndarray:
    """f(n) for 0 <= n <= x (f(0) set to 0) from prime-power values f(p, k)."""
    out = np.ones(x + 1, dtype=np.float64)
    out[0] = 0.0
    for p in primes_up_to(x):
        p = int(p)
        n_mult = x // p
        fac = np.full(n_mult, float(f(p, 1)))
        pk, k = p * p, 2
        while pk <= x:
            # multiples of p^k inside the multiples of p sit at stride p^(k-1)
            fac[pk // p - 1 :: pk // p] = float(f(p, k))
            pk *= p
            k += 1
        out[p::p] *= fac
    return out


def _check_growth(f: Callable[[int, int], float], x: int) -> float:
    sample = [int(p) for p in primes_up_to(min(x, 1000))[:40]]
    worst = 0.0
    for p in sample:
        for k in range(1, 9):
            v = float(f(p, k))
            if v < 0:
                raise HypothesisError(f"f({p}^{k}) = {v} < 0")
            worst = max(worst, v ** (1 / k))
    if worst >= 2:
        raise HypothesisError(f"f(p^k) grows like {worst}^k, need c < 2")
    return worst


def wirsing_eval(f: Callable[[int, int], float], x: int, tau: float,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> Comparison:
    """sum_{n<=x} f(n) against
    x / (e^(gamma tau) Gamma(tau) log x) * prod_{p<=x} (1 + f(p)/p + f(p^2)/p^2 + ...).

    ``f(p, k)`` gives the value at p^k.  Euler factors stop once a term is
    below 1e-30 of the running factor.
    """
    if tau <= 0:
        raise DomainError("tau must be positive")
    c = _check_growth(f, x)
    lhs = math.fsum(multiplicative_table(f, int(x)))
    ctx = mp_ctx(precision_bits)
    cut = EULER_TRUNCATION
    logs = []
    for p in primes_up_to(int(x)):
        p = int(p)
        s = ctx.mpf(1)
        inv_p = 1 / ctx.mpf(p)
        inv_pk = inv_p
        r = c / p
        tail = r * r / (1 - r)
        k = 1
        # remaining tail after term k is at most r^(k+1) / (1 - r)
        while True:
            fv = f(p, k)
            if fv:
                s += fv * inv_pk
            if tail < cut * s:
                break
            k += 1
            inv_pk *= inv_p
            tail *= r
        logs.append(ctx.log(s))
    g = ctx.mpf(EULER_GAMMA)
    const = 1 / (ctx.exp(g * tau) * ctx.gamma(ctx.mpf(tau)))
    rhs = const * x / ctx.log(x) * ctx.exp(ctx.fsum(logs))
    return Comparison(ctx.mpf(lhs), rhs, tau)


def hr_bounds_check(x: int, epsilon: float = 0.01) -> dict:
    """max_{3 <= n <= x} omega(n) loglog n / log n, against 1 + epsilon."""
    if x < 100:
        raise DomainError("x must be >= 100")
    w = omega_sieve(int(x))
    n = np.arange(3, int(x) + 1, dtype=np.float64)
    ratio = w[3:] * np.log(np.log(n)) / np.log(n)
    i = int(np.argmax(ratio))
    return {
        "x": int(x),
        "max_ratio": float(ratio[i]),
        "argmax": i + 3,
        "omega_at_argmax": int(w[i + 3]),
        "bound": 1 + epsilon,
        "within_bound": bool(ratio[i] <= 1 + epsilon),
    }


def omega_ratio(n: int) -> float:
    if n < 3:
        raise DomainError("loglog n <= 0 for n < 3")
    return omega(n) * math.log(math.log(n)) / math.log(n)


@dataclass(frozen=True)
class DensityReport:
    x: int
    count_Pf: int
    pi_x: int
    Nf_count: int
    tau_assumed: float
    tau_empirical: float
    mertens: Comparison
    harmonic: Comparison
    wirsing: Comparison

    def __post_init__(self):
        assert 0 <= self.count_Pf <= self.pi_x
        assert self.Nf_count <= self.x

    @property
    def ratios(self) -> dict:
        return {
            "Pf_over_pi": self.count_Pf / self.pi_x if self.pi_x else None,
            "Nf_over_x": self.Nf_count / self.x,
            "mertens": self.mertens.ratio,
            "wirsing": self.wirsing.ratio,
        }

    def to_dict(self, digits: int = 20) -> dict:
        def s(v):
            return None if v is None else (mpmath.nstr(v, digits) if not isinstance(v, (int, float)) else v)

        return {
            "x": self.x,
            "count_Pf": self.count_Pf,
            "pi_x": self.pi_x,
            "Nf_count": self.Nf_count,
            "tau_assumed": self.tau_assumed,
            "tau_empirical": self.tau_empirical,
            "mertens_lhs": s(self.mertens.lhs), "mertens_rhs": s(self.mertens.rhs),
            "harmonic_lhs": s(self.harmonic.lhs), "harmonic_rhs": s(self.harmonic.rhs),
            "wirsing_lhs": s(self.wirsing.lhs), "wirsing_rhs": s(self.wirsing.rhs),
            "ratios": {k: s(v) for k, v in self.ratios.items()},
        }


def density_report(classification: PrimeClassification | None, x: int,
                   tau: float | None = None,
                   precision_bits: int = DEFAULT_PRECISION_BITS) -> DensityReport:
    """Counts and the three asymptotic comparisons at a single x.

    ``tau`` is the density fed into the asymptotic formulas (default 1, the
    value the asymptotics assume); the observed member fraction is reported
    beside it, never substituted for it.
    """
    x = int(x)
    pi_x = len(primes_up_to(x))
    if classification is None:
        classification = PrimeClassification.from_members(primes_up_to(x), x, "all primes")
    members = classification.members
    count = int((members <= x).sum())
    tau_assumed = 1.0 if tau is None else float(tau)
    member_set = set(int(p) for p in members[members <= x])

    def chi(p: int, k: int) -> float:
        return 1.0 if p in member_set else 0.0

    return DensityReport(
        x=x,
        count_Pf=count,
        pi_x=pi_x,
        Nf_count=count_Nf(classification, x),
        tau_assumed=tau_assumed,
        tau_empirical=count / pi_x if pi_x else 0.0,
        mertens=mertens_product(classification, x, tau_assumed, precision_bits),
        harmonic=harmonic_sum(classification, x, tau_assumed, precision_bits),
        wirsing=wirsing_eval(chi, x, tau_assumed, precision_bits),
    )
