"""Exact Fourier coefficients of level-one forms and elliptic-curve traces.

The tau table is built from Jacobi's identity for eta^3 (a sparse series
with ~sqrt(2N) terms): one dense x sparse product gives eta^6, six more give
eta^24, and Delta = q * eta^24.  The products run in numpy over several
word-size primes and the integers are recovered by CRT, with enough primes
to cover an a-priori majorant of every coefficient.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath
import numpy as np

from .arith import divisor_count, factorize, is_prime
from ._mp import mp_ctx
from .errors import (
    BadReductionError,
    DegenerateAngleError,
    DeligneViolationError,
    DomainError,
    EmptyRangeError,
    ResourceError,
)

TAU_TABLE_CAP = 100_000
EC_PRIME_CAP = 1_000_000
DEFAULT_PRECISION_BITS = 128
_GUARD_BITS = 16


class FormKind(str, Enum):
    DELTA = "delta"
    ELLIPTIC_CURVE = "ec"
    USER_TABLE = "table"


@dataclass(frozen=True)
class FormSpec:
    kind: FormKind
    weight: int
    label: str = ""
    a: int | None = None
    b: int | None = None
    user_values: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.weight < 1:
            raise DomainError(f"weight must be >= 1, got {self.weight}")
        if self.kind is FormKind.DELTA and self.weight != 12:
            raise DomainError("Delta has weight 12")
        if self.kind is FormKind.ELLIPTIC_CURVE:
            if self.a is None or self.b is None:
                raise DomainError("elliptic curve needs coefficients a, b")
            if self.discriminant == 0:
                raise DomainError(f"y^2 = x^3 + {self.a}x + {self.b} is singular")

    @classmethod
    def delta(cls) -> FormSpec:
        return cls(FormKind.DELTA, 12, "delta")

    @classmethod
    def elliptic_curve(cls, a: int, b: int, weight: int = 2) -> FormSpec:
        # Hasse |a_p| <= 2 sqrt(p) is the k = 2 normalization; weight is overridable.
        return cls(FormKind.ELLIPTIC_CURVE, weight, f"ec:a={a},b={b}", a=a, b=b)

    @classmethod
    def user_table(cls, values: Mapping[int, int], weight: int, label: str = "table") -> FormSpec:
        return cls(FormKind.USER_TABLE, weight, label,
                   user_values=tuple(sorted((int(n), int(v)) for n, v in values.items())))

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a**3 + 27 * self.b**2)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "weight": self.weight, "label": self.label}
        if self.kind is FormKind.ELLIPTIC_CURVE:
            d.update(a=self.a, b=self.b)
        if self.kind is FormKind.USER_TABLE:
            d["values"] = {str(n): str(v) for n, v in self.user_values}
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> FormSpec:
        kind = FormKind(d["kind"])
        if kind is FormKind.DELTA:
            return cls.delta()
        if kind is FormKind.ELLIPTIC_CURVE:
            return cls.elliptic_curve(int(d["a"]), int(d["b"]), int(d["weight"]))
        return cls.user_table({int(n): int(v) for n, v in d["values"].items()},
                              int(d["weight"]), d.get("label", "table"))


@dataclass(frozen=True)
class PrimePower:
    p: int
    m: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.m < 0:
            raise DomainError(f"negative exponent {self.m}")

    @property
    def value(self) -> int:
        return self.p**self.m


@dataclass(frozen=True)
class CoeffTable:
    """lambda(1..limit) as an immutable tuple; index with ``table[n]``."""

    form: FormSpec
    limit: int
    values: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.values) != self.limit:
            raise DomainError("values length does not match limit")

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(n)
        return self.values[n - 1]

    def __len__(self) -> int:
        return self.limit

    def items(self) -> Iterable[tuple[int, int]]:
        return enumerate(self.values, start=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lambda"])
        for n, v in self.items():
            w.writerow([n, str(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "form": self.form.to_dict(),
            "limit": self.limit,
            "values": {str(n): str(v) for n, v in self.items()},
        }, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> CoeffTable:
        d = json.loads(text)
        limit = int(d["limit"])
        vals = tuple(int(d["values"][str(n)]) for n in range(1, limit + 1))
        return cls(FormSpec.from_dict(d["form"]), limit, vals)

    @classmethod
    def from_csv(cls, text: str, form: FormSpec) -> CoeffTable:
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["n", "lambda"]:
            raise DomainError(f"unexpected CSV header {rows[0]}")
        vals = [int(v) for n, v in rows[1:]]
        if [int(n) for n, _ in rows[1:]] != list(range(1, len(vals) + 1)):
            raise DomainError("CSV rows must be n = 1..N in order")
        return cls(form, len(vals), tuple(vals))


# -- tau table -------------------------------------------------------------

def _eta_cubed_terms(length: int) -> list[tuple[int, int]]:
    """Nonzero terms (exponent, coeff) of eta^3 below q^length: (-1)^m (2m+1) q^(m(m+1)/2)."""
    out = []
    m = 0
    while m * (m + 1) // 2 < length:
        out.append((m * (m + 1) // 2, (-1) ** m * (2 * m + 1)))
        m += 1
    return out


def _primes_below(bound: int, count: int) -> list[int]:
    out = []
    n = bound - 1
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n -= 1
    return out


def _mul_sparse(dense: np.ndarray, terms: list[tuple[int, int]], mods: np.ndarray) -> np.ndarray:
    length = dense.shape[1]
    out = np.zeros_like(dense)
    for e, c in terms:
        out[:, e:] += c * dense[:, : length - e]
    out %= mods
    return out


def eta24_series(length: int) -> list[int]:
    """Exact coefficients of prod (1 - q^n)^24 for q^0 .. q^(length-1)."""
    terms = _eta_cubed_terms(length)
    n_terms = len(terms)
    # every product coefficient is bounded by (sum |eta^3 coeffs|)^8 = n_terms^16
    bound = n_terms**16
    max_c = 2 * n_terms
    # per-step int64 headroom: n_terms additions of |c| * (p - 1)
    mod_bits = 62 - (n_terms * max_c).bit_length()
    n_mods = -(-(2 * bound + 1).bit_length() // (mod_bits - 1))
    mods = _primes_below(1 << mod_bits, n_mods)
    mod_col = np.array(mods, dtype=np.int64)[:, None]

    dense = np.zeros((len(mods), length), dtype=np.int64)
    for e, c in terms:
        dense[:, e] = c
    dense %= mod_col
    for _ in range(7):  # eta^3 -> eta^6 -> ... -> eta^24
        dense = _mul_sparse(dense, terms, mod_col)

    modulus = math.prod(mods)
    weights = []
    for p in mods:
        mi = modulus // p
        weights.append(mi * pow(mi, -1, p) % modulus)
    acc = np.zeros(length, dtype=object)
    for row, w in zip(dense, weights):
        acc += row.astype(object) * w
    half = modulus // 2
    return [int(v) - modulus if v > half else int(v) for v in acc % modulus]


@lru_cache(maxsize=4)
def _tau_values(n: int) -> tuple[int, ...]:
    return tuple(eta24_series(n))


def tau_series(N: int, cap: int = TAU_TABLE_CAP) -> CoeffTable:
    """tau(1..N) exactly."""
    if N < 1:
        raise EmptyRangeError("tau_series needs N >= 1")
    if N > cap:
        raise ResourceError(f"N = {N} exceeds table cap {cap}; use coeff_at for single values")
    return CoeffTable(FormSpec.delta(), N, _tau_values(N))


def _tau_prime(p: int, cap: int = TAU_TABLE_CAP) -> int:
    if p > cap:
        raise ResourceError(f"tau({p}) needs a table beyond cap {cap}")
    size = 1 << max(6, (p - 1).bit_length())
    return _tau_values(min(size, cap))[p - 1]


# -- elliptic curves -------------------------------------------------------

def ec_point_count(a: int, b: int, p: int) -> int:
    """#E(F_p) for y^2 = x^3 + ax + b, including the point at infinity."""
    a %= p
    b %= p
    ys = np.arange(p, dtype=np.int64)
    squares = np.bincount(ys * ys % p, minlength=p)
    xs = ys
    rhs = ((xs * xs % p) * xs + a * xs + b) % p
    return 1 + int(squares[rhs].sum())


def ec_trace(a: int, b: int, p: int, cap: int = EC_PRIME_CAP) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p > cap:
        raise ResourceError(f"p = {p} is above the point-counting cap {cap}")
    if (16 * (4 * a**3 + 27 * b**2)) % p == 0:
        raise BadReductionError(f"curve ({a}, {b}) has bad reduction at {p}")
    ap = p + 1 - ec_point_count(a, b, p)
    assert ap * ap <= 4 * p, "Hasse bound violated"
    return ap


# -- Hecke recurrence and factored evaluation ------------------------------

def hecke_prime_power(lambda_p: int, pp: PrimePower, k: int) -> int:
    """lambda(p^m) from lambda(p) via l(p^(j+1)) = l(p) l(p^j) - p^(k-1) l(p^(j-1))."""
    prev, cur = 1, lambda_p
    if pp.m == 0:
        return 1
    pk = pp.p ** (k - 1)
    for _ in range(pp.m - 1):
        prev, cur = cur, lambda_p * cur - pk * prev
    return cur


def prime_coeff(form: FormSpec, p: int) -> int:
    if form.kind is FormKind.DELTA:
        return _tau_prime(p)
    if form.kind is FormKind.ELLIPTIC_CURVE:
        return ec_trace(form.a, form.b, p)
    values = dict(form.user_values)
    if p not in values:
        raise DomainError(f"user table has no value at prime {p}")
    return values[p]


def coeff_at(form: FormSpec, n: int) -> int:
    """lambda(n) as the product of lambda(p^v) over p^v || n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if form.kind is FormKind.USER_TABLE:
        values = dict(form.user_values)
        if n in values:
            return values[n]
    out = 1
    for p, v in factorize(n).items():
        out *= hecke_prime_power(prime_coeff(form, p), PrimePower(p, v), form.weight)
    return out


def within_deligne(value: int, n: int, k: int) -> bool:
    """Exact test of |lambda(n)| <= d(n) n^((k-1)/2), squared to stay in integers."""
    d = divisor_count(n)
    return value * value <= d * d * n ** (k - 1)


# -- Frobenius angle and Binet form ----------------------------------------


@dataclass(frozen=True)
class FrobeniusAngle:
    p: int
    k: int
    theta: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION_BITS
    lambda_p: int | None = None

    @property
    def degenerate(self) -> bool:
        if self.lambda_p is not None:
            return self.lambda_p**2 == 4 * self.p ** (self.k - 1)
        ctx = mp_ctx(self.precision_bits)
        return abs(ctx.sin(self.theta)) < ctx.ldexp(1, -self.precision_bits + 4)


def frobenius_angle(lambda_p: int, p: int, k: int,
                    precision_bits: int = DEFAULT_PRECISION_BITS) -> FrobeniusAngle:
    if lambda_p * lambda_p > 4 * p ** (k - 1):
        raise DeligneViolationError(f"|lambda({p})| = {abs(lambda_p)} > 2*{p}^(({k}-1)/2)")
    ctx = mp_ctx(precision_bits + _GUARD_BITS)
    if lambda_p == 0:
        theta = ctx.pi / 2
    else:
        theta = ctx.acos(ctx.mpf(lambda_p) / (2 * ctx.sqrt(ctx.mpf(p) ** (k - 1))))
    return FrobeniusAngle(p, k, theta, precision_bits, lambda_p)


def binet_eval(angle: FrobeniusAngle, m: int) -> mpmath.mpf:
    """p^((k-1)m/2) sin((m+1) theta) / sin(theta)."""
    if m < 0:
        raise DomainError("exponent must be >= 0")
    if angle.degenerate:
        raise DegenerateAngleError(f"theta_{angle.p} is 0 or pi (repeated Hecke root)")
    ctx = mp_ctx(angle.precision_bits + _GUARD_BITS)
    if m == 0:
        return ctx.mpf(1)
    if angle.lambda_p == 0 and m % 2 == 1:
        return ctx.mpf(0)
    th = ctx.mpf(angle.theta)
    scale = ctx.sqrt(ctx.mpf(angle.p)) ** ((angle.k - 1) * m)
    return scale * ctx.sin((m + 1) * th) / ctx.sin(th)
