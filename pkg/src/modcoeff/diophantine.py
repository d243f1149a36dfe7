"""Heights, the explicit Liouville inequality, continued fractions and the
|beta - 1| gap attached to a Frobenius angle.

Every inequality here is decided on certified data: exact integers and
fractions where possible, mpmath interval arithmetic otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import sympy

from ._mp import iv_ctx, mp_ctx
from .coeff_engine import FrobeniusAngle, PrimePower
from .errors import DegenerateAngleError, DomainError, PrecisionError, ZeroFormError

DEFAULT_PRECISION_BITS = 128
_X = sympy.Symbol("x")


@dataclass(frozen=True)
class RationalApprox:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator == 0:
            raise DomainError("zero denominator")
        g = math.gcd(self.numerator, self.denominator)
        sign = -1 if self.denominator < 0 else 1
        object.__setattr__(self, "numerator", sign * self.numerator // g)
        object.__setattr__(self, "denominator", sign * self.denominator // g)

    @classmethod
    def from_fraction(cls, x: Fraction | int) -> RationalApprox:
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def height(self) -> int:
        return max(abs(self.numerator), self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def rational_height(r: RationalApprox) -> int:
    return r.height


@dataclass(frozen=True)
class MinimalPolynomial:
    """Integer polynomial a_0 + a_1 x + ... + a_d x^d (coefficients low to high)."""

    coeffs: tuple[int, ...]
    allow_content: bool = False

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise DomainError("polynomial must have degree >= 1")
        if not self.allow_content and math.gcd(*c) != 1:
            raise DomainError(f"content {math.gcd(*c)} > 1; pass allow_content=True to accept it")

    @classmethod
    def from_high(cls, coeffs: Sequence[int], allow_content: bool = False) -> MinimalPolynomial:
        """Build from the highest-degree coefficient first (``[1, 0, -2]`` is x^2 - 2)."""
        return cls(tuple(reversed([int(a) for a in coeffs])), allow_content)

    @classmethod
    def hecke(cls, lambda_p: int, p: int, k: int) -> MinimalPolynomial:
        """T^2 - lambda(p) T + p^(k-1)."""
        return cls((p ** (k - 1), -lambda_p, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0 * x
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def as_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coeffs)), _X, domain="ZZ")


# -- Mahler height ---------------------------------------------------------

def _smith_moduli(coeffs_high: list[int], bits: int):
    """Certified modulus intervals for the roots of a squarefree polynomial.

    Approximate roots come from mpmath's Durand-Kerner; Smith's theorem
    (disks of radius d |f(z_i)| / |a_d prod_{j!=i} (z_i - z_j)|, each
    connected cluster of m disks holds exactly m roots) turns them into
    inclusions, evaluated in interval arithmetic.
    Returns a list of (lo, hi, multiplicity) ivmpf bounds per cluster.
    """
    d = len(coeffs_high) - 1
    ctx = mp_ctx(bits + 24)
    iv = iv_ctx(bits + 24)
    try:
        zs = ctx.polyroots(coeffs_high, maxsteps=200, extraprec=2 * bits)
    except ctx.NoConvergence as exc:
        raise PrecisionError(f"root finder did not converge at {bits} bits") from exc
    zs = [ctx.mpc(z) for z in zs]
    izs = [iv.mpc(iv.mpf(z.real), iv.mpf(z.imag)) for z in zs]
    radii = []
    for i, zi in enumerate(izs):
        val = iv.mpf(0)
        for a in coeffs_high:
            val = val * zi + a
        den = iv.mpf(coeffs_high[0])
        for j, zj in enumerate(izs):
            if j != i:
                den = den * (zi - zj)
        if abs(den).a <= 0:
            raise PrecisionError("coincident root approximations")
        radii.append((d * abs(val / den)).b)

    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if abs(izs[i] - izs[j]).a <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    clusters: dict[int, list[int]] = {}
    for i in range(d):
        clusters.setdefault(find(i), []).append(i)
    out = []
    for members in clusters.values():
        lo = min((abs(izs[i]) - radii[i]).a for i in members)
        hi = max((abs(izs[i]) + radii[i]).b for i in members)
        out.append((iv.mpf(lo), iv.mpf(hi), len(members)))
    return out


def mahler_height(f: MinimalPolynomial, precision_bits: int = DEFAULT_PRECISION_BITS):
    """|a_d| prod max(1, |alpha_i|) as a certified mpmath interval (``.a``, ``.b``).

    Repeated factors are split off first so every root cluster is simple.
    """
    iv = iv_ctx(precision_bits + 24)
    content, factors = f.as_sympy().sqf_list()
    lo = hi = iv.mpf(abs(int(content)))
    for g, e in factors:
        gc = [int(a) for a in g.all_coeffs()]
        glo = ghi = iv.mpf(abs(gc[0]))
        if len(gc) > 1:
            for rlo, rhi, m in _smith_moduli(gc, precision_bits):
                glo *= iv.mpf(max(1, rlo.a)) ** m
                ghi *= iv.mpf(max(1, rhi.b)) ** m
        lo *= glo**e
        hi *= ghi**e
    out = iv.mpf([lo.a, hi.b])
    if out.b > out.a * (1 + iv.mpf(2) ** (-(precision_bits // 2))):
        raise PrecisionError(f"height interval too wide at {precision_bits} bits")
    return out


def liouville_constant(f: MinimalPolynomial, precision_bits: int = DEFAULT_PRECISION_BITS):
    """Certified lower endpoint of 2^(1-d) / H(alpha)."""
    if f.degree < 2:
        raise DomainError("Liouville constant needs degree >= 2 (rational alpha excluded)")
    iv = iv_ctx(precision_bits + 24)
    h = mahler_height(f, precision_bits)
    return (iv.mpf(2) ** (1 - f.degree) / h).a


def integer_form(f: MinimalPolynomial, r: RationalApprox) -> int:
    """q^d f(p/q) as an exact integer."""
    p, q, d = r.numerator, r.denominator, f.degree
    val = sum(a * p**i * q ** (d - i) for i, a in enumerate(f.coeffs))
    if val == 0:
        raise ZeroFormError(f"{r} is a root of the polynomial")
    return val


def real_root_intervals(f: MinimalPolynomial, width: Fraction | None = None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational isolating intervals of the distinct real roots, ascending."""
    return list(_isolate(f.coeffs, width))


@lru_cache(maxsize=4096)
def _isolate(coeffs: tuple[int, ...], width: Fraction | None) -> tuple[tuple[Fraction, Fraction], ...]:
    kw = {"eps": width} if width is not None else {}
    poly = sympy.Poly(list(reversed(coeffs)), _X, domain="ZZ")
    return tuple((Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)))
                 for (a, b), _mult in poly.intervals(**kw))


@dataclass(frozen=True)
class LiouvilleReport:
    root_interval: tuple[Fraction, Fraction]
    r: RationalApprox
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    form_value: int
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "r": str(self.r),
            "height": self.r.height,
            "lhs": mpmath.nstr(self.lhs, 20),
            "rhs": mpmath.nstr(self.rhs, 20),
            "integer_form": str(self.form_value),
            "satisfied": self.satisfied,
        }


def liouville_check(f: MinimalPolynomial, root_index: int, r: RationalApprox,
                    precision_bits: int = DEFAULT_PRECISION_BITS,
                    height=None) -> LiouvilleReport:
    """Certify |alpha - r| >= 2^(1-d) H(alpha)^(-1) / H(r)^d for the
    ``root_index``-th real root alpha of f (ascending order).

    ``satisfied`` False is a definite violation of a theorem and means a bug.
    Pass a precomputed ``height`` interval to skip root finding.
    """
    if f.degree < 1:
        raise DomainError("degree must be >= 1")
    form_value = integer_form(f, r)
    roots = real_root_intervals(f, Fraction(1, 2**precision_bits))
    if not 0 <= root_index < len(roots):
        raise DomainError(f"polynomial has {len(roots)} real roots, no index {root_index}")
    lo, hi = roots[root_index]
    x = r.fraction
    if lo <= x <= hi:
        raise PrecisionError(f"{r} not separated from the root at {precision_bits} bits")
    gap_lo = min(abs(x - lo), abs(x - hi))
    gap_hi = max(abs(x - lo), abs(x - hi))
    iv = iv_ctx(precision_bits + 24)
    h = height if height is not None else mahler_height(f, precision_bits)
    rhs = iv.mpf(2) ** (1 - f.degree) / (h * iv.mpf(r.height) ** f.degree)
    lhs = iv.mpf(gap_lo.numerator) / gap_lo.denominator
    lhs_hi = iv.mpf(gap_hi.numerator) / gap_hi.denominator
    if lhs.a >= rhs.b:
        ok = True
    elif lhs_hi.b < rhs.a:
        ok = False
    else:
        raise PrecisionError("Liouville comparison undecided; raise precision_bits")
    ctx = mp_ctx(precision_bits)
    return LiouvilleReport((lo, hi), r, ctx.mpf(lhs.mid), ctx.mpf(rhs.mid), form_value, ok)


# -- continued fractions ---------------------------------------------------

@dataclass(frozen=True)
class QuadraticSurd:
    """(a + b sqrt(D)) / c with D > 0 not a square."""

    a: int
    b: int
    D: int
    c: int

    def __post_init__(self):
        if self.c == 0 or self.b == 0:
            raise DomainError("need b != 0 and c != 0")
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise DomainError(f"D = {self.D} must be a positive non-square")

    def to_mpf(self, bits: int = DEFAULT_PRECISION_BITS):
        ctx = mp_ctx(bits)
        return (self.a + self.b * ctx.sqrt(self.D)) / self.c


SQRT2 = QuadraticSurd(0, 1, 2, 1)
GOLDEN_RATIO = QuadraticSurd(1, 1, 5, 2)


@dataclass(frozen=True)
class ConvergentSeq:
    partial_quotients: tuple[int, ...]
    convergents: tuple[RationalApprox, ...]


def _surd_quotients(x: QuadraticSurd, count: int) -> list[int]:
    # normalize to (P + sqrt(E)) / Q with Q | E - P^2
    P, Q, E = (x.a, x.c, x.b * x.b * x.D) if x.b > 0 else (-x.a, -x.c, x.b * x.b * x.D)
    P, Q, E = P * abs(Q), Q * abs(Q), E * Q * Q
    s = math.isqrt(E)
    out = []
    while len(out) < count:
        if Q > 0:
            a = (P + s) // Q
        else:
            a = (-P - s - 1) // (-Q)
        out.append(a)
        P = a * Q - P
        Q = (E - P * P) // Q
    return out


def _rational_quotients(x: Fraction, count: int) -> list[int]:
    out = []
    while len(out) < count:
        a = math.floor(x)
        out.append(a)
        if x == a:
            break
        x = 1 / (x - a)
    return out


def _interval_quotients(lo: Fraction, hi: Fraction, count: int) -> list[int]:
    out = []
    while len(out) < count:
        a, b = math.floor(lo), math.floor(hi)
        if a != b or lo == a or hi == b:
            raise PrecisionError(f"precision exhausted after {len(out)} partial quotients")
        out.append(a)
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return out


def _fold(quotients: list[int]) -> ConvergentSeq:
    p0, q0, p1, q1 = 1, 0, quotients[0], 1
    convs = [RationalApprox(p1, q1)]
    for a in quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        convs.append(RationalApprox(p1, q1))
    return ConvergentSeq(tuple(quotients), tuple(convs))


def convergents_of(x, count: int) -> ConvergentSeq:
    """First ``count`` convergents of x.

    x may be a QuadraticSurd (exact), an int/Fraction (terminates early at
    its exact value) or an mpmath mpf, read as an interval of half-ulp
    radius; quotients are emitted only while both ends agree.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if isinstance(x, QuadraticSurd):
        return _fold(_surd_quotients(x, count))
    if isinstance(x, (int, Fraction)):
        return _fold(_rational_quotients(Fraction(x), count))
    if isinstance(x, mpmath.mpf) or hasattr(x, "_mpf_"):
        man, exp = mpmath.mpf(x).man_exp
        mid = Fraction(int(man)) * Fraction(2) ** int(exp)
        bits = max(int(man).bit_length(), 1)
        rad = abs(mid) * Fraction(1, 2**bits) if mid else Fraction(1, 2**bits)
        return _fold(_interval_quotients(mid - rad, mid + rad, count))
    raise DomainError(f"unsupported input type {type(x).__name__}")


def root_convergents(f: MinimalPolynomial, root_index: int, count: int, bits: int) -> list[RationalApprox]:
    """Convergents of an irrational real root, as many as ``bits`` of isolation allow."""
    lo, hi = real_root_intervals(f, Fraction(1, 2**bits))[root_index]
    quotients: list[int] = []
    while len(quotients) < count:
        try:
            quotients = _interval_quotients(lo, hi, len(quotients) + 1)
        except PrecisionError:
            break
    return list(_fold(quotients).convergents) if quotients else []

# -- the unimodular gap ----------------------------------------------------

def corollary_gap(pp: PrimePower, k: int, precision_bits: int = DEFAULT_PRECISION_BITS):
    """log of 1 / (8 p^(n + 2k - 2))."""
    if k < 4 or pp.m < 1:
        raise DomainError("needs k >= 4 and n >= 1")
    ctx = mp_ctx(precision_bits)
    return -ctx.log(8) - (pp.m + 2 * k - 2) * ctx.log(pp.p)

@dataclass(frozen=True)
class GapReport:
    p: int
    m: int
    k: int
    gap: mpmath.mpf
    threshold: mpmath.mpf
    satisfied: bool
    degenerate: bool

    @property
    def margin(self):
        """log(gap / threshold); -inf when the gap vanishes."""
        ctx = mp_ctx(64)
        if not self.gap:
            return ctx.ninf
        return ctx.log(self.gap) - ctx.log(self.threshold)

    def to_dict(self) -> dict:
        return {
            "p": self.p, "m": self.m, "k": self.k,
            "gap": mpmath.nstr(self.gap, 20),
            "threshold": mpmath.nstr(self.threshold, 10),
            "satisfied": self.satisfied,
            "degenerate": self.degenerate,
        }

def unimodular_gap_check(angle: FrobeniusAngle, m: int, k: int | None = None) -> GapReport:
    """Compare |beta - 1| = 2 |sin((m+1) theta)| with 1 / (8 p^(m + 2k - 2)).

    A gap below the working precision's resolution is reported as 0 with
    ``degenerate`` set; it never counts as satisfied.
    """
    k = angle.k if k is None else k
    if m < 0:
        raise DomainError("m must be >= 0")
    if angle.degenerate:
        raise DegenerateAngleError(f"theta_{angle.p} is 0 or pi")
    bits = angle.precision_bits
    ctx = mp_ctx(bits + 16)
    gap = 2 * abs(ctx.sin((m + 1) * ctx.mpf(angle.theta)))
    threshold = 1 / (8 * ctx.mpf(angle.p) ** (m + 2 * k - 2))
    resolution = ctx.ldexp(m + 2, -bits + 4)
    if gap <= resolution:
        return GapReport(angle.p, m, k, ctx.mpf(0), threshold, False, True)
    if gap - resolution > threshold:
        ok = True
    elif gap + resolution < threshold:
        ok = False
    else:
        raise PrecisionError("gap too close to threshold at this precision")
    return GapReport(angle.p, m, k, gap, threshold, ok, False)

def gap_via_exponential(angle: FrobeniusAngle, m: int):
    """|e^(2i(m+1)theta) - 1| by complex arithmetic, an independent path to the gap."""
    ctx = mp_ctx(angle.precision_bits + 16)
    return abs(ctx.expj(2 * (m + 1) * ctx.mpf(angle.theta)) - 1)

def gap_squared_exact(lambda_p: int, lambda_pm: int, p: int, m: int, k: int) -> Fraction:
    """(2 sin((m+1) theta))^2 as a rational number, from integer coefficients.

    Uses sin((m+1) theta) = lambda(p^m) sin(theta) / p^((k-1)m/2) and
    sin^2 theta = 1 - lambda(p)^2 / (4 p^(k-1)).
    """
    return Fraction(lambda_pm**2 * (4 * p ** (k - 1) - lambda_p**2), p ** ((k - 1) * (m + 1)))

def threshold_squared_exact(p: int, m: int, k: int) -> Fraction:
    return Fraction(1, 64 * p ** (2 * (m + 2 * k - 2)))
