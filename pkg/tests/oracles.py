"""Slow, independent reference computations used only by the tests."""

from __future__ import annotations

import math

import mpmath
import sympy


def tau_naive(N: int) -> list[int]:
    """tau(1..N) from q * prod_{n>=1} (1 - q^n)^24, by plain list convolution."""
    series = [1] + [0] * (N - 1)  # coefficients of q^0 .. q^(N-1)
    for n in range(1, N):
        for _ in range(24):
            for i in range(N - 1, n - 1, -1):
                series[i] -= series[i - n]
    return series  # series[i] is the coefficient of q^(i+1) in Delta


def ec_trace_brute(a: int, b: int, p: int) -> int:
    """p + 1 - #E(F_p) by enumerating every (x, y)."""
    affine = sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - a * x - b) % p == 0)
    return p + 1 - (affine + 1)


def angle_oracle(lam: int, p: int, k: int, dps: int = 50):
    with mpmath.workdps(dps):
        return mpmath.acos(mpmath.mpf(lam) / (2 * mpmath.sqrt(mpmath.mpf(p) ** (k - 1))))


def mertens_oracle(x: int) -> float:
    """prod_{p<=x} (1 - 1/p)^(-1) / (e^gamma log x) in double precision via sympy primes."""
    s = math.fsum(-math.log1p(-1.0 / p) for p in sympy.primerange(2, x + 1))
    return math.exp(s) / (math.exp(float(mpmath.euler)) * math.log(x))


def sato_tate_fraction(primes, k: int, dps: int = 30) -> float:
    """Expected fraction of p with |2 cos theta| >= t_p under the measure (2/pi) sin^2 theta.

    t_p = loglog p / sqrt(log p); P(|2cos theta| >= t) = 1 - F(t), where the
    mass of |cos theta| < t/2 is (2/pi)(asin(u) + u sqrt(1 - u^2)), u = t/2.
    """
    total = 0.0
    n = 0
    for p in primes:
        p = int(p)
        if p == 2:
            total += 1.0
        else:
            t = math.log(math.log(p)) / math.sqrt(math.log(p))
            u = min(max(t / 2, 0.0), 1.0)
            inside = (2 / math.pi) * (math.asin(u) + u * math.sqrt(1 - u * u))
            total += 1.0 - inside
        n += 1
    return total / n
