"""Integer arithmetic: primality, factorization, sieves and the small
multiplicative functions (d, omega, rad, v_p)."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError

# Deterministic for n < 3317044064679887385961981 (first 13 prime bases).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_DETERMINISTIC_LIMIT = 3317044064679887385961981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

DEFAULT_FACTOR_BUDGET = 2_000_000


def is_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set.

    Exact below ``MR_DETERMINISTIC_LIMIT``; above it we defer to sympy's
    BPSW test, which has no known counterexample.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n >= MR_DETERMINISTIC_LIMIT:
        from sympy import isprime

        return bool(isprime(n))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, budget: list[int]) -> int:
    # budget is a one-element list so the caller sees iterations consumed
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            budget[0] -= r
            if budget[0] <= 0:
                raise ResourceError(f"factorization budget exhausted for {n}")
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ResourceError(f"Pollard rho failed to split {n}")


def factorize(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> dict[int, int]:
    """Prime factorization ``{p: v}`` of ``n >= 1`` (sorted by p).

    Raises ResourceError when Pollard-Brent needs more than ``budget``
    iterations, the stand-in for a wall-clock timeout.
    """
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 53
    while n > 1 and p * p <= n and p < 10_000:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2
    left = [budget]
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m, left)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def divisor_count(n: int) -> int:
    return math.prod(v + 1 for v in factorize(n).values())


def omega(n: int) -> int:
    return len(factorize(n))


def radical(n: int) -> int:
    return math.prod(factorize(n))


def p_adic_val(p: int, n: int) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if n == 0:
        raise DomainError("v_p(0) is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_sieve(x: int) -> np.ndarray:
    """Boolean array ``a`` of length x+1 with ``a[n]`` true iff n is prime."""
    a = np.ones(max(x + 1, 2), dtype=bool)
    a[:2] = False
    for p in range(2, math.isqrt(x) + 1):
        if a[p]:
            a[p * p :: p] = False
    return a[: x + 1]


@lru_cache(maxsize=8)
def _primes_cached(x: int) -> np.ndarray:
    arr = np.flatnonzero(prime_sieve(x)).astype(np.int64)
    arr.setflags(write=False)
    return arr


def primes_up_to(x: int) -> np.ndarray:
    return _primes_cached(int(x))


def smallest_prime_factor(x: int) -> np.ndarray:
    spf = np.zeros(x + 1, dtype=np.int64)
    for p in range(2, math.isqrt(x) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(x + 1, dtype=np.int64)
    rest = spf == 0
    spf[rest] = idx[rest]
    spf[:2] = 0
    return spf


def divisor_count_sieve(x: int) -> np.ndarray:
    d = np.zeros(x + 1, dtype=np.int64)
    for i in range(1, x + 1):
        d[i::i] += 1
    return d


def omega_sieve(x: int) -> np.ndarray:
    w = np.zeros(x + 1, dtype=np.int64)
    for p in primes_up_to(x):
        w[p::p] += 1
    return w
