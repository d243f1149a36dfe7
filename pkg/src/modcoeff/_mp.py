"""Thread-local mpmath contexts, one per precision.

Contexts are never re-precisioned after creation, so a cached context
behaves like a fresh one while avoiding the setup cost in hot loops.
"""

from __future__ import annotations

import threading

import mpmath
from mpmath.ctx_iv import MPIntervalContext

_local = threading.local()


def mp_ctx(bits: int) -> mpmath.ctx_mp.MPContext:
    cache = _local.__dict__.setdefault("mp", {})
    ctx = cache.get(bits)
    if ctx is None:
        ctx = cache[bits] = mpmath.MPContext()
        ctx.prec = bits
    return ctx


def iv_ctx(bits: int) -> MPIntervalContext:
    cache = _local.__dict__.setdefault("iv", {})
    ctx = cache.get(bits)
    if ctx is None:
        ctx = cache[bits] = MPIntervalContext()
        ctx.prec = bits
    return ctx
