"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ModCoeffError(Exception):
    """Base class; the CLI maps any subclass to a structured error and exit code."""


class DomainError(ModCoeffError, ValueError):
    pass


class EmptyRangeError(DomainError):
    pass


class ResourceError(ModCoeffError):
    """A configured cap (table size, point-counting prime, factoring budget) was exceeded."""


class BadReductionError(DomainError):
    pass


class DeligneViolationError(DomainError):
    """|lambda(p)| exceeds 2 p^((k-1)/2): the supplied data cannot come from a normalized eigenform."""


class DegenerateAngleError(DomainError):
    pass


class UnsupportedWeightError(DomainError):
    pass


class PrecisionError(ModCoeffError):
    """Working precision was not enough to certify a result; retry with more bits."""


class ZeroFormError(DomainError):
    pass


class HypothesisError(DomainError):
    pass


class RangeError(DomainError):
    pass


class InvariantViolation(ModCoeffError, AssertionError):
    """A proven inequality failed; this points at an implementation bug, not at the mathematics."""
