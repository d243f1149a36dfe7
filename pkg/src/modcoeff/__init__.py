"""Exact modular-form coefficients and numeric checks of their size bounds."""

__version__ = "0.1.0"

from .coeff_engine import (  # noqa: E402
    CoeffTable,
    FormKind,
    FormSpec,
    FrobeniusAngle,
    PrimePower,
    binet_eval,
    coeff_at,
    ec_trace,
    frobenius_angle,
    hecke_prime_power,
    tau_series,
)

__all__ = [
    "CoeffTable", "FormKind", "FormSpec", "FrobeniusAngle", "PrimePower",
    "binet_eval", "coeff_at", "ec_trace", "frobenius_angle", "hecke_prime_power",
    "tau_series", "__version__",
]
