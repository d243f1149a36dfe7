"""Fixed 50-digit literals; every report echoes them with their source."""

EULER_GAMMA = "0.57721566490153286060651209008240243104215933593992"
MERTENS_B = "0.26149721284764278375542683860869585905156664826120"

PROVENANCE = {
    "euler_gamma": {"value": EULER_GAMMA, "source": "OEIS A001620, 50 significant digits"},
    "mertens_b": {"value": MERTENS_B, "source": "OEIS A077761, 50 significant digits"},
}
