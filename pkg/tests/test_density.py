from __future__ import annotations

import math
from itertools import product

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from modcoeff.arith import primes_up_to
from modcoeff.coeff_engine import FormSpec, tau_series
from modcoeff.density import (
    PrimeClassification,
    ThresholdKind,
    chi_f,
    classify_primes,
    constant_crosscheck,
    count_Nf,
    density_report,
    divisor_count,
    harmonic_sum,
    hr_bounds_check,
    mertens_product,
    multiplicative_table,
    omega,
    omega_ratio,
    p_adic_val,
    radical,
    wirsing_eval,
)
from modcoeff.errors import DomainError, HypothesisError, RangeError

from oracles import mertens_oracle, sato_tate_fraction

DELTA = FormSpec.delta()


@pytest.fixture(scope="module")
def gt_1e5():
    return classify_primes(DELTA, 10**5, ThresholdKind.GT_LOWER_BOUND)


# -- arithmetic suite --------------------------------------------------------

def test_arithmetic_examples():
    assert divisor_count(10**6) == 49
    assert (radical(12), omega(12), p_adic_val(2, 12)) == (6, 2, 2)
    assert (divisor_count(1), omega(1), radical(1)) == (1, 0, 1)
    with pytest.raises(DomainError):
        p_adic_val(4, 16)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**9))
def test_arithmetic_against_sympy(n):
    fac = sympy.factorint(n)
    assert divisor_count(n) == sympy.divisor_count(n)
    assert omega(n) == len(fac)
    assert radical(n) == math.prod(fac)
    for p, e in fac.items():
        assert p_adic_val(p, n) == e


# -- classification ----------------------------------------------------------

def test_delta_nonvanishing_all_members():
    cls = classify_primes(DELTA, 10**5, "nonvanishing")
    assert cls.count == len(primes_up_to(10**5))
    assert cls.bad_primes == ()


def test_gt_classification_against_float_rule(gt_1e5):
    t = tau_series(10**5)
    assert gt_1e5.member(2)
    for p in primes_up_to(2000):
        p = int(p)
        if p == 2:
            continue
        lp = math.log(p)
        thr = p**5.5 * math.log(lp) / math.sqrt(lp)
        if abs(abs(t[p]) - thr) > 1e-9 * thr:
            assert gt_1e5.member(p) == (abs(t[p]) >= thr)


def test_gt_fraction_against_sato_tate(gt_1e5):
    expected = sato_tate_fraction(gt_1e5.primes, 12)
    assert 0.4 <= gt_1e5.fraction <= 0.8
    assert abs(gt_1e5.fraction - expected) < 0.05


def test_ec_bad_primes_not_members():
    cls = classify_primes(FormSpec.elliptic_curve(0, 1), 200, "nonvanishing")
    assert cls.bad_primes == (2, 3)
    assert not cls.member(2) and not cls.member(3)
    assert not cls.member(5)  # a_5 = 0 for y^2 = x^3 + 1


# -- chi_f and N_f -----------------------------------------------------------

def test_chi_f_examples():
    cls = PrimeClassification.from_members([2, 5], 100)
    assert chi_f(1, cls) == 1
    assert chi_f(2**6, cls) == 1
    assert chi_f(10, cls) == 1
    assert chi_f(15, cls) == 0
    with pytest.raises(RangeError):
        chi_f(101, cls)


def test_chi_f_completely_multiplicative(gt_1e5):
    for m, n in product(range(1, 120), repeat=2):
        assert chi_f(m * n, gt_1e5) == chi_f(m, gt_1e5) * chi_f(n, gt_1e5)


def test_count_nf_examples():
    x = 1000
    every = PrimeClassification.from_members(primes_up_to(x), x)
    none = PrimeClassification.from_members([], x)
    two = PrimeClassification.from_members([2], 10)
    assert count_Nf(every, x) == x
    assert count_Nf(none, x) == 1
    assert count_Nf(two, 10) == 4


def test_count_nf_brute_force(gt_1e5):
    x = 3000
    assert count_Nf(gt_1e5, x) == sum(chi_f(n, gt_1e5) for n in range(1, x + 1))


# -- Mertens, harmonic sum, constants ----------------------------------------

def test_mertens_small_and_empty():
    assert mertens_product(None, 10).lhs == mpmath.mpf(4.375)
    empty = mertens_product([], 100)
    assert empty.lhs == 1 and empty.rhs == 1 and empty.tau == 0
    assert harmonic_sum([], 100).lhs == 0
    with mpmath.workdps(50):
        assert abs(harmonic_sum(None, 3).lhs - mpmath.mpf(5) / 6) < mpmath.mpf(10) ** -35
    with pytest.raises(DomainError):
        harmonic_sum(None, 2)


def test_mertens_at_1e6_against_oracle():
    c = mertens_product(None, 10**6)
    assert 0.99 <= c.ratio <= 1.01
    assert abs(float(c.ratio) - mertens_oracle(10**6)) < 1e-9


def test_mertens_converges_monotonically():
    dist = [abs(mertens_product(None, 10**e).ratio - 1) for e in range(3, 7)]
    assert all(b <= a + 0.005 for a, b in zip(dist, dist[1:]))


def test_harmonic_difference_shrinks():
    d4 = abs(harmonic_sum(None, 10**4).diff)
    d6 = abs(harmonic_sum(None, 10**6).diff)
    assert d6 < d4 and d6 < 0.01
    oracle = math.fsum(1 / p for p in sympy.primerange(2, 10**6 + 1))
    assert abs(float(harmonic_sum(None, 10**6).lhs) - oracle) < 1e-10


def test_constant_literals_against_limits():
    cc = constant_crosscheck(10**6)
    assert abs(cc["gamma_limit"] - cc["gamma_literal"]) < 1e-2
    assert abs(cc["b_limit"] - cc["b_literal"]) < 1e-2
    with mpmath.workdps(60):
        assert abs(cc["gamma_literal"] - mpmath.euler) < mpmath.mpf(10) ** -30


# -- Wirsing -----------------------------------------------------------------

def test_multiplicative_table_brute_force():
    def f(p, k):
        return (p % 3) + k

    t = multiplicative_table(f, 500)
    for n in range(1, 501):
        assert t[n] == math.prod(f(p, k) for p, k in sympy.factorint(n).items())


def test_wirsing_constant_function():
    c = wirsing_eval(lambda p, k: 1.0, 10**6, 1.0)
    assert c.lhs == 10**6
    assert 0.98 <= c.rhs / c.lhs <= 1.02


def test_wirsing_all_member_chi_matches_one():
    x = 10**4
    members = set(int(p) for p in primes_up_to(x))
    a = wirsing_eval(lambda p, k: 1.0, x, 1.0)
    b = wirsing_eval(lambda p, k: 1.0 if p in members else 0.0, x, 1.0)
    assert a.lhs == b.lhs and abs(a.rhs - b.rhs) < mpmath.mpf(10) ** -25 * a.rhs


def test_wirsing_half_density_uses_sqrt_pi():
    x = 10**5
    c = wirsing_eval(lambda p, k: 1.0 if p % 4 == 1 else 0.0, x, 0.5)
    ps = [p for p in sympy.primerange(2, x + 1) if p % 4 == 1]
    euler = math.exp(math.fsum(-math.log1p(-1 / p) for p in ps))
    expected = x / math.log(x) * euler / (math.exp(0.5 * float(mpmath.euler)) * math.sqrt(math.pi))
    assert abs(float(c.rhs) / expected - 1) < 1e-9
    assert 0.9 < c.rhs / c.lhs < 1.1


def test_wirsing_hypothesis_errors():
    with pytest.raises(HypothesisError):
        wirsing_eval(lambda p, k: 2.0**k, 100, 1.0)
    with pytest.raises(HypothesisError):
        wirsing_eval(lambda p, k: -1.0, 100, 1.0)
    with pytest.raises(DomainError):
        wirsing_eval(lambda p, k: 1.0, 100, 0.0)


# -- omega ratio and report --------------------------------------------------

def test_omega_ratio():
    rep = hr_bounds_check(10**5)
    assert math.isfinite(rep["max_ratio"])
    brute = max(omega(n) * math.log(math.log(n)) / math.log(n) for n in range(3, 10**4 + 1))
    assert abs(hr_bounds_check(10**4)["max_ratio"] - brute) < 1e-12
    assert omega(30030) == 6
    assert abs(omega_ratio(30030) - 6 * math.log(math.log(30030)) / math.log(30030)) < 1e-15
    assert omega_ratio(101) < 0.5


def test_density_report_invariants(gt_1e5):
    rep = density_report(gt_1e5, 10**4)
    assert 0 <= rep.count_Pf <= rep.pi_x == 1229
    assert rep.Nf_count == count_Nf(gt_1e5, 10**4)
    assert rep.tau_assumed == 1.0
    assert abs(rep.tau_empirical - rep.count_Pf / rep.pi_x) < 1e-15
    d = rep.to_dict()
    assert d["x"] == 10**4 and set(d["ratios"]) == {"Pf_over_pi", "Nf_over_x", "mertens", "wirsing"}
    full = density_report(None, 10**4)
    assert full.Nf_count == 10**4 and full.count_Pf == 1229
