import math

import mpmath
import numpy as np
import pytest
from oracles import slow_C_oracle

from primverify.constants import (
    C_REFERENCE_DIGITS, ConvergenceBudgetExceeded, compute_C, dusart_array, dusart_pn_lower,
    epsilon0_bound, erdos_constant_C, f_prime_interval, log_zeta_integral, moebius,
    race_density_bound, race_density_interval, twin_prime_constants)
from primverify.interval import Interval
from primverify.primes import primes_array
from primverify.scan import zhang_terms
from primverify.zeta import (ZetaDomainError, bernoulli, bracket_panel, gauss_rules, log_zeta_cut, zeta_em,
                             zeta_real)


def contains_mp(I: Interval, v) -> bool:
    return mpmath.mpf(I.lo) <= v <= mpmath.mpf(I.hi)


# zeta -----------------------------------------------------------------------------


def test_bernoulli():
    from fractions import Fraction
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(12) == Fraction(-691, 2730)


@pytest.mark.parametrize("s", [1.000001, 1.01, 1.5, 2.0, 3.7, 4.0, 12.0, 40.0])
def test_zeta_real_against_mpmath(s):
    with mpmath.workdps(40):
        assert contains_mp(zeta_real(s).value, mpmath.zeta(mpmath.mpf(s)))


def test_zeta_closed_forms():
    assert contains_mp(zeta_real(2.0).value, mpmath.pi ** 2 / 6)
    assert contains_mp(zeta_real(4.0).value, mpmath.pi ** 4 / 90)
    assert zeta_real(2.0).value.width < 1e-13


def test_zeta_1_1_against_direct_summation():
    M = 10**7
    n = np.arange(1, M + 1, dtype=np.float64)
    head = math.fsum((n ** -1.1).tolist())
    # each term carries < 2 ulp relative error; fsum is exact on the rounded terms
    err = 2 * 2.0**-52 * head
    s = 1.1
    tail_lo = (M + 1) ** (1 - s) / (s - 1)
    tail_hi = M ** (1 - s) / (s - 1)
    oracle = Interval(head - err + tail_lo, head + err + tail_hi)
    assert zeta_real(1.1).value.intersects(oracle)


def test_zeta_domain():
    with pytest.raises(ZetaDomainError):
        zeta_real(1.0)
    with pytest.raises(ZetaDomainError):
        zeta_em(Interval(0.0, 0.1))


def test_log_zeta_cut_matches_mpmath():
    with mpmath.workdps(40):
        for x in (1e-6, 0.3, 2.0, 9.5):
            v = mpmath.log(mpmath.zeta(1 + mpmath.mpf(x)))
            v += mpmath.fsum(mpmath.log(1 - mpmath.mpf(p) ** (-1 - mpmath.mpf(x)))
                             for p in primes_array(100).tolist())
            assert contains_mp(log_zeta_cut(Interval.point(x), 100), v)


def test_gauss_rules_integrate_polynomials():
    gl, lob = gauss_rules(12)
    assert len(gl) == len(lob) == 12
    for rule in (gl, lob):
        total = Interval(0.0, 0.0)
        m4 = Interval(0.0, 0.0)
        for t, w in rule:
            total = total + w
            m4 = m4 + w * t ** 4
        assert total.contains(2)  # integral of 1 over [-1, 1]
        assert m4.contains(mpmath.mpf(2) / 5)


def test_bracket_panel_orders_completely_monotone_integrand():
    f = lambda x: Interval(1.0, 1.0) / (x + 1.0)  # noqa: E731
    lo, hi = bracket_panel(f, 0.0, 1.0)
    assert lo.hi <= hi.hi and lo.lo <= math.log(2) <= hi.hi


# C ----------------------------------------------------------------------------------


def test_C_enclosure_properties(C):
    assert C.value.width < 1e-9
    assert C.value.hi < 1.637
    assert 1.6366163 < C.value.lo


@pytest.mark.slow
def test_C_against_slow_oracle(C):
    oracle = slow_C_oracle()
    assert abs(mpmath.mpf(C.value.mid) - oracle) < 1e-8
    # the oracle is far more accurate than 1e-8 in practice
    assert abs(mpmath.mpf(C.value.mid) - oracle) < 1e-12


def test_C_reference_literal_consistency(C):
    """The 11-digit literal agrees with the enclosure to within one unit of its last place."""
    ref = float(C_REFERENCE_DIGITS)
    assert abs(C.value.mid - ref) < 1e-11


def test_C_partial_sums(C):
    ps = primes_array(10**7)
    t = zhang_terms(ps)
    incl = t.exclusive_prefix() + t
    # sum_{p<=y} f(p) < C for every y (strongest at the end)
    assert incl[len(ps) - 1].hi < C.value.lo
    assert t.fsum().hi < C.value.lo
    # C < sum_{p<=y} f(p) + 2/log y for y in [p_j, p_{j+1}); worst at y -> p_{j+1}
    nxt = np.append(ps[1:], 10_000_019)
    from primverify.interval import IntervalArray
    env = incl + IntervalArray.from_ints(nxt).log().reciprocal() * 2.0
    assert np.all(C.value.hi < env.lo)


def test_C_nested_under_coarser_settings(C):
    coarse = compute_C(K=4, tol=1e-10)
    assert coarse.value.lo <= C.value.lo + 1e-12 and C.value.hi <= coarse.value.hi + 1e-12
    assert coarse.value.intersects(C.value)


def test_C_budget_error(monkeypatch):
    from primverify import constants
    monkeypatch.setattr(constants, "_C_CACHE", {})
    with pytest.raises(ConvergenceBudgetExceeded):
        erdos_constant_C(max_width=1e-16)


def test_log_zeta_integral_positive():
    J2 = log_zeta_integral(2)
    assert 3.4e-4 < J2.lo < J2.hi < 3.5e-4


def test_moebius():
    assert [moebius(k) for k in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_f_prime():
    assert f_prime_interval(2).lo > 0.7213 and f_prime_interval(2).hi < 0.7214


# Dusart and epsilon0 -------------------------------------------------------------------


def test_dusart_examples():
    assert dusart_pn_lower(10**8) < 2_038_074_743
    assert dusart_pn_lower(100) < 541
    assert dusart_pn_lower(2) < 3
    with pytest.raises(ValueError):
        dusart_pn_lower(1)


def test_dusart_below_pn_up_to_1e6():
    ps = primes_array(16_000_000)[: 10**6]
    d = dusart_array(np.arange(2, 10**6 + 1, dtype=np.int64))
    assert np.all(d.hi < ps[1:])


def test_epsilon0():
    b = epsilon0_bound()
    assert b.bound.hi < 2.37e-7
    assert b.bound.lo >= 0
    with mpmath.workdps(30):
        def phi(u):
            x = mpmath.exp(u)
            L = mpmath.log(x)
            LL = mpmath.log(L)
            d = x * (L + LL - 1 + (LL - mpmath.mpf("2.1")) / L)
            return x / (5 * d * mpmath.log(d) ** 4)
        exact = mpmath.quad(phi, [mpmath.log(10**8), 30, 100, 600, mpmath.inf])
    assert contains_mp(b.bound, exact)


def test_epsilon0_larger_tail():
    assert epsilon0_bound(10**6).bound.hi > epsilon0_bound().bound.hi


# twin primes and race density ----------------------------------------------------------


def test_twin_prime_constants():
    c2, c2p = twin_prime_constants()
    assert 1.3203 <= c2.lo and c2.hi < 1.3204
    assert (c2 * c2p).contains(2.0)
    coarse, coarse_p = twin_prime_constants(10**3)
    assert coarse.contains(c2) and coarse_p.contains(c2p)
    assert contains_mp(c2, 2 * mpmath.twinprime)


def test_race_density():
    eps, bound = race_density_bound(0.00000026)
    assert bound < 4.2e-3 and abs(bound - 4.08e-3) < 1e-5
    assert race_density_bound(1 / 64) == (1 / 32, 1.0)
    assert race_density_bound(4e-6)[1] == pytest.approx(0.016, rel=1e-15)
    e_iv, b_iv = race_density_interval(0.00000026)
    assert b_iv.hi < 4.2e-3 and e_iv.contains(eps)
    with pytest.raises(ValueError):
        race_density_bound(0.0)
