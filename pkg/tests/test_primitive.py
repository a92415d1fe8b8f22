import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primverify.constants import epsilon0_bound
from primverify.interval import Interval, Status
from primverify.primitive import (
    FACTOR_LIMIT, EnumerationBudgetExceeded, FactorizationBudgetExceeded, NotPrimitive, P, PrimitiveSet,
    SupportOutOfRange, brute_force_scan, check_odd_branch, check_odd_theorem, check_partition,
    check_prop_erdos, check_quotient_bound, decompose, evaluate_set, f_set, f_value, factorize, g_exact,
    g_set, h_set, h_value, naive_primitive_count, omega, p, read_set_file, support, two_adic_split,
    validate_primitive)

mpmath.mp.dps = 30


def mp_f(n) -> mpmath.mpf:
    return 1 / (mpmath.mpf(n) * mpmath.log(n))


def is_primitive_naive(A) -> bool:
    return not any(a != b and b % a == 0 for a in A for b in A)


# validation -----------------------------------------------------------------------------


def test_validate_examples():
    assert validate_primitive([2, 3, 5]).members == (2, 3, 5)
    assert validate_primitive([15, 10, 6]).members == (6, 10, 15)
    with pytest.raises(NotPrimitive) as exc:
        validate_primitive([2, 4])
    assert exc.value.witness == (2, 4)
    with pytest.raises(ValueError):
        validate_primitive([1, 3])
    with pytest.raises(ValueError):
        PrimitiveSet((0,))


# f, g, h -----------------------------------------------------------------------------------


def test_f_of_two():
    v = f_set([2])
    assert 0.7213 < v.lo and v.hi < 0.7214
    assert v.contains(mp_f(2))


def test_g_of_two_exact():
    assert g_exact(2) == Fraction(1, 2)
    assert g_set([2]) == Interval(0.5, 0.5)


def test_f_6_10_15():
    v = f_set([6, 10, 15])
    assert v.contains(mp_f(6) + mp_f(10) + mp_f(15))
    assert abs(v.mid - 0.16107) < 1e-5


def test_g_and_h_values():
    # g(a) = (1/a) prod_{p < P(a)} (1 - 1/p)
    assert g_exact(6) == Fraction(1, 6) * Fraction(1, 2)
    assert g_exact(10) == Fraction(1, 10) * Fraction(1, 2) * Fraction(2, 3)
    assert g_exact(9) == Fraction(1, 9) * Fraction(1, 2)
    assert h_value(12).contains(1 / (12 * mpmath.log(3)))
    assert h_set([6, 35]).contains(1 / (6 * mpmath.log(3)) + 1 / (35 * mpmath.log(7)))
    assert f_value(1_000_003).contains(mp_f(1_000_003))


def test_prime_factor_helpers():
    assert (p(12), P(12), omega(12)) == (2, 3, 3)
    assert omega(16) == 4 and omega(24) == 4
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert support([6, 35, 11]) == [2, 3, 5, 7, 11]
    with pytest.raises(ValueError):
        p(1)
    with pytest.raises(FactorizationBudgetExceeded):
        factorize(FACTOR_LIMIT + 1)


# decompositions ---------------------------------------------------------------------------


def test_decompose_example():
    d = decompose([6, 10, 15], 2)
    assert d.A_p_eq == (6, 10) and d.A_pp == (3, 5)
    assert d.A_p == (6, 10, 15)
    d3 = decompose([6, 10, 15], 3)
    assert d3.A_p == (15,) and d3.A_p_eq == (15,) and d3.A_pp == (5,)
    assert is_primitive_naive(d.A_pp) and len(d.A_pp) == len(d.A_p_eq)


def test_two_adic_example():
    s = two_adic_split([12], 2)
    assert s.A_k == (12,) and s.B_k == (3,)
    assert two_adic_split([12], 1).A_k == ()
    with pytest.raises(ValueError):
        two_adic_split([12], 0)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(min_value=2, max_value=400), min_size=1, max_size=12))
def test_two_adic_partitions_evens(values):
    A = sorted(a for a in values if not any(b != a and a % b == 0 for b in values))
    splits = [two_adic_split(A, k) for k in range(1, 10)]
    evens = sorted(a for s in splits for a in s.A_k)
    assert evens == [a for a in A if a % 2 == 0]
    assert all(b % 2 for s in splits for b in s.B_k)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(min_value=2, max_value=10**5), min_size=1, max_size=10))
def test_partition_identity(values):
    A = sorted(a for a in values if not any(b != a and a % b == 0 for b in values))
    assert check_partition(A).status is Status.CERTIFIED
    for q in support(A):
        d = decompose(A, q)
        assert set(d.A_p_eq) <= set(d.A_p)
        assert is_primitive_naive(d.A_pp)


# certificates ---------------------------------------------------------------------------------


def test_prop_erdos_6_10_15():
    g_check, f_check = check_prop_erdos([6, 10, 15], 2)
    assert g_check.status is Status.CERTIFIED
    assert g_check.detail["lhs"] == str(Fraction(1, 12) + Fraction(1, 30))
    assert abs(float(Fraction(1, 12) + Fraction(1, 30)) - 0.1167) < 1e-4
    assert f_check.status is Status.CERTIFIED


def test_prop_erdos_9():
    checks = check_prop_erdos([9], 3)
    f_check = checks[1]
    assert f_check.status is Status.CERTIFIED
    assert f_check.margin.contains(mpmath.exp(mpmath.euler) / 6 - mp_f(9))
    assert abs(float(mp_f(9)) - 0.0506) < 1e-4
    assert abs(math.exp(0.5772156649015329) / 6 - 0.2968) < 1e-4


def test_prop_erdos_other_prime():
    checks = check_prop_erdos([7], 3)
    assert [c.status for c in checks] == [Status.CERTIFIED, Status.CERTIFIED]
    assert len(check_prop_erdos([3], 3)) == 1  # q in A: only the g inequality applies


def test_odd_theorem_examples():
    eq = check_odd_theorem([3, 5, 7])
    assert eq.status is Status.CERTIFIED and eq.margin.lo >= 0
    c = check_odd_theorem([15, 21, 35])
    assert c.status is Status.CERTIFIED
    expected = mp_f(3) + mp_f(5) + mp_f(7) - (mp_f(15) + mp_f(21) + mp_f(35))
    assert c.margin.contains(expected + mpmath.mpf(epsilon0_bound().bound.hi))
    with pytest.raises(ValueError):
        check_odd_theorem([3, 10])
    with pytest.raises(SupportOutOfRange):
        check_odd_theorem([2_038_074_751])


def test_odd_branch(C):
    c = check_odd_branch(C)
    assert c.status is Status.CERTIFIED
    half = (mpmath.mpf(C.value.mid) - mp_f(2)) / 2
    assert abs(half - mpmath.mpf("0.45763")) < 1e-5
    assert c.margin.lo > 5e-5


def test_quotient_bound():
    assert check_quotient_bound([6, 10, 15]).status is Status.CERTIFIED
    assert check_quotient_bound([3, 5]).status is Status.CERTIFIED


# brute force -------------------------------------------------------------------------------------


def test_brute_n3(C):
    rep = brute_force_scan(3, C=C)
    assert rep.subset_count == 3
    assert rep.max_f_set == (2, 3)
    assert rep.max_f.contains(mp_f(2) + mp_f(3))
    assert abs(rep.max_f.mid - 1.0247) < 1e-4
    assert all(r.status is Status.CERTIFIED for r in rep.results())


def test_brute_small_against_naive_enumeration(C):
    """For N <= 14 compare the full collection of subsets against itertools."""
    for N in (5, 9, 14):
        subsets = [A for r in range(1, N) for A in itertools.combinations(range(2, N + 1), r)
                   if is_primitive_naive(A)]
        rep = brute_force_scan(N, C=C)
        assert rep.subset_count == len(subsets)
        best = max(subsets, key=lambda A: mpmath.fsum(mp_f(a) for a in A))
        assert rep.max_f_set == tuple(best)


def test_naive_count_matches_brute(C):
    assert naive_primitive_count(20) == brute_force_scan(20, C=C).subset_count
    with pytest.raises(EnumerationBudgetExceeded):
        naive_primitive_count(25)


@pytest.mark.slow
def test_brute_limits(C):
    with pytest.raises(EnumerationBudgetExceeded):
        brute_force_scan(41, C=C)
    rep = brute_force_scan(32, max_n=40, C=C)
    assert "C" not in rep.checks  # 32 = 2^5 has Omega > 4


def test_brute_checks_present(C):
    rep = brute_force_scan(12, C=C)
    assert set(rep.checks) >= {"egamma", "C", "odd-support", "prop-g", "quotient"}
    odd = rep.checks["odd-support"]
    assert odd.certified == sum(1 for r in range(1, 12) for A in itertools.combinations(range(3, 13, 2), r)
                                if is_primitive_naive(A))


# set evaluation ------------------------------------------------------------------------------


def test_read_set_file(tmp_path):
    path = tmp_path / "A.txt"
    path.write_text("# odd set\n15\n21  # comment\n\n35\n")
    assert read_set_file(str(path)) == [15, 21, 35]


def test_evaluate_set():
    checks, info = evaluate_set([15, 21, 35])
    assert info["support"] == [3, 5, 7]
    assert {c.check_id for c in checks} >= {"partition", "prop-g", "odd-support", "egamma", "quotient"}
    assert all(c.status is Status.CERTIFIED for c in checks)
    assert info["decompositions"]["3"]["A_pp"] == [5, 7]
