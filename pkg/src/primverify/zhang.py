"""Zhang primes and the h-functional over N_k.

A prime q is Zhang when ``sum_{p>=q} 1/(p log p) <= 1/log q``; with C the full
sum this reads ``C - sum_{p<q} 1/(p log p) <= 1/log q``.  A check is Certified
only if it holds at the upper endpoint of C's enclosure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .constants import erdos_constant_C, f_prime_interval
from .interval import (ROUNDING_STRATEGY, CertifiedConstant, Interval, IntervalArray, Status,
                       certify_less, iv_log)
from .mertens import MAX_LISTED, _code_status, _oriented_array
from .primes import DEFAULT_SEGMENT_ODDS, nth_prime, primes_array
from .report import CheckResult, oriented
from .scan import run_prefix_scan, zhang_terms

EXPECTED_NON_ZHANG = (2, 3)
MULTISET_BUDGET = 10**7
OMEGA_BOUND_LIMIT = 10**8


class CombinatorialBudgetExceeded(ValueError):
    pass


@dataclass
class ZhangReport:
    bound: int
    checked: int
    failures: list
    indeterminate: list
    indeterminate_count: int
    expected: list
    min_margin: Interval | None
    min_margin_prime: int | None
    C: CertifiedConstant
    digest: str
    complete: bool
    partial_sum: Interval

    def checks(self) -> list[CheckResult]:
        out = []
        for item in self.expected:
            out.append(CheckResult("zhang", f"q={item['q']}", _code_status(item["code"]),
                                   Interval.from_hex(item["margin"]), expected_refuted=True))
        out += [CheckResult("zhang", f"q={q}", Status.REFUTED) for q in self.failures]
        out += [CheckResult("zhang", f"q={q}", Status.INDETERMINATE) for q in self.indeterminate]
        if self.min_margin is not None:
            st = (Status.REFUTED if self.failures else
                  Status.INDETERMINATE if self.indeterminate_count else Status.CERTIFIED)
            out.append(CheckResult("zhang", f"3 < q <= {self.bound}", st, self.min_margin,
                                   detail={"checked": self.checked, "min_margin_prime": self.min_margin_prime}))
        return out

    def summary(self) -> dict:
        return {
            "bound": self.bound,
            "checked_primes_above_3": self.checked,
            "failures": len(self.failures),
            "indeterminate": self.indeterminate_count,
            "min_margin_prime": self.min_margin_prime,
            "min_margin": [repr(self.min_margin.lo), repr(self.min_margin.hi)] if self.min_margin else None,
            "C": self.C.value.to_hex(),
            "partial_sum_at_end": self.partial_sum.to_hex(),
            "complete": self.complete,
        }


def _zhang_acc() -> dict:
    return {"checked": 0, "failures": [], "indeterminate": [], "indeterminate_count": 0,
            "expected": [], "min_margin": None, "min_margin_prime": None}


def _zhang_kernel(C: Interval):
    def kernel(q: np.ndarray, Z: IntervalArray, acc: dict):
        lhs = Z.__rsub__(C)  # C - partial sum
        rhs = IntervalArray.from_ints(q).log().reciprocal()
        codes = lhs.certify_less_than(rhs)
        # the inequality is non-strict; equality cannot be certified from enclosures
        margins = _oriented_array(codes, lhs, rhs)
        small = q <= 3
        for i in np.flatnonzero(small):
            acc["expected"].append({"q": int(q[i]), "code": int(codes[i]), "margin": margins[i].to_hex()})
        rest = ~small
        acc["checked"] += int(rest.sum())
        acc["failures"].extend(int(x) for x in q[rest & (codes == -1)][:MAX_LISTED])
        ind = q[rest & (codes == 0)]
        acc["indeterminate_count"] += len(ind)
        acc["indeterminate"].extend(int(x) for x in ind[: max(0, MAX_LISTED - len(acc["indeterminate"]))])
        good = np.flatnonzero(rest & (codes == 1))
        if len(good):
            j = good[int(np.argmin(margins.lo[good]))]
            cur = acc["min_margin"]
            if cur is None or margins.lo[j] < float.fromhex(cur["lo"]):
                acc["min_margin"] = margins[j].to_hex()
                acc["min_margin_prime"] = int(q[j])
        return codes, margins

    return kernel


def scan_zhang(bound: int, *, C: CertifiedConstant | None = None, threads: int = 1,
               segment_odds: int = DEFAULT_SEGMENT_ODDS, checkpoint_path: str | None = None,
               resume: bool = False, checkpoint_every: int = 1, max_segments: int | None = None,
               strategy: str = ROUNDING_STRATEGY) -> ZhangReport:
    if bound < 2:
        raise ValueError("bound must be at least 2")
    C = C or erdos_constant_C()
    state, complete = run_prefix_scan(
        "zhang", "f", bound, _zhang_kernel(C.value), threads=threads, segment_odds=segment_odds,
        checkpoint_path=checkpoint_path, resume=resume, checkpoint_every=checkpoint_every,
        max_segments=max_segments, strategy=strategy, extra_config={"C": C.value.to_hex()},
        init_acc=_zhang_acc)
    a = state.acc
    mm = Interval.from_hex(a["min_margin"]) if a["min_margin"] else None
    return ZhangReport(bound, a["checked"], a["failures"], a["indeterminate"], a["indeterminate_count"],
                       a["expected"], mm, a["min_margin_prime"], C, state.digest, complete, state.prefix)


# h(N_2), h(N_1) ---------------------------------------------------------------------


def h_N2_lower(m_max: int = 10**4, C: CertifiedConstant | None = None) -> Interval:
    """sum_{m<=m_max} (1/p_m) (C - sum_{k<m} 1/(p_k log p_k))."""
    C = C or erdos_constant_C()
    ps = primes_array(nth_prime(m_max).p)
    terms = zhang_terms(ps)
    tails = IntervalArray.broadcast(C.value, len(ps)) - terms.exclusive_prefix()
    inv = IntervalArray.from_ints(ps).reciprocal()
    return (inv * tails).fsum()


def h_N2_checks(C: CertifiedConstant | None = None) -> list[CheckResult]:
    C = C or erdos_constant_C()
    h2 = h_N2_lower(C=C)
    lim2 = Interval.from_decimal("1.638")
    st2 = certify_less(lim2, h2)
    lim1 = Interval.from_decimal("1.637")
    st1 = certify_less(C.value, lim1)
    return [
        CheckResult("h-N2", "sum_{m<=10^4} > 1.638", st2, oriented(st2, lim2, h2),
                    detail={"value": h2.to_hex(), "decimal": [repr(h2.lo), repr(h2.hi)]}),
        CheckResult("h-N1", "C < 1.637", st1, oriented(st1, C.value, lim1)),
    ]


# finite-support h(N_k(Q)) and truncated f(N_k) --------------------------------------


def _validate_Q(Q) -> list[int]:
    Q = [int(q) for q in Q]
    if not Q:
        raise ValueError("Q must be nonempty")
    if any(b <= a for a, b in zip(Q, Q[1:])):
        raise ValueError("Q must be sorted and distinct")
    for q in Q:
        if q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
            raise ValueError(f"{q} is not prime")
    return Q


def h_nk_finite(Q, k: int, budget: int = MULTISET_BUDGET) -> Interval:
    """h(N_k(Q)) = sum over size-k multisets q_1 <= ... <= q_k of Q of 1/(q_1...q_k log q_k).

    Evaluated by grouping on the largest element: for Q[j] as maximum the
    remaining k-1 factors range over multisets of Q[0..j], whose reciprocal
    products sum to the complete homogeneous polynomial h_{k-1}(1/Q[0..j]).
    """
    Q = _validate_Q(Q)
    if k < 1:
        raise ValueError("k must be at least 1")
    if math.comb(len(Q) + k - 1, k) > budget:
        raise CombinatorialBudgetExceeded(f"{math.comb(len(Q) + k - 1, k)} multisets exceed {budget}")
    inv = [Interval(1.0, 1.0) / Interval.from_int(q) for q in Q]
    # H[d] = h_d over the prefix processed so far
    H = [Interval(1.0, 1.0)] + [Interval(0.0, 0.0)] * (k - 1)
    total = Interval(0.0, 0.0)
    for j, q in enumerate(Q):
        for d in range(1, k):
            H[d] = H[d] + inv[j] * H[d - 1]
        total = total + H[k - 1] * inv[j] / iv_log(Interval.from_int(q))
    return total


def h_nk_bruteforce(Q, k: int) -> Interval:
    """Same sum by direct multiset enumeration (oracle)."""
    Q = _validate_Q(Q)
    total = Interval(0.0, 0.0)
    for combo in itertools.combinations_with_replacement(Q, k):
        prod = math.prod(combo)
        total = total + Interval(1.0, 1.0) / (Interval.from_int(prod) * iv_log(Interval.from_int(combo[-1])))
    return total


def check_banks_martin_finite(Q, k: int) -> CheckResult:
    """Certify h(N_{k+1}(Q)) <= h(N_k(Q))."""
    a = h_nk_finite(Q, k + 1)
    b = h_nk_finite(Q, k)
    st = certify_less(a, b)
    return CheckResult("h-nk-monotone", f"Q={list(Q)},k={k}", st, oriented(st, a, b))


def big_omega_table(bound: int) -> np.ndarray:
    """Omega(n) for 0 <= n <= bound (entries 0 and 1 are 0)."""
    if bound > OMEGA_BOUND_LIMIT:
        raise CombinatorialBudgetExceeded(f"bound {bound} exceeds {OMEGA_BOUND_LIMIT}")
    omega = np.zeros(bound + 1, dtype=np.uint8)
    for p in primes_array(bound).tolist():
        pe = p
        while pe <= bound:
            omega[pe::pe] += 1
            pe *= p
    return omega


def f_nk_truncated(k: int, bound: int) -> Interval:
    """sum_{n<=bound, Omega(n)=k} 1/(n log n), a lower bound for f(N_k)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    omega = big_omega_table(bound)
    ns = np.flatnonzero(omega == k)
    if len(ns) == 0:
        return Interval(0.0, 0.0)
    return zhang_terms(ns.astype(np.int64)).fsum()


def zhang_check(q: int, C: CertifiedConstant | None = None) -> CheckResult:
    C = C or erdos_constant_C()
    ps = primes_array(q - 1)
    Z = zhang_terms(ps).fsum() if len(ps) else Interval(0.0, 0.0)
    lhs = C.value - Z
    rhs = Interval(1.0, 1.0) / iv_log(Interval.from_int(q))
    st = certify_less(lhs, rhs)
    return CheckResult("zhang", f"q={q}", st, oriented(st, lhs, rhs),
                       expected_refuted=q in EXPECTED_NON_ZHANG)


__all__ = ["scan_zhang", "h_N2_lower", "h_N2_checks", "h_nk_finite", "h_nk_bruteforce",
           "f_nk_truncated", "big_omega_table", "check_banks_martin_finite", "zhang_check",
           "f_prime_interval", "ZhangReport"]
