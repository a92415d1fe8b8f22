"""Mertens primes, E_p, Mertens pairs and the product inequalities.

A prime q is Mertens when ``e^gamma prod_{p<q} (1 - 1/p) <= 1/log q``.  The
products are carried as sums of ``log(1 - 1/p)`` and exponentiated only at
comparison time.

For any prime p, ``f(p) / (e^gamma g(p)) = 1/(e^gamma log p prod_{r<p}(1-1/r))
= 1/(1 + E_p)``, which is how the fg-ratio scan evaluates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .interval import (ROUNDING_STRATEGY, Interval, IntervalArray, Status, certify_less, e_gamma,
                       iv_exp, iv_log)
from .primes import DEFAULT_SEGMENT_ODDS, primes_up_to
from .report import CheckResult, oriented
from .scan import prefix_sum, run_prefix_scan

P_10_8 = 2_038_074_743
DUSART_EP_THRESHOLD = 2_278_382
FG_RATIO_LIMIT = "1.082"
PAIR_EXPONENT = "4.999"
MAX_PAIR_PRIME = 10**11
MAX_LISTED = 1000


class RangeError(ValueError):
    pass


def _code_status(code: int) -> Status:
    return {1: Status.CERTIFIED, -1: Status.REFUTED, 0: Status.INDETERMINATE}[int(code)]


def _oriented_array(codes: np.ndarray, lhs: IntervalArray, rhs: IntervalArray) -> IntervalArray:
    pos = rhs - lhs
    neg = lhs - rhs
    ref = codes == -1
    return IntervalArray(np.where(ref, neg.lo, pos.lo), np.where(ref, neg.hi, pos.hi))


def _hex(iv: Interval) -> dict:
    return iv.to_hex()


# the Mertens scan --------------------------------------------------------------


@dataclass
class MertensReport:
    bound: int
    checked: int
    failures: list
    indeterminate: list
    indeterminate_count: int
    expected_refuted: list
    min_margin: Interval | None
    min_margin_prime: int | None
    rounding_strategy: str
    digest: str
    complete: bool
    primes_consumed: int
    prefix_log: Interval
    segment_odds: int = DEFAULT_SEGMENT_ODDS

    def checks(self) -> list[CheckResult]:
        out = []
        for item in self.expected_refuted:
            out.append(CheckResult("mertens", f"q={item['q']}", _code_status(item["code"]),
                                   Interval.from_hex(item["margin"]), expected_refuted=True))
        for q in self.failures:
            out.append(CheckResult("mertens", f"q={q}", Status.REFUTED))
        for q in self.indeterminate:
            out.append(CheckResult("mertens", f"q={q}", Status.INDETERMINATE))
        if self.indeterminate_count > len(self.indeterminate):
            out.append(CheckResult("mertens", "further-indeterminate", Status.INDETERMINATE,
                                   detail={"count": self.indeterminate_count - len(self.indeterminate)}))
        if self.min_margin is not None:
            out.append(CheckResult("mertens", f"odd primes <= {self.bound}",
                                   Status.CERTIFIED if not (self.failures or self.indeterminate_count)
                                   else Status.INDETERMINATE if not self.failures else Status.REFUTED,
                                   self.min_margin,
                                   detail={"checked": self.checked, "min_margin_prime": self.min_margin_prime}))
        return out

    def summary(self) -> dict:
        return {
            "bound": self.bound,
            "checked_odd_primes": self.checked,
            "failures": len(self.failures),
            "indeterminate": self.indeterminate_count,
            "min_margin_prime": self.min_margin_prime,
            "min_margin": [repr(self.min_margin.lo), repr(self.min_margin.hi)] if self.min_margin else None,
            "prefix_log_at_end": _hex(self.prefix_log),
            "primes_consumed": self.primes_consumed,
            "segment_odds": self.segment_odds,
            "complete": self.complete,
        }


def _mertens_acc() -> dict:
    return {"checked": 0, "failures": [], "indeterminate": [], "indeterminate_count": 0,
            "expected_refuted": [], "min_margin": None, "min_margin_prime": None}


def _mertens_kernel(eg: Interval):
    def kernel(q: np.ndarray, S: IntervalArray, acc: dict):
        inv = IntervalArray.from_ints(q).log().reciprocal()
        lhs = S.exp() * eg
        codes = lhs.certify_less_than(inv)
        margins = _oriented_array(codes, lhs, inv)
        odd = q != 2
        if not odd.all():
            i = int(np.flatnonzero(~odd)[0])
            acc["expected_refuted"].append(
                {"q": 2, "code": int(codes[i]), "margin": margins[i].to_hex()})
        acc["checked"] += int(odd.sum())
        bad = np.flatnonzero(odd & (codes == -1))
        acc["failures"].extend(int(x) for x in q[bad][: MAX_LISTED - len(acc["failures"])])
        ind = np.flatnonzero(odd & (codes == 0))
        acc["indeterminate_count"] += len(ind)
        acc["indeterminate"].extend(int(x) for x in q[ind][: max(0, MAX_LISTED - len(acc["indeterminate"]))])
        good = np.flatnonzero(odd & (codes == 1))
        if len(good):
            j = good[int(np.argmin(margins.lo[good]))]
            cur = acc["min_margin"]
            if cur is None or margins.lo[j] < float.fromhex(cur["lo"]):
                acc["min_margin"] = margins[j].to_hex()
                acc["min_margin_prime"] = int(q[j])
        return codes, margins

    return kernel


def scan_mertens(bound: int, *, threads: int = 1, segment_odds: int = DEFAULT_SEGMENT_ODDS,
                 checkpoint_path: str | None = None, resume: bool = False, checkpoint_every: int = 1,
                 max_segments: int | None = None, strategy: str = ROUNDING_STRATEGY) -> MertensReport:
    """Certify every odd prime q <= bound as Mertens; q = 2 is reported refuted."""
    if bound < 2:
        raise ValueError("bound must be at least 2")
    eg = e_gamma().value
    state, complete = run_prefix_scan(
        "mertens", "log1m", bound, _mertens_kernel(eg), threads=threads, segment_odds=segment_odds,
        checkpoint_path=checkpoint_path, resume=resume, checkpoint_every=checkpoint_every,
        max_segments=max_segments, strategy=strategy, init_acc=_mertens_acc)
    a = state.acc
    mm = Interval.from_hex(a["min_margin"]) if a["min_margin"] else None
    return MertensReport(bound, a["checked"], a["failures"], a["indeterminate"], a["indeterminate_count"],
                         a["expected_refuted"], mm, a["min_margin_prime"], strategy, state.digest,
                         complete, state.primes_consumed, state.prefix, segment_odds)


def mertens_check(q: int) -> CheckResult:
    """Single-prime Mertens check from a direct prefix sum."""
    S = prefix_sum(q, "log1m")
    lhs = e_gamma().value * iv_exp(S)
    rhs = Interval(1.0, 1.0) / iv_log(Interval.from_int(q))
    st = certify_less(lhs, rhs)
    return CheckResult("mertens", f"q={q}", st, oriented(st, lhs, rhs), expected_refuted=(q == 2))


# E_p ----------------------------------------------------------------------------


def compute_Ep(p: int) -> Interval:
    """Enclosure of E_p from prod_{r<p}(1 - 1/r) = (1 + E_p)/(e^gamma log p)."""
    if p < 3:
        raise ValueError("E_p is defined here for primes p >= 3")
    if p > MAX_PAIR_PRIME:
        raise RangeError(f"prefix product unavailable beyond {MAX_PAIR_PRIME}")
    S = prefix_sum(p, "log1m")
    return e_gamma().value * iv_exp(S) * iv_log(Interval.from_int(p)) - 1


def ep_dusart_bound(p: int) -> Interval:
    """0.2/(log p)^3."""
    L = iv_log(Interval.from_int(p))
    return Interval.from_decimal("0.2") / (L * L * L)


def check_Ep_bound(p: int) -> CheckResult:
    """Certify |E_p| <= 0.2/(log p)^3 (applicable for p > 2,278,382)."""
    if p <= DUSART_EP_THRESHOLD:
        raise ValueError(f"the E_p bound is only claimed for p > {DUSART_EP_THRESHOLD}")
    E = compute_Ep(p)
    absE = Interval(0.0 if E.lo <= 0 <= E.hi else min(abs(E.lo), abs(E.hi)), max(abs(E.lo), abs(E.hi)))
    b = ep_dusart_bound(p)
    st = certify_less(absE, b)
    return CheckResult("ep-bound", f"p={p}", st, oriented(st, absE, b), detail={"E_p": _hex(E)})


# eq. (mert) extension to 1 <= x <= 285 -------------------------------------------


def check_rs_product(x_max: int = 285) -> list[CheckResult]:
    """prod_{p<=x}(1-1/p) > 1/(e^gamma log 2x) for all real 1 <= x <= x_max.

    The left side is a step function that only drops at primes, and the right
    side decreases in x, so on each [p, p') the worst case is x = p; on [1, 2)
    it is x = 1.
    """
    eg = e_gamma().value
    out = []
    prod = Fraction(1)

    def check(x: int, prod: Fraction):
        lhs = Interval.from_fraction(prod)
        rhs = Interval(1.0, 1.0) / (eg * iv_log(Interval.from_int(2 * x)))
        st = certify_less(rhs, lhs)
        return CheckResult("rs-product", f"x={x}", st, oriented(st, rhs, lhs))

    out.append(check(1, prod))
    for p in primes_up_to(x_max):
        prod *= Fraction(p - 1, p)
        out.append(check(p, prod))
    return out


# f(p)/(e^gamma g(p)) < 1.082 --------------------------------------------------------


@dataclass
class FGRatioReport:
    bound: int
    checked: int
    failures: list
    indeterminate: list
    argmax: int
    argmax_ratio: Interval
    min_margin: Interval
    digest: str
    extra: dict = field(default_factory=dict)

    def checks(self) -> list[CheckResult]:
        out = [CheckResult("fg-ratio", f"p={q}", Status.REFUTED) for q in self.failures]
        out += [CheckResult("fg-ratio", f"p={q}", Status.INDETERMINATE) for q in self.indeterminate]
        limit = Interval.from_decimal(FG_RATIO_LIMIT)
        st = certify_less(self.argmax_ratio, limit)
        out.append(CheckResult("fg-ratio", f"argmax p={self.argmax}", st,
                               oriented(st, self.argmax_ratio, limit),
                               detail={"ratio": _hex(self.argmax_ratio),
                                       "ratio_decimal": [repr(self.argmax_ratio.lo), repr(self.argmax_ratio.hi)],
                                       "checked": self.checked}))
        return out


def _fg_acc() -> dict:
    return {"checked": 0, "failures": [], "indeterminate": [], "argmax": None, "argmax_ratio": None}


def _fg_kernel(eg: Interval):
    limit = Interval.from_decimal(FG_RATIO_LIMIT)

    def kernel(q: np.ndarray, S: IntervalArray, acc: dict):
        ratio = (S.exp() * IntervalArray.from_ints(q).log() * eg).reciprocal()
        codes = ratio.certify_less_than(limit)
        margins = _oriented_array(codes, ratio, IntervalArray.broadcast(limit, len(q)))
        acc["checked"] += len(q)
        acc["failures"].extend(int(x) for x in q[codes == -1][:MAX_LISTED])
        acc["indeterminate"].extend(int(x) for x in q[codes == 0][:MAX_LISTED])
        j = int(np.argmax(ratio.hi))
        cur = acc["argmax_ratio"]
        if cur is None or ratio.hi[j] > float.fromhex(cur["hi"]):
            acc["argmax"] = int(q[j])
            acc["argmax_ratio"] = ratio[j].to_hex()
        return codes, margins

    return kernel


def check_fg_ratio(bound: int, *, threads: int = 1, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> FGRatioReport:
    """Certify f(p)/(e^gamma g(p)) < 1.082 for every prime p <= bound.

    The ratio equals 1/(1 + E_p); beyond 2,278,382 the bound |E_p| <= 0.2/(log p)^3
    keeps it below 1 + 0.2/((log p)^3 - 0.2) < 1.0001, covering the tail.
    """
    if bound < 2:
        raise ValueError("bound must be at least 2")
    eg = e_gamma().value
    state, _ = run_prefix_scan("fg-ratio", "log1m", bound, _fg_kernel(eg), threads=threads,
                               segment_odds=segment_odds, init_acc=_fg_acc)
    a = state.acc
    ratio = Interval.from_hex(a["argmax_ratio"])
    limit = Interval.from_decimal(FG_RATIO_LIMIT)
    return FGRatioReport(bound, a["checked"], a["failures"], a["indeterminate"], a["argmax"], ratio,
                         limit - ratio, state.digest)


def fg_ratio(p: int) -> Interval:
    """f(p)/(e^gamma g(p)) for a single prime."""
    S = prefix_sum(p, "log1m")
    return Interval(1.0, 1.0) / (e_gamma().value * iv_log(Interval.from_int(p)) * iv_exp(S))


# Mertens pairs --------------------------------------------------------------------


def mertens_pair(p: int, q: int) -> Status:
    return mertens_pair_check(p, q).status


def mertens_pair_check(p: int, q: int) -> CheckResult:
    """prod_{p<=r<q}(1 - 1/r) > log p / log(pq)."""
    if not 2 < p <= q:
        raise ValueError("need 2 < p <= q")
    if q > MAX_PAIR_PRIME:
        raise RangeError(f"q beyond the supported range {MAX_PAIR_PRIME}")
    T = prefix_sum(q, "log1m", start=p)
    lhs = iv_exp(T)
    Lp = iv_log(Interval.from_int(p))
    rhs = Lp / (Lp + iv_log(Interval.from_int(q)))
    st = certify_less(rhs, lhs)
    return CheckResult("mertens-pair", f"p={p},q={q}", st, oriented(st, rhs, lhs))


def pair_criterion_limit(p: int) -> Interval:
    """4.999 (log p)^4: every prime q with p <= q < exp of this forms a Mertens pair with p."""
    if p <= DUSART_EP_THRESHOLD:
        raise ValueError(f"criterion needs p > {DUSART_EP_THRESHOLD}")
    L = iv_log(Interval.from_int(p))
    return Interval.from_decimal(PAIR_EXPONENT) * (L * L) * (L * L)


def check_pair_criterion(p: int) -> CheckResult:
    """Certify the slack in the pair criterion at p.

    With L = log p, l = log q, |E| <= 0.2/(log)^3 at both p and q, the pair
    inequality reduces to L(1 + E_q) + l(E_q - E_p) > 0.  For L <= l < 4.999 L^4
    its left side exceeds 0.0002 L - 0.4/L^2, which is positive once L^3 > 2000.
    """
    L = iv_log(Interval.from_int(p))
    slack = Interval.from_decimal("0.0002") * L - Interval.from_decimal("0.4") / (L * L)
    st = certify_less(Interval(0.0, 0.0), slack)
    return CheckResult("pair-criterion", f"p={p}", st, oriented(st, Interval(0.0, 0.0), slack),
                       detail={"limit": _hex(pair_criterion_limit(p))})
