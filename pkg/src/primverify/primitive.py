"""Finite primitive sets, the f/g/h functionals and a brute-force oracle.

A set of integers > 1 is primitive when no member divides another.  For a
member a with smallest prime factor p(a) and largest P(a)::

    f(a) = 1/(a log a)
    g(a) = (1/a) prod_{p < P(a)} (1 - 1/p)
    h(a) = 1/(a log P(a))

g(a) is rational and is evaluated exactly before being enclosed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .constants import epsilon0_bound, erdos_constant_C
from .interval import (CertifiedConstant, Interval, Status, certify_less, down, e_gamma, iv_log, up)
from .mertens import P_10_8
from .primes import primes_array
from .report import CheckResult, oriented

FACTOR_LIMIT = 10**14
BRUTE_DEFAULT_N = 30
BRUTE_MAX_N = 40
ZHANG_OMEGA_RANGE = 31  # every n <= 31 has Omega(n) <= 4
ODD_BRANCH_LIMIT = "0.4577"


class NotPrimitive(ValueError):
    def __init__(self, a: int, b: int):
        super().__init__(f"{a} divides {b}")
        self.witness = (a, b)


class FactorizationBudgetExceeded(ValueError):
    pass


class EnumerationBudgetExceeded(ValueError):
    pass


class SupportOutOfRange(ValueError):
    pass


# factorization --------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def factorize(a: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of a > 1 as ((p, e), ...) by trial division."""
    if a < 2:
        raise ValueError("a must exceed 1")
    if a > FACTOR_LIMIT:
        raise FactorizationBudgetExceeded(f"{a} exceeds the factorization limit {FACTOR_LIMIT}")
    out = []
    n = a
    for p in primes_array(math.isqrt(a)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def p(a: int) -> int:
    """Smallest prime factor."""
    return factorize(a)[0][0]


def P(a: int) -> int:
    """Largest prime factor."""
    return factorize(a)[-1][0]


def omega(a: int) -> int:
    """Number of prime factors with multiplicity."""
    return sum(e for _, e in factorize(a))


def support(members) -> list[int]:
    return sorted({q for a in members for q, _ in factorize(a)})


# single-member functionals ----------------------------------------------------


def f_value(a: int) -> Interval:
    A = Interval.from_int(a)
    return Interval(1.0, 1.0) / (A * iv_log(A))


def g_exact(a: int) -> Fraction:
    top = P(a)
    prod = Fraction(1, a)
    for q in primes_array(top - 1).tolist():
        prod *= Fraction(q - 1, q)
    return prod


def g_value(a: int) -> Interval:
    return Interval.from_fraction(g_exact(a))


def h_value(a: int) -> Interval:
    return Interval(1.0, 1.0) / (Interval.from_int(a) * iv_log(Interval.from_int(P(a))))


def _sum(items) -> Interval:
    total = Interval(0.0, 0.0)
    for iv in items:
        total = total + iv
    return total


# sets -------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimitiveSet:
    members: tuple[int, ...]

    def __post_init__(self):
        ms = tuple(sorted(set(int(a) for a in self.members)))
        if any(a <= 1 for a in ms):
            raise ValueError("members must exceed 1")
        w = divisibility_witness(ms)
        if w is not None:
            raise NotPrimitive(*w)
        object.__setattr__(self, "members", ms)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def support(self) -> list[int]:
        return support(self.members)


def divisibility_witness(ms) -> tuple[int, int] | None:
    ms = sorted(ms)
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if b % a == 0:
                return (a, b)
    return None


def validate_primitive(values) -> PrimitiveSet:
    """Build a PrimitiveSet or raise NotPrimitive carrying the dividing pair."""
    return PrimitiveSet(tuple(values))


def _members(A) -> tuple[int, ...]:
    return A.members if isinstance(A, PrimitiveSet) else tuple(sorted(A))


def f_set(A) -> Interval:
    return _sum(f_value(a) for a in _members(A))


def g_set(A) -> Interval:
    return Interval.from_fraction(sum((g_exact(a) for a in _members(A)), Fraction(0)))


def h_set(A) -> Interval:
    return _sum(h_value(a) for a in _members(A))


@dataclass(frozen=True)
class Decomposition:
    base: PrimitiveSet
    p: int
    A_p: tuple[int, ...]
    A_p_eq: tuple[int, ...]
    A_pp: tuple[int, ...]


def decompose(A, q: int) -> Decomposition:
    A = A if isinstance(A, PrimitiveSet) else validate_primitive(A)
    at_least = tuple(a for a in A if p(a) >= q)
    equal = tuple(a for a in at_least if p(a) == q)
    return Decomposition(A, q, at_least, equal, tuple(a // q for a in equal))


@dataclass(frozen=True)
class TwoAdicSplit:
    base: PrimitiveSet
    k: int
    A_k: tuple[int, ...]
    B_k: tuple[int, ...]


def two_adic_split(A, k: int) -> TwoAdicSplit:
    if k < 1:
        raise ValueError("k must be at least 1")
    A = A if isinstance(A, PrimitiveSet) else validate_primitive(A)
    ak = tuple(a for a in A if a % (1 << k) == 0 and a % (1 << (k + 1)) != 0)
    return TwoAdicSplit(A, k, ak, tuple(a >> k for a in ak))


def _status_le_exact(lhs: Fraction, rhs: Fraction) -> Status:
    return Status.CERTIFIED if lhs <= rhs else Status.REFUTED


def check_prop_erdos(A, q: int) -> list[CheckResult]:
    """g(A'_q) <= g(q), and f(A'_q) < e^gamma g(q) when q is not in A."""
    d = decompose(A, q)
    subject = f"A={list(d.base.members)},q={q}"
    g_lhs = sum((g_exact(a) for a in d.A_p_eq), Fraction(0))
    g_rhs = g_exact(q)
    st = _status_le_exact(g_lhs, g_rhs)
    out = [CheckResult("prop-g", subject, st,
                       oriented(st, Interval.from_fraction(g_lhs), Interval.from_fraction(g_rhs)),
                       detail={"lhs": str(g_lhs), "rhs": str(g_rhs)})]
    if q not in d.base.members:
        lhs = f_set(d.A_p_eq)
        rhs = e_gamma().value * Interval.from_fraction(g_rhs)
        st = certify_less(lhs, rhs)
        out.append(CheckResult("prop-f", subject, st, oriented(st, lhs, rhs)))
    return out


def check_partition(A) -> CheckResult:
    """f(A) = sum over q of f(A'_q), as intersecting enclosures."""
    A = A if isinstance(A, PrimitiveSet) else validate_primitive(A)
    whole = f_set(A)
    parts = _sum(f_set(decompose(A, q).A_p_eq) for q in A.support)
    st = Status.CERTIFIED if whole.intersects(parts) else Status.REFUTED
    return CheckResult("partition", f"A={list(A.members)}", st)


# odd-support bound -------------------------------------------------------------


def _common_cancel(A: PrimitiveSet) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Members of A that are not prime, and primes of the support not in A.

    Primes lying in both A and its support cancel, so f(A) <= f(supp) + e is
    equivalent to f(rest) <= f(extra) + e.
    """
    supp = A.support
    primes_in = {a for a in A if len(factorize(a)) == 1 and factorize(a)[0][1] == 1}
    rest = tuple(a for a in A if a not in primes_in)
    extra = tuple(q for q in supp if q not in primes_in)
    return rest, extra


def check_odd_theorem(A, eps0: Interval | None = None) -> CheckResult:
    """f(A) <= f(supp A) + eps0 for a primitive set of odd members."""
    A = A if isinstance(A, PrimitiveSet) else validate_primitive(A)
    if any(a % 2 == 0 for a in A):
        raise ValueError("all members must be odd")
    if A.support and A.support[-1] > P_10_8:
        raise SupportOutOfRange(f"support exceeds the certified Mertens range {P_10_8}")
    eps0 = eps0 if eps0 is not None else epsilon0_bound().bound
    rest, extra = _common_cancel(A)
    lhs = f_set(rest)
    # the certified claim is the numerical bound, so use the upper endpoint of eps0
    rhs = f_set(extra) + Interval.point(eps0.hi)
    st = certify_less(lhs, rhs)
    return CheckResult("odd-support", f"A={list(A.members)}", st, oriented(st, lhs, rhs),
                       detail={"f_A": f_set(A).to_hex(), "f_support": f_set(A.support).to_hex()})


def check_odd_branch(C: CertifiedConstant | None = None) -> CheckResult:
    """(C - f(2))/2 < 0.4577."""
    C = C or erdos_constant_C()
    lhs = (C.value - f_value(2)).scale2(-1)
    rhs = Interval.from_decimal(ODD_BRANCH_LIMIT)
    st = certify_less(lhs, rhs)
    return CheckResult("odd-branch", "(C - f(2))/2 < 0.4577", st, oriented(st, lhs, rhs))


def check_quotient_bound(A) -> CheckResult:
    """f(A'_2) <= f(A''_2)/2 when 2 is not in A."""
    d = decompose(A, 2)
    lhs = f_set(d.A_p_eq)
    rhs = f_set(d.A_pp).scale2(-1)
    if not d.A_p_eq:
        return CheckResult("quotient", f"A={list(d.base.members)}", Status.CERTIFIED, Interval(0.0, 0.0))
    st = certify_less(lhs, rhs)
    return CheckResult("quotient", f"A={list(d.base.members)}", st, oriented(st, lhs, rhs))


# brute force ------------------------------------------------------------------


@dataclass
class BruteCheck:
    """Aggregate of one certificate family over all enumerated subsets."""

    name: str
    certified: int = 0
    refuted: int = 0
    indeterminate: int = 0
    min_margin: float = math.inf
    extremal: tuple[int, ...] = ()
    examples: list = field(default_factory=list)

    def record(self, code: int, margin_lo: float, path: list[int]) -> None:
        if code == 1:
            self.certified += 1
            if margin_lo < self.min_margin:
                self.min_margin = margin_lo
                self.extremal = tuple(path)
        elif code == -1:
            self.refuted += 1
        else:
            self.indeterminate += 1
        if code != 1 and len(self.examples) < 20:
            self.examples.append(list(path))

    @property
    def status(self) -> Status:
        if self.refuted:
            return Status.REFUTED
        if self.indeterminate:
            return Status.INDETERMINATE
        return Status.CERTIFIED

    def to_check(self, N: int) -> CheckResult:
        margin = None
        if math.isfinite(self.min_margin):
            margin = Interval(self.min_margin, self.min_margin)
        return CheckResult(f"brute-{self.name}", f"N={N}", self.status, margin,
                           detail={"certified": self.certified, "refuted": self.refuted,
                                   "indeterminate": self.indeterminate,
                                   "extremal_set": list(self.extremal),
                                   "counterexamples": self.examples})


@dataclass
class BruteReport:
    N: int
    subset_count: int
    checks: dict[str, BruteCheck]
    max_f: Interval
    max_f_set: tuple[int, ...]

    def results(self) -> list[CheckResult]:
        return [c.to_check(self.N) for c in self.checks.values()]

    def summary(self) -> dict:
        return {"N": self.N, "subsets": self.subset_count,
                "max_f": [repr(self.max_f.lo), repr(self.max_f.hi)],
                "max_f_set": list(self.max_f_set)}


def _le_code(lhs_lo: float, lhs_hi: float, rhs_lo: float, rhs_hi: float) -> int:
    if lhs_hi < rhs_lo:
        return 1
    if lhs_lo > rhs_hi:
        return -1
    return 0


def brute_force_scan(N: int = BRUTE_DEFAULT_N, max_n: int = BRUTE_MAX_N,
                     C: CertifiedConstant | None = None) -> BruteReport:
    """Enumerate every nonempty primitive subset of [2, N] and certify, per subset:

    * ``f(A) < e^gamma``;
    * ``f(A) <= C`` (only for N <= 31, where every member has Omega <= 4);
    * for odd-member sets, ``f(A) <= sum_{p in supp A} f(p)``;
    * for every prime q not in A, ``g(A'_q) <= g(q)``;
    * when 2 is not in A, ``f(A'_2) <= f(A''_2)/2``.

    The depth-first search adds candidates in increasing order and carries
    running interval sums, so each node costs O(1) interval operations.  The
    families indexed by q only change in the component q = p(a) of the member
    a just added; every other component was already certified at an ancestor
    with an identical A'_q, so one certificate per node covers all (A, q).
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if N > max_n:
        raise EnumerationBudgetExceeded(f"N = {N} exceeds the enumeration limit {max_n}")
    C = C or erdos_constant_C()
    eg = e_gamma().value
    check_C = N <= ZHANG_OMEGA_RANGE

    nums = list(range(2, N + 1))
    idx = {a: i for i, a in enumerate(nums)}
    conflict = [0] * len(nums)
    for i, a in enumerate(nums):
        for j, b in enumerate(nums):
            if i != j and (a % b == 0 or b % a == 0):
                conflict[i] |= 1 << j
    fv = [f_value(a) for a in nums]
    f_lo = [iv.lo for iv in fv]
    f_hi = [iv.hi for iv in fv]
    primes = [a for a in nums if len(factorize(a)) == 1 and factorize(a)[0][1] == 1]
    pidx = {q: k for k, q in enumerate(primes)}
    is_prime = [a in pidx for a in nums]
    spf = [pidx[p(a)] for a in nums]
    supp_mask = [sum(1 << pidx[q] for q, _ in factorize(a)) for a in nums]
    g_iv = [g_value(a) for a in nums]
    g_prime = [g_value(q) for q in primes]
    # halves of f(a/2) for even a other than 2
    half_lo = [0.0] * len(nums)
    half_hi = [0.0] * len(nums)
    for i, a in enumerate(nums):
        if a % 2 == 0 and a > 2:
            q = f_value(a // 2).scale2(-1)
            half_lo[i], half_hi[i] = q.lo, q.hi

    # f over every subset of primes, indexed by bitmask
    nP = len(primes)
    psum_lo = [0.0] * (1 << nP)
    psum_hi = [0.0] * (1 << nP)
    for m in range(1, 1 << nP):
        k = (m & -m).bit_length() - 1
        prev = m & (m - 1)
        psum_lo[m] = down(psum_lo[prev] + f_lo[idx[primes[k]]])
        psum_hi[m] = up(psum_hi[prev] + f_hi[idx[primes[k]]])

    checks = {name: BruteCheck(name) for name in
              ["egamma", "C", "odd-support", "prop-g", "quotient"] if name != "C" or check_C}
    ck_eg, ck_odd, ck_g, ck_q = checks["egamma"], checks["odd-support"], checks["prop-g"], checks["quotient"]
    ck_C = checks.get("C")
    eg_lo, C_lo = eg.lo, C.value.lo

    count = 0
    best = [-math.inf, -math.inf, ()]
    path: list[int] = []
    g_lo = [0.0] * nP
    g_hi = [0.0] * nP

    def visit(start, blocked, s_lo, s_hi, comp_lo, comp_hi, in_mask, sup_mask, all_odd,
              q_lo, q_hi, h_lo, h_hi, has2):
        nonlocal count
        for i in range(start, len(nums)):
            if blocked >> i & 1:
                continue
            a = nums[i]
            path.append(a)
            count += 1
            n_lo = down(s_lo + f_lo[i])
            n_hi = up(s_hi + f_hi[i])
            if n_hi > best[1]:
                best[0], best[1], best[2] = n_lo, n_hi, tuple(path)
            # f(A) < e^gamma ; f(A) <= C
            ck_eg.record(_le_code(n_lo, n_hi, eg_lo, eg.hi), down(eg_lo - n_hi), path)
            if ck_C is not None:
                ck_C.record(_le_code(n_lo, n_hi, C_lo, C.value.hi), down(C_lo - n_hi), path)
            # f of non-prime members, support and primes in A
            if is_prime[i]:
                c_lo, c_hi = comp_lo, comp_hi
                nin = in_mask | (1 << pidx[a])
            else:
                c_lo, c_hi = down(comp_lo + f_lo[i]), up(comp_hi + f_hi[i])
                nin = in_mask
            nsup = sup_mask | supp_mask[i]
            odd = all_odd and a % 2 == 1
            if odd:
                extra = nsup & ~nin
                r_lo, r_hi = psum_lo[extra], psum_hi[extra]
                if c_hi == 0.0 and extra == 0:
                    ck_odd.record(1, 0.0, path)  # both sides empty after cancellation
                else:
                    ck_odd.record(_le_code(c_lo, c_hi, r_lo, r_hi), down(r_lo - c_hi), path)
            # g(A'_q) <= g(q) for q = p(a) not in A
            k = spf[i]
            old = g_lo[k], g_hi[k]
            g_lo[k] = down(old[0] + g_iv[i].lo)
            g_hi[k] = up(old[1] + g_iv[i].hi)
            if not is_prime[i]:
                gq = g_prime[k]
                ck_g.record(_le_code(g_lo[k], g_hi[k], gq.lo, gq.hi), down(gq.lo - g_hi[k]), path)
            # f(A'_2) <= f(A''_2)/2 while 2 is not in A
            nq_lo, nq_hi, nh_lo, nh_hi = q_lo, q_hi, h_lo, h_hi
            if a % 2 == 0 and a > 2:
                nq_lo, nq_hi = down(q_lo + f_lo[i]), up(q_hi + f_hi[i])
                nh_lo, nh_hi = down(h_lo + half_lo[i]), up(h_hi + half_hi[i])
                ck_q.record(_le_code(nq_lo, nq_hi, nh_lo, nh_hi), down(nh_lo - nq_hi), path)
            visit(i + 1, blocked | conflict[i], n_lo, n_hi, c_lo, c_hi, nin, nsup, odd,
                  nq_lo, nq_hi, nh_lo, nh_hi, has2 or a == 2)
            g_lo[k], g_hi[k] = old
            path.pop()

    visit(0, 0, 0.0, 0.0, 0.0, 0.0, 0, 0, True, 0.0, 0.0, 0.0, 0.0, False)
    return BruteReport(N, count, checks, Interval(best[0], best[1]), best[2])


def naive_primitive_count(N: int) -> int:
    """Count nonempty primitive subsets of [2, N] by testing every bitmask."""
    if N > 24:
        raise EnumerationBudgetExceeded("naive enumeration is limited to N <= 24")
    n = N - 1
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bad = np.zeros(len(masks), dtype=bool)
    for i in range(n):
        a = i + 2
        mult = 0
        for j in range(i + 1, n):
            if (j + 2) % a == 0:
                mult |= 1 << j
        if mult:
            bad |= ((masks >> i) & 1).astype(bool) & ((masks & mult) != 0)
    return int(np.count_nonzero(~bad))


def read_set_file(path: str) -> list[int]:
    """One integer per line; blank lines and ``#`` comments ignored."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(int(line))
    return out


def evaluate_set(values) -> tuple[list[CheckResult], dict]:
    """Per-member f/g/h, set totals, decomposition summaries and applicable checks."""
    A = validate_primitive(values)
    members = [{"a": a, "p": p(a), "P": P(a), "omega": omega(a),
                "f": f_value(a).to_hex(), "g": str(g_exact(a)), "h": h_value(a).to_hex()}
               for a in A]
    decomp = {}
    for q in A.support:
        d = decompose(A, q)
        decomp[str(q)] = {"A_p": list(d.A_p), "A_p_eq": list(d.A_p_eq), "A_pp": list(d.A_pp)}
    info = {"members": members, "f": f_set(A).to_hex(), "g": g_set(A).to_hex(),
            "h": h_set(A).to_hex(), "support": A.support, "decompositions": decomp,
            "f_decimal": repr(f_set(A).mid)}
    checks = [check_partition(A)]
    for q in A.support:
        checks += check_prop_erdos(A, q)
    if 2 not in A.members:
        checks.append(check_quotient_bound(A))
    if all(a % 2 for a in A):
        checks.append(check_odd_theorem(A))
    lhs = f_set(A)
    rhs = e_gamma().value
    st = certify_less(lhs, rhs)
    checks.append(CheckResult("egamma", f"A={list(A.members)}", st, oriented(st, lhs, rhs)))
    return checks, info
