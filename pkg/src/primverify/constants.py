"""Certified analytic constants.

The sum ``C = sum_p 1/(p log p)`` converges like ``1/log x`` and cannot be
summed directly.  Since ``1/(p log p) = int_1^inf p^-s ds`` we have
``C = int_1^inf P(s) ds`` with P the prime zeta function.  Splitting off the
primes up to N and Moebius-inverting ``log zeta_N(s) = sum_m P_N(ms)/m``::

    C = sum_{p<=N} 1/(p log p) + sum_{k>=1} mu(k)/k^2 * int_k^inf log zeta_N(t) dt

where ``zeta_N(s) = zeta(s) prod_{p<=N}(1 - p^-s)``.  ``log zeta_N(t)`` is at
most ``sum_{n>N} n^-t <= N^(1-t)/(t-1)``, so the k-series converges like
``N^-k`` and every integral has an explicit tail.  Each integral is bracketed
panel by panel (see :mod:`primverify.zeta`); panels grow geometrically away
from the logarithmic singularity at t = 1, and the first panel ``[1, 1+d]`` is
bounded analytically from ``1/(s-1) < zeta(s) < s/(s-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .interval import (CertifiedConstant, Interval, IntervalArray, Provenance, iv_exp, iv_log,
                       iv_log1p, iv_sqrt)
from .primes import primes_array
from .zeta import _primes_to, integrate_cm, log_zeta_cut

C_CUTOFF_N = 100
C_MOEBIUS_K = 6
C_FIRST_PANEL = 2.0**-24
C_UPPER_OFFSET = 8.0  # integrate t up to k + C_UPPER_OFFSET
C_PANEL_TOL = 1e-14

C_REFERENCE_DIGITS = "1.63661632336"
EPSILON0_START_INDEX = 10**8
DELTA_N_LITERATURE = 0.00000026  # logarithmic density of non-Mertens primes (external)


class ConvergenceBudgetExceeded(RuntimeError):
    pass


def moebius(k: int) -> int:
    mu, m, d = 1, k, 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            mu = -mu
        d += 1
    return -mu if m > 1 else mu


def f_prime_interval(p: int) -> Interval:
    """1/(p log p)."""
    P = Interval.from_int(p)
    return Interval(1.0, 1.0) / (P * iv_log(P))


def _first_panel(N: int, d: float) -> Interval:
    """int_0^d log zeta_N(1+x) dx from 1/x < zeta(1+x) < (1+x)/x."""
    D = Interval.point(d)
    base = D * (1 - iv_log(D))  # int_0^d -log x dx
    L1 = Interval(0.0, 0.0)
    Ld = Interval(0.0, 0.0)
    s_d = D + 1
    for p in _primes_to(N):
        P = Interval.from_int(p)
        L1 = L1 + iv_log1p(-(Interval(1.0, 1.0) / P))
        Ld = Ld + iv_log1p(-iv_exp(-(s_d * iv_log(P))))
    # sum_p log(1 - p^-s) increases with s
    lo = base + D * L1
    hi = base + D * iv_log1p(D) + D * Ld
    return Interval(lo.lo, hi.hi)


def _upper_tail(N: int, a: float) -> Interval:
    """int_a^inf log zeta_N(t) dt lies in [0, N^(1-a) / ((a-1) log N)]."""
    A = Interval.point(a)
    logN = iv_log(Interval.from_int(N))
    b = iv_exp(-((A - 1) * logN)) / ((A - 1) * logN)
    return Interval(0.0, b.hi)


def log_zeta_integral(k: int, N: int = C_CUTOFF_N, tol: float = C_PANEL_TOL,
                      first_panel: float = C_FIRST_PANEL) -> Interval:
    """Certified enclosure of int_k^inf log zeta_N(t) dt."""
    f = lambda x: log_zeta_cut(x, N)  # noqa: E731  (x = t - 1)
    top = k - 1 + C_UPPER_OFFSET
    pieces = []
    if k == 1:
        pieces.append(_first_panel(N, first_panel))
        a = first_panel
        while a < 1.0:
            pieces.append(integrate_cm(f, a, 2 * a, tol))
            a *= 2
    else:
        a = float(k - 1)
    while a < top:
        pieces.append(integrate_cm(f, a, a + 0.5, tol))
        a += 0.5
    pieces.append(_upper_tail(N, a + 1))
    out = Interval(0.0, 0.0)
    for piece in pieces:
        out = out + piece
    return out


def _moebius_tail(N: int, K: int) -> Interval:
    """sum_{k>K} |mu(k)|/k^2 * int_k^inf log zeta_N <= N^-K / ((K+1)^2 K log N (1 - 1/N))."""
    logN = iv_log(Interval.from_int(N))
    b = (iv_exp(-(Interval.from_int(K) * logN))
         / (Interval.from_int((K + 1) ** 2 * K) * logN * (1 - Interval(1.0, 1.0) / N)))
    return Interval(-b.hi, b.hi)


@dataclass(frozen=True)
class CComputation:
    value: Interval
    prime_part: Interval
    integrals: dict
    moebius_tail: Interval


def compute_C(N: int = C_CUTOFF_N, K: int = C_MOEBIUS_K, tol: float = C_PANEL_TOL,
              first_panel: float = C_FIRST_PANEL) -> CComputation:
    prime_part = Interval(0.0, 0.0)
    for p in _primes_to(N):
        prime_part = prime_part + f_prime_interval(p)
    total = prime_part
    integrals = {}
    for k in range(1, K + 1):
        mu = moebius(k)
        if mu == 0:
            continue
        J = log_zeta_integral(k, N, tol, first_panel)
        integrals[k] = J
        total = total + Interval.from_int(mu) / Interval.from_int(k * k) * J
    tail = _moebius_tail(N, K)
    total = total + tail
    return CComputation(total, prime_part, integrals, tail)


_C_CACHE: dict = {}


def erdos_constant_C(max_width: float = 1e-9) -> CertifiedConstant:
    """Enclosure of sum_p 1/(p log p)."""
    key = max_width
    if key not in _C_CACHE:
        comp = compute_C()
        if not comp.value.width < max_width:
            raise ConvergenceBudgetExceeded(
                f"C enclosure width {comp.value.width:.3e} exceeds {max_width:.1e}")
        _C_CACHE[key] = CertifiedConstant(
            "C", comp.value, Provenance.COMPUTED, budget=max_width,
            note=f"Moebius/log-zeta integrals, N={C_CUTOFF_N}, K={C_MOEBIUS_K}")
    return _C_CACHE[key]


# Dusart's lower bound for p_n and the epsilon_0 tail -------------------------


def dusart_pn_lower(n: int) -> float:
    """n(log n + log log n - 1 + (log log n - 2.1)/log n), rounded downward."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return dusart_interval(n).lo


def dusart_array(ns: np.ndarray) -> IntervalArray:
    """Vectorized :func:`dusart_interval`."""
    N = IntervalArray.from_ints(ns)
    L = N.log()
    LL = L.log()
    return N * (L + LL - 1.0 + (LL - 2.1) / L)


def dusart_interval(n) -> Interval:
    N = n if isinstance(n, Interval) else Interval.from_int(n)
    L = iv_log(N)
    LL = iv_log(L)
    return N * (L + LL - 1 + (LL - 2.1) / L)


@dataclass(frozen=True)
class TailBound:
    start_index: int
    bound: Interval
    method: str


@lru_cache(maxsize=8)
def epsilon0_bound(start_index: int = EPSILON0_START_INDEX, step: float = 0.0005,
                   u_max: float = 600.0) -> TailBound:
    """Upper bound for sum_{n>start} 1/(5 p_n (log p_n)^4).

    With d(x) the Dusart lower bound (increasing for x >= 10^3), each term is
    at most phi(n) = 1/(5 d(n) log^4 d(n)), which decreases in n, so the sum is
    at most int_start^inf phi(x) dx.  Substituting x = e^u gives the decreasing
    integrand psi(u) = e^u phi(e^u) = 1/(5 (d/x) log^4 d); a left Riemann sum on
    a uniform u-grid bounds it above.  Beyond u_max, d/x >= u and log d >= u give
    the tail 1/(20 u_max^4).
    """
    if start_index < 1000:
        raise ValueError("start_index must be at least 1000")
    u0 = Interval.from_int(start_index)
    u0 = iv_log(u0)
    n_steps = int(math.ceil((u_max - u0.lo) / step))
    # grid u_i = u0 + i*step; enclose each node, evaluate psi at the lower node
    # end (psi decreasing) for the upper sum and at the upper node end for the lower sum
    i = np.arange(n_steps + 1, dtype=np.float64)
    offs = i * step
    u = IntervalArray(np.nextafter(offs, -np.inf), np.nextafter(offs, np.inf)) + u0
    x = u.exp()

    def psi_hi(xl):
        L = xl.log()
        LL = L.log()
        ratio = L + LL - 1.0 + (LL - 2.1) / L
        d = xl * ratio
        ld = d.log()
        den = ratio * (ld * ld) * (ld * ld) * 5.0
        return den.reciprocal()

    left = IntervalArray(x.lo[:-1], x.lo[:-1])
    right = IntervalArray(x.hi[1:], x.hi[1:])
    # consecutive grid points differ by exactly `step`
    upper = (psi_hi(left) * step).fsum()
    lower = (psi_hi(right) * step).fsum()
    U = Interval.point(float(u.lo[-1]))
    tail = Interval(1.0, 1.0) / ((U * U) * (U * U) * 20.0)
    hi = (upper + tail).hi
    lo = max(0.0, lower.lo)
    return TailBound(start_index, Interval(lo, hi), "dusart-substitution/left-riemann-in-log")


# twin-prime constants -----------------------------------------------------


def twin_prime_constants(truncation: int = 10**5) -> tuple[Interval, Interval]:
    """Enclosures of c2 = 2 prod_{p>2} (1 - 1/(p-1)^2) and c2' = prod_{p>2} (1 + 1/(p(p-2))).

    Tails beyond the truncation P use -log(1 - y) <= y/(1-y) and the telescoping
    sums sum_{m>=P} 1/(m^2-1) = (1/(P-1) + 1/P)/2 (for c2) and
    sum_{n>P} 1/(n(n-2)) = (1/(P-1) + 1/P)/2 (for c2').
    """
    ps = primes_array(truncation)
    ps = ps[ps > 2]
    P = IntervalArray.from_ints(ps)
    pm1 = P - 1.0
    y = (pm1 * pm1).reciprocal()
    log_c2 = (-y).log1p().fsum()
    z = (P * (P - 2.0)).reciprocal()
    log_c2p = z.log1p().fsum()
    T = Interval.from_int(truncation)
    tail = ((Interval(1.0, 1.0) / (T - 1)) + (Interval(1.0, 1.0) / T)).scale2(-1)
    c2 = iv_exp(log_c2 + Interval(-tail.hi, 0.0)).scale2(1)
    c2p = iv_exp(log_c2p + Interval(0.0, tail.hi))
    return c2, c2p


# race-density arithmetic ----------------------------------------------------


def race_density_bound(delta_N: float) -> tuple[float, float]:
    """epsilon = sqrt(delta)/4 and delta/epsilon + 16 epsilon (= 8 sqrt(delta))."""
    if not delta_N > 0:
        raise ValueError("delta_N must be positive")
    eps = math.sqrt(delta_N) / 4
    return eps, delta_N / eps + 16 * eps


def race_density_interval(delta_N: float) -> tuple[Interval, Interval]:
    if not delta_N > 0:
        raise ValueError("delta_N must be positive")
    D = Interval.point(delta_N)
    eps = iv_sqrt(D).scale2(-2)
    return eps, D / eps + eps * 16.0
