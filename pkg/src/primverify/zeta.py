"""Certified real zeta values and rigorous quadrature of log zeta.

Euler-Maclaurin for real s > 1 with cutoff M and J correction terms::

    zeta(s) = sum_{n<M} n^-s + M^(1-s)/(s-1) + M^-s/2
              + sum_{j=1..J} B_2j/(2j)! * s(s+1)...(s+2j-2) * M^(1-s-2j) + R

The remainder is ``(-1)^(2J+1) * int_M^inf P_2J(x)/(2J)! f^(2J)(x) dx`` for
``f(x) = x^-s``.  Since ``|P_2J| <= |B_2J|`` and ``f^(2J)`` has one sign,
``|R| <= |B_2J|/(2J)! * |f^(2J-1)(M)|``, which is the magnitude of the last
correction term kept.  That bound is folded into the enclosure.

Quadrature brackets rely on complete monotonicity.  For any prime cutoff N,
``log zeta_N(s) = sum_{p>N} sum_m p^-ms / m`` has derivatives of alternating
sign, so every even derivative is nonnegative.  The error of n-point
Gauss-Legendre is a positive multiple of ``f^(2n)`` and that of n-point
Gauss-Lobatto a negative multiple of ``f^(2n-2)``; hence on every panel the
Gauss sum is a lower bound and the Lobatto sum an upper bound for the integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .interval import Interval, iv_exp, iv_log, iv_log1p, down, up

EM_TERMS_N = 20
EM_BERNOULLI_J = 15


class ZetaDomainError(ValueError):
    pass


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b[n]


@lru_cache(maxsize=None)
def _em_coeffs(J: int) -> tuple[Interval, ...]:
    return tuple(Interval.from_fraction(bernoulli(2 * j) / math.factorial(2 * j)) for j in range(1, J + 1))


@lru_cache(maxsize=None)
def _log_int(n: int) -> Interval:
    return iv_log(Interval.from_int(n))


@dataclass(frozen=True)
class ZetaEvaluation:
    s: Interval
    value: Interval
    terms_used: int
    remainder_bound: Interval


def zeta_em(x: Interval, M: int = EM_TERMS_N, J: int = EM_BERNOULLI_J) -> ZetaEvaluation:
    """Enclosure of zeta(1 + x) for an interval x > 0.

    Taking the offset ``x = s - 1`` as input keeps the pole term exact near 1.
    """
    if x.lo <= 0:
        raise ZetaDomainError("zeta needs s > 1")
    s = x + 1
    total = Interval(1.0, 1.0)
    for n in range(2, M):
        total = total + iv_exp(-(s * _log_int(n)))
    logM = _log_int(M)
    m_pow = iv_exp(-(s * logM))  # M^-s
    total = total + iv_exp(-(x * logM)) / x + m_pow.scale2(-1)
    rising = s  # s(s+1)...(s+2j-2)
    m_inv2 = Interval(1.0, 1.0) / Interval.from_int(M * M)
    m_term = m_pow / Interval.from_int(M)  # M^(-s-1)
    last = Interval(0.0, 0.0)
    coeffs = _em_coeffs(J)
    for j in range(1, J + 1):
        last = coeffs[j - 1] * rising * m_term
        total = total + last
        rising = rising * (s + (2 * j - 1)) * (s + 2 * j)
        m_term = m_term * m_inv2
    r = max(abs(last.lo), abs(last.hi))
    rem = Interval(-r, r)
    return ZetaEvaluation(s, total + rem, M + J, rem)


def zeta_real(s: float) -> ZetaEvaluation:
    """Certified enclosure of zeta(s) for real s >= 1 + 1e-6."""
    if not s >= 1 + 1e-6:
        raise ZetaDomainError(f"zeta_real needs s >= 1 + 1e-6, got {s}")
    x = Interval.point(s) - 1
    ev = zeta_em(x)
    return ZetaEvaluation(Interval.point(s), ev.value, ev.terms_used, ev.remainder_bound)


@lru_cache(maxsize=None)
def _primes_to(N: int) -> tuple[int, ...]:
    return tuple(p for p in range(2, N + 1) if all(p % q for q in range(2, math.isqrt(p) + 1)))


def log_zeta_cut(x: Interval, N: int) -> Interval:
    """Enclosure of log zeta_N(1 + x), zeta_N(s) = zeta(s) * prod_{p<=N} (1 - p^-s)."""
    out = iv_log(zeta_em(x).value)
    s = x + 1
    for p in _primes_to(N):
        out = out + iv_log1p(-iv_exp(-(s * _log_int(p))))
    return out


# Gauss-Legendre and Gauss-Lobatto rules ----------------------------------


def _legendre_mp(n, t):
    p0, p1 = 1, t
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
    return p1, p0  # P_n, P_{n-1}


@lru_cache(maxsize=None)
def gauss_rules(n: int) -> tuple[tuple, tuple]:
    """(Gauss-Legendre n-point, Gauss-Lobatto n-point) rules on [-1, 1].

    Nodes and weights are computed at 50 digits and each is returned as an
    Interval holding the float neighbours of the high-precision value.
    """
    from mpmath import mp, mpf, cos, pi

    with mp.workdps(50):
        gl = []
        for i in range(1, n + 1):
            t = cos(pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                pn, pm = _legendre_mp(n, t)
                dp = n * (t * pn - pm) / (t * t - 1)
                dt = pn / dp
                t -= dt
                if abs(dt) < mpf(10) ** -45:
                    break
            pn, pm = _legendre_mp(n, t)
            dp = n * (t * pn - pm) / (t * t - 1)
            gl.append((t, 2 / ((1 - t * t) * dp * dp)))
        # Lobatto interior nodes are the roots of P'_{n-1}
        lob = [(mpf(-1), mpf(2) / (n * (n - 1))), (mpf(1), mpf(2) / (n * (n - 1)))]
        m = n - 1
        for i in range(1, n - 1):
            t = cos(pi * i / m)
            for _ in range(200):
                pm_, pmm = _legendre_mp(m, t)
                d1 = m * (t * pm_ - pmm) / (t * t - 1)
                d2 = (2 * t * d1 - m * (m + 1) * pm_) / (1 - t * t)
                dt = d1 / d2
                t -= dt
                if abs(dt) < mpf(10) ** -45:
                    break
            pm_, _ = _legendre_mp(m, t)
            lob.append((t, 2 / (n * (n - 1) * pm_ * pm_)))

        def enclose(v):
            f = float(v)
            return Interval(down(f), up(f))

        gl_iv = tuple((enclose(t), enclose(w)) for t, w in gl)
        lob_iv = tuple((enclose(t), enclose(w)) for t, w in lob)
    return gl_iv, lob_iv


def bracket_panel(f, a: float, b: float, n: int = 12) -> tuple[Interval, Interval]:
    """(Gauss sum, Lobatto sum) for a completely monotone f on [a, b].

    The true integral lies in [gauss.lo, lobatto.hi].
    """
    gl, lob = gauss_rules(n)
    A, B = Interval.point(a), Interval.point(b)
    half = (B - A).scale2(-1)
    mid = (A + B).scale2(-1)

    def apply(rule):
        acc = Interval(0.0, 0.0)
        for t, w in rule:
            xi = mid + half * t
            xi = Interval(max(xi.lo, a), min(xi.hi, b))
            acc = acc + w * f(xi)
        return half * acc

    return apply(gl), apply(lob)


def integrate_cm(f, a: float, b: float, tol: float, n: int = 12, depth: int = 0) -> Interval:
    """Certified integral of a completely monotone f over [a, b]."""
    g, l = bracket_panel(f, a, b, n)
    if l.hi - g.lo <= tol or depth >= 30:
        return Interval(g.lo, l.hi)
    m = 0.5 * (a + b)
    return (integrate_cm(f, a, m, tol / 2, n, depth + 1)
            + integrate_cm(f, m, b, tol / 2, n, depth + 1))
