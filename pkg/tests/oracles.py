"""Independent reference computations shared by several test modules."""

from functools import lru_cache

import mpmath

from primverify.constants import moebius


@lru_cache(maxsize=1)
def slow_C_oracle() -> mpmath.mpf:
    """sum_{k squarefree} mu(k)/k^2 int_k^inf log zeta(t) dt by tanh-sinh quadrature.

    Written against mpmath directly: the full zeta function, no prime splitting.
    """
    with mpmath.workdps(25):
        def lz(x):  # x = t - 1
            if x < mpmath.mpf(10) ** -15:
                return -mpmath.log(x) + mpmath.euler * x
            return mpmath.log(mpmath.zeta(1 + x))
        total = mpmath.mpf(0)
        for k in range(1, 40):
            mu = moebius(k)
            if mu == 0:
                continue
            if k == 1:
                pts = [0, 1e-8, 1e-4, 0.01, 0.5, 2, 9, 39, mpmath.inf]
            else:
                pts = [k - 1, k - 0.5, k + 1, k + 7, k + 29, mpmath.inf]
            total += mpmath.mpf(mu) / k ** 2 * mpmath.quad(lz, pts)
        return total
