"""Outward-rounded binary64 interval arithmetic.

Every endpoint produced here is pushed one representable value outward with
``math.nextafter`` after the round-to-nearest operation.  Round-to-nearest is
off by at most half an ulp, so one step outward always yields a valid bound.
Library transcendentals (``math.log``, ``math.exp``, ``math.log1p``) are not
guaranteed correctly rounded; their results are widened by ``LIBM_SLACK_ULPS``
steps in each direction.

The vectorized counterpart, :class:`IntervalArray`, applies the same rules to
numpy arrays and is used by the prime scans.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INF = math.inf

LIBM_SLACK_ULPS = 2
NUMPY_SLACK_ULPS = 4

ROUNDING_STRATEGY = "nextafter-outward/binary64/libm+2ulp/numpy+4ulp"


class Status(str, enum.Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    INDETERMINATE = "Indeterminate"


class IntervalError(ArithmeticError):
    pass


def down(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, -INF)
    return x


def up(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, INF)
    return x


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise IntervalError("NaN endpoint")
        if self.lo > self.hi:
            raise IntervalError(f"empty interval [{self.lo!r}, {self.hi!r}]")

    # construction -----------------------------------------------------

    @classmethod
    def point(cls, x: float) -> "Interval":
        x = float(x)
        return cls(x, x)

    @classmethod
    def from_int(cls, n: int) -> "Interval":
        x = float(n)
        if int(x) == n:
            return cls(x, x)
        return cls(down(x), up(x))

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> "Interval":
        q = Fraction(q)
        x = float(q)
        if Fraction(x) == q:
            return cls(x, x)
        return cls(down(x), up(x))

    @classmethod
    def from_decimal(cls, text: str) -> "Interval":
        """Enclose a decimal literal exactly (the literal itself is the value)."""
        return cls.from_fraction(Fraction(text))

    @classmethod
    def hull(cls, *items: "Interval") -> "Interval":
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    # queries ----------------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (Fraction, int)):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def to_hex(self) -> dict:
        return {"lo": self.lo.hex(), "hi": self.hi.hex()}

    @classmethod
    def from_hex(cls, d: dict) -> "Interval":
        return cls(float.fromhex(d["lo"]), float.fromhex(d["hi"]))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return Interval.from_int(x)
        if isinstance(x, Fraction):
            return Interval.from_fraction(x)
        return Interval.point(x)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        o = Interval._coerce(other)
        return Interval(down(self.lo + o.lo), up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = Interval._coerce(other)
        return Interval(down(self.lo - o.hi), up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        return Interval._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if self.lo >= 0 and o.lo >= 0:
            return Interval(down(self.lo * o.lo), up(self.hi * o.hi))
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(down(min(prods)), up(max(prods)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        quots = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(down(min(quots)), up(max(quots)))

    def __rtruediv__(self, other) -> "Interval":
        return Interval._coerce(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            raise TypeError("only nonnegative integer powers")
        out = Interval(1.0, 1.0)
        if self.lo >= 0:
            for _ in range(k):
                out = out * self
            return out
        if k % 2 == 0:
            m = Interval(0.0 if self.lo <= 0 <= self.hi else min(abs(self.lo), abs(self.hi)),
                         max(abs(self.lo), abs(self.hi)))
            return m ** k
        for _ in range(k):
            out = out * self
        return out

    def scale2(self, e: int) -> "Interval":
        """Exact multiplication by 2**e (barring over/underflow)."""
        return Interval(math.ldexp(self.lo, e), math.ldexp(self.hi, e))


# elementary functions --------------------------------------------------


def iv_add(a: Interval, b: Interval) -> Interval:
    return a + b


def iv_sub(a: Interval, b: Interval) -> Interval:
    return a - b


def iv_mul(a: Interval, b: Interval) -> Interval:
    return a * b


def iv_div(a: Interval, b: Interval) -> Interval:
    return a / b


def iv_log(a: Interval) -> Interval:
    if a.lo <= 0:
        raise ValueError("log of an interval with nonpositive lower endpoint")
    lo = 0.0 if a.lo == 1.0 else down(math.log(a.lo), LIBM_SLACK_ULPS)
    hi = 0.0 if a.hi == 1.0 else up(math.log(a.hi), LIBM_SLACK_ULPS)
    return Interval(lo, hi)


def iv_exp(a: Interval) -> Interval:
    lo = 1.0 if a.lo == 0.0 else max(0.0, down(math.exp(a.lo), LIBM_SLACK_ULPS))
    hi = 1.0 if a.hi == 0.0 else up(math.exp(a.hi), LIBM_SLACK_ULPS)
    return Interval(lo, hi)


def iv_log1p(a: Interval) -> Interval:
    if a.lo <= -1.0:
        raise ValueError("log1p argument must exceed -1")
    lo = 0.0 if a.lo == 0.0 else down(math.log1p(a.lo), LIBM_SLACK_ULPS)
    hi = 0.0 if a.hi == 0.0 else up(math.log1p(a.hi), LIBM_SLACK_ULPS)
    return Interval(lo, hi)


def iv_sqrt(a: Interval) -> Interval:
    if a.lo < 0:
        raise ValueError("sqrt of negative interval")
    # math.sqrt is correctly rounded (IEEE 754)
    return Interval(max(0.0, down(math.sqrt(a.lo))), up(math.sqrt(a.hi)))


def iv_log1p_neg_recip(p: int) -> Interval:
    """Enclosure of log(1 - 1/p)."""
    if p < 2:
        raise ValueError("p must be at least 2")
    x = Interval(1.0, 1.0) / Interval.from_int(p)
    # log1p(-x) is decreasing in x
    return Interval(down(math.log1p(-x.hi), LIBM_SLACK_ULPS), up(math.log1p(-x.lo), LIBM_SLACK_ULPS))


def iv_fsum(items) -> Interval:
    """Sum of intervals with a single outward rounding per endpoint.

    ``math.fsum`` returns the correctly rounded exact sum, so one step outward
    encloses the exact sum of the endpoints.
    """
    items = list(items)
    if not items:
        return Interval(0.0, 0.0)
    return Interval(down(math.fsum(i.lo for i in items)), up(math.fsum(i.hi for i in items)))


def certify_less(a: Interval, b: Interval) -> Status:
    """Decide a < b from enclosures."""
    if a.hi < b.lo:
        return Status.CERTIFIED
    if a.lo > b.hi:
        return Status.REFUTED
    return Status.INDETERMINATE


# certified constants -----------------------------------------------------


class Provenance(str, enum.Enum):
    ANCHORED = "paper-anchored"
    COMPUTED = "computed"
    EXTERNAL = "external-literature"


@dataclass(frozen=True)
class CertifiedConstant:
    name: str
    value: Interval
    provenance: Provenance
    budget: float = math.inf
    note: str = ""

    def __post_init__(self):
        if not self.value.width < self.budget:
            raise IntervalError(f"{self.name}: width {self.value.width} exceeds budget {self.budget}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value.to_hex(),
            "decimal": [repr(self.value.lo), repr(self.value.hi)],
            "width": self.value.width,
            "provenance": self.provenance.value,
            "note": self.note,
        }


# 36 significant digits; re-derived independently in the test suite
EULER_GAMMA_DIGITS = "0.577215664901532860606512090082402431"
EXP_EULER_GAMMA_DIGITS = "1.78107241799019798523650410310717955"
# the exact values lie within one unit of the last digit of these literals
_LAST_DIGIT = Fraction(1, 10**36)


def _literal_enclosure(digits: str) -> Interval:
    q = Fraction(digits)
    return Interval(Interval.from_fraction(q - _LAST_DIGIT).lo, Interval.from_fraction(q + _LAST_DIGIT).hi)


def euler_gamma() -> CertifiedConstant:
    return CertifiedConstant("euler_gamma", _literal_enclosure(EULER_GAMMA_DIGITS),
                             Provenance.COMPUTED, budget=1e-12,
                             note="36-digit literal, outward rounded")


def e_gamma() -> CertifiedConstant:
    return CertifiedConstant("e_gamma", _literal_enclosure(EXP_EULER_GAMMA_DIGITS),
                             Provenance.ANCHORED, budget=1e-12,
                             note="exp(euler_gamma); 1.781072... as quoted")


# exact rational identities -------------------------------------------------

MAX_RATIONAL_PRIME = 200


def rational_mertens_identity(r: int) -> tuple[Fraction, Fraction]:
    """Both sides of sum_{p<=r} g(p) = 1 - prod_{p<=r} (1 - 1/p), exactly.

    g(p) = (1/p) prod_{p'<p} (1 - 1/p').  Denominators are primorials, hence the
    cap on r.
    """
    if r > MAX_RATIONAL_PRIME:
        raise OverflowError(f"r = {r} exceeds the rational limit {MAX_RATIONAL_PRIME}")
    if r < 2 or any(r % d == 0 for d in range(2, math.isqrt(r) + 1)):
        raise ValueError(f"{r} is not prime")
    primes = [p for p in range(2, r + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]
    lhs = Fraction(0)
    prod = Fraction(1)
    for p in primes:
        lhs += prod / p
        prod *= Fraction(p - 1, p)
    return lhs, 1 - prod


# vectorized intervals ----------------------------------------------------


def _np_down(x: np.ndarray, steps: int = 1) -> np.ndarray:
    for _ in range(steps):
        x = np.nextafter(x, -np.inf)
    return x


def _np_up(x: np.ndarray, steps: int = 1) -> np.ndarray:
    for _ in range(steps):
        x = np.nextafter(x, np.inf)
    return x


class IntervalArray:
    """Elementwise outward-rounded intervals over float64 arrays."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)

    @classmethod
    def from_ints(cls, n: np.ndarray) -> "IntervalArray":
        x = np.asarray(n).astype(np.float64)
        # integers below 2**53 convert exactly
        if x.size and np.max(np.abs(x)) >= 2.0**53:
            raise ValueError("integers too large for exact conversion")
        return cls(x, x.copy())

    @classmethod
    def broadcast(cls, iv: Interval, n: int) -> "IntervalArray":
        return cls(np.full(n, iv.lo), np.full(n, iv.hi))

    def __len__(self) -> int:
        return len(self.lo)

    def __getitem__(self, i):
        if isinstance(i, (int, np.integer)):
            return Interval(float(self.lo[i]), float(self.hi[i]))
        return IntervalArray(self.lo[i], self.hi[i])

    def _pair(self, other):
        if isinstance(other, IntervalArray):
            return other.lo, other.hi
        if isinstance(other, Interval):
            return other.lo, other.hi
        o = Interval._coerce(other)
        return o.lo, o.hi

    def __add__(self, other) -> "IntervalArray":
        olo, ohi = self._pair(other)
        return IntervalArray(_np_down(self.lo + olo), _np_up(self.hi + ohi))

    __radd__ = __add__

    def __sub__(self, other) -> "IntervalArray":
        olo, ohi = self._pair(other)
        return IntervalArray(_np_down(self.lo - ohi), _np_up(self.hi - olo))

    def __rsub__(self, other) -> "IntervalArray":
        olo, ohi = self._pair(other)
        return IntervalArray(_np_down(olo - self.hi), _np_up(ohi - self.lo))

    def __neg__(self) -> "IntervalArray":
        return IntervalArray(-self.hi, -self.lo)

    def __mul__(self, other) -> "IntervalArray":
        olo, ohi = self._pair(other)
        p = np.stack(np.broadcast_arrays(self.lo * olo, self.lo * ohi, self.hi * olo, self.hi * ohi))
        return IntervalArray(_np_down(p.min(axis=0)), _np_up(p.max(axis=0)))

    __rmul__ = __mul__

    def reciprocal(self) -> "IntervalArray":
        if np.any((self.lo <= 0) & (self.hi >= 0)):
            raise ZeroDivisionError("interval divisor contains zero")
        return IntervalArray(_np_down(1.0 / self.hi), _np_up(1.0 / self.lo))

    def __truediv__(self, other) -> "IntervalArray":
        if isinstance(other, IntervalArray):
            return self * other.reciprocal()
        o = Interval._coerce(other)
        return self * (Interval(1.0, 1.0) / o)

    def __rtruediv__(self, other) -> "IntervalArray":
        return self.reciprocal() * other

    def log(self) -> "IntervalArray":
        if np.any(self.lo <= 0):
            raise ValueError("log of nonpositive interval")
        return IntervalArray(_np_down(np.log(self.lo), NUMPY_SLACK_ULPS),
                             _np_up(np.log(self.hi), NUMPY_SLACK_ULPS))

    def exp(self) -> "IntervalArray":
        return IntervalArray(np.maximum(_np_down(np.exp(self.lo), NUMPY_SLACK_ULPS), 0.0),
                             _np_up(np.exp(self.hi), NUMPY_SLACK_ULPS))

    def log1p(self) -> "IntervalArray":
        if np.any(self.lo <= -1):
            raise ValueError("log1p argument must exceed -1")
        return IntervalArray(_np_down(np.log1p(self.lo), NUMPY_SLACK_ULPS),
                             _np_up(np.log1p(self.hi), NUMPY_SLACK_ULPS))

    def fsum(self) -> Interval:
        if len(self.lo) == 0:
            return Interval(0.0, 0.0)
        return Interval(down(math.fsum(self.lo.tolist())), up(math.fsum(self.hi.tolist())))

    def exclusive_prefix(self) -> "IntervalArray":
        """Enclosures of the partial sums of all preceding entries.

        Uses the float cumulative sum plus the standard recursive-summation
        bound: each addition errs by at most u*|partial| with u = 2**-53, so
        after j additions the error is at most j*u*max|partial|.
        """
        n = len(self.lo)
        out_lo = np.zeros(n)
        out_hi = np.zeros(n)
        if n <= 1:
            return IntervalArray(out_lo, out_hi)
        for src, dst, sign in ((self.lo, out_lo, -1.0), (self.hi, out_hi, 1.0)):
            c = np.cumsum(src[:-1])
            running_max = np.maximum.accumulate(np.abs(c))
            j = np.arange(1, n, dtype=np.float64)
            err = _np_up(j * running_max * 2.0**-52)
            dst[1:] = _np_up(c + err) if sign > 0 else _np_down(c - err)
        return IntervalArray(out_lo, out_hi)

    def certify_less_than(self, other) -> np.ndarray:
        """Elementwise status codes: 1 certified, -1 refuted, 0 indeterminate."""
        olo, ohi = self._pair(other)
        codes = np.zeros(np.broadcast(self.lo, olo).shape, dtype=np.int8)
        codes[self.hi < olo] = 1
        codes[self.lo > ohi] = -1
        return codes
