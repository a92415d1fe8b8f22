"""Segmented odd-only sieve of Eratosthenes.

A segment ``[lo, hi)`` with even endpoints stores one byte per odd integer
``lo + 1 + 2*i``.  The prime 2 is never represented in the flags; the stream
functions emit it separately.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

DEFAULT_SEGMENT_ODDS = 1 << 20
MAX_SEGMENT_ODDS = 1 << 26
MAX_SIEVE_BOUND = 1 << 62
MAX_NTH_PRIME = 2 * 10**8


class RangeTooLarge(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> np.ndarray:
    """All primes <= limit by a plain sieve (used for base primes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def _base_primes(hi: int) -> np.ndarray:
    # round up so nearby segments share one cached table
    r = math.isqrt(max(hi - 1, 0)) + 1
    r = max(1 << max(r - 1, 1).bit_length(), 64)
    return _small_primes(r)


@dataclass(frozen=True)
class SieveSegment:
    lo: int
    hi: int
    flags: np.ndarray  # bool, flags[i] <=> lo + 1 + 2*i is prime

    def __post_init__(self):
        if not (self.lo < self.hi and self.lo % 2 == 0 and self.hi % 2 == 0):
            raise ValueError("segment endpoints must be even with lo < hi")
        self.flags.flags.writeable = False

    def odd_primes(self) -> np.ndarray:
        return self.lo + 1 + 2 * np.flatnonzero(self.flags).astype(np.int64)

    def primes(self) -> np.ndarray:
        """All primes in [lo, hi), including 2 when it lies in range."""
        odd = self.odd_primes()
        if self.lo <= 2 < self.hi:
            return np.concatenate([np.array([2], dtype=np.int64), odd])
        return odd

    def count(self) -> int:
        return int(np.count_nonzero(self.flags)) + (1 if self.lo <= 2 < self.hi else 0)


def sieve_range(lo: int, hi: int, max_odds: int = MAX_SEGMENT_ODDS) -> SieveSegment:
    """Sieve ``[lo, hi)``; odd endpoints are widened to the enclosing even ones."""
    if not (0 <= lo < hi <= MAX_SIEVE_BOUND):
        raise ValueError(f"need 0 <= lo < hi <= 2**62, got [{lo}, {hi})")
    lo -= lo & 1
    hi += hi & 1
    n = (hi - lo) // 2
    if n > max_odds:
        raise RangeTooLarge(f"segment of {n} odd entries exceeds the maximum {max_odds}")
    flags = np.ones(n, dtype=bool)
    if lo == 0:
        flags[0] = False  # 1 is not prime
    for p in _base_primes(hi)[1:].tolist():
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        flags[(start - lo - 1) // 2 :: p] = False
    return SieveSegment(lo, hi, flags)


def segment_bounds(lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS) -> list[tuple[int, int]]:
    """Partition [lo, hi) into even-aligned sieve segments of fixed size.

    Boundaries sit on multiples of ``2*segment_odds`` so that the partition of a
    range depends only on the segment size, never on where a scan resumed.
    """
    lo -= lo & 1
    hi += hi & 1
    span = 2 * segment_odds
    out = []
    cur = lo
    while cur < hi:
        nxt = min((cur // span + 1) * span, hi)
        out.append((cur, nxt))
        cur = nxt
    return out


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("PRIMVERIFY_THREADS", "1")))
    except ValueError:
        return 1


def iter_segments(lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS,
                  threads: int = 1, fn=None) -> Iterator:
    """Sieve consecutive segments covering [lo, hi), yielding in order.

    With ``fn`` given, yields ``fn(segment)`` instead; ``fn`` runs on the worker.
    At most ``2*threads`` segments are in flight at once.
    """
    bounds = segment_bounds(lo, hi, segment_odds)

    def work(b):
        seg = sieve_range(b[0], b[1], max_odds=max(segment_odds, MAX_SEGMENT_ODDS))
        return fn(seg) if fn is not None else seg

    if threads <= 1:
        for b in bounds:
            yield work(b)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        window = 2 * threads
        futures = [pool.submit(work, b) for b in bounds[:window]]
        nxt = window
        i = 0
        while i < len(futures):
            res = futures[i].result()
            futures[i] = None
            if nxt < len(bounds):
                futures.append(pool.submit(work, bounds[nxt]))
                nxt += 1
            i += 1
            yield res


def prime_arrays(lo: int, hi: int, segment_odds: int = DEFAULT_SEGMENT_ODDS,
                 threads: int = 1) -> Iterator[np.ndarray]:
    """Arrays of the primes in [lo, hi), one per segment, in increasing order."""
    for seg in iter_segments(lo, hi, segment_odds, threads):
        ps = seg.primes()
        ps = ps[(ps >= lo) & (ps < hi)]
        if len(ps):
            yield ps


def primes_up_to(x: int, segment_odds: int = DEFAULT_SEGMENT_ODDS, threads: int = 1) -> Iterator[int]:
    if x < 2:
        return
    for arr in prime_arrays(0, x + 1, segment_odds, threads):
        yield from arr.tolist()


def primes_array(x: int) -> np.ndarray:
    """All primes <= x as one int64 array."""
    if x < 2:
        return np.zeros(0, dtype=np.int64)
    parts = list(prime_arrays(0, x + 1))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def prime_count(x: int, segment_odds: int = DEFAULT_SEGMENT_ODDS, threads: int = 1) -> int:
    if x < 2:
        return 0
    total = 0
    for seg in iter_segments(0, x + 1, segment_odds, threads):
        if seg.hi <= x + 1:
            total += seg.count()
        else:
            ps = seg.primes()
            total += int(np.count_nonzero(ps <= x))
    return total


@dataclass(frozen=True)
class PrimeIndex:
    n: int
    p: int


@dataclass(frozen=True)
class PrimeGap:
    p: int
    d: int


def _nth_prime_upper(n: int) -> int:
    # p_n < n(log n + log log n) for n >= 6 (Rosser)
    if n < 6:
        return 15
    return int(n * (math.log(n) + math.log(math.log(n)))) + 2


def nth_prime(n: int, segment_odds: int = DEFAULT_SEGMENT_ODDS, threads: int = 1,
              max_n: int = MAX_NTH_PRIME) -> PrimeIndex:
    """The n-th prime, 1-based (p_1 = 2)."""
    if n < 1 or n > max_n:
        raise OutOfRange(f"n must be in [1, {max_n}], got {n}")
    seen = 0
    for seg in iter_segments(0, _nth_prime_upper(n) + 1, segment_odds, threads):
        c = seg.count()
        if seen + c >= n:
            ps = seg.primes()
            return PrimeIndex(n, int(ps[n - seen - 1]))
        seen += c
    raise AssertionError("upper bound for p_n was too small")


def prime_gaps(bound: int) -> Iterator[PrimeGap]:
    """Gaps d_p = p' - p for every prime p <= bound (p' the next prime)."""
    if bound < 3:
        raise ValueError("bound must be at least 3")
    prev = None
    for p in primes_up_to(bound):
        if prev is not None:
            yield PrimeGap(prev, p - prev)
        prev = p
    # the successor of the last prime lies beyond the bound
    yield PrimeGap(prev, next_prime(prev + 1) - prev)


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    if n <= 2:
        return 2
    lo = n - (n & 1)
    while True:
        seg = sieve_range(lo, lo + 2 * 4096)
        ps = seg.odd_primes()
        ps = ps[ps >= n]
        if len(ps):
            return int(ps[0])
        lo += 2 * 4096
