"""Ordered prefix scans over primes with resumable checkpoints.

A scan walks fixed sieve segments in increasing order.  Workers turn a segment
into per-prime term enclosures, their exclusive local prefix sums and the
segment total; the coordinator adds the running carry, hands the resulting
prefix enclosures to a kernel, and advances the carry by the segment total.
Segment boundaries depend only on the segment size, so thread count and
checkpoint/resume cycles cannot change any value.

Carry width grows by a few ulps per segment (one ``fsum`` per endpoint plus
one outward addition), not per prime.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .interval import ROUNDING_STRATEGY, Interval, IntervalArray
from .primes import DEFAULT_SEGMENT_ODDS, iter_segments, next_prime, segment_bounds

CHECKPOINT_MAGIC = "PRIMVERIFY-CKPT"
CHECKPOINT_VERSION = 1


class CheckpointError(Exception):
    pass


class CheckpointMismatch(CheckpointError):
    pass


class CorruptCheckpoint(CheckpointError):
    pass


# per-prime terms -----------------------------------------------------------


def mertens_terms(ps: np.ndarray) -> IntervalArray:
    """log(1 - 1/p)."""
    P = IntervalArray.from_ints(ps)
    x = P.reciprocal()
    return (-x).log1p()


def zhang_terms(ps: np.ndarray) -> IntervalArray:
    """1/(p log p)."""
    P = IntervalArray.from_ints(ps)
    return (P * P.log()).reciprocal()


TERMS = {"log1m": mertens_terms, "f": zhang_terms}


@dataclass
class SegmentData:
    primes: np.ndarray
    local: IntervalArray  # exclusive prefix within the segment
    total: Interval


def _segment_worker(term_kind: str, lo: int, hi: int):
    term_fn = TERMS[term_kind]

    def work(seg) -> SegmentData:
        ps = seg.primes()
        ps = ps[(ps >= lo) & (ps < hi)]
        t = term_fn(ps)
        return SegmentData(ps, t.exclusive_prefix(), t.fsum())

    return work


def prefix_sum(q: int, term_kind: str, start: int = 2, carry: Interval | None = None,
               segment_odds: int = DEFAULT_SEGMENT_ODDS) -> Interval:
    """Enclosure of sum of term(p) over primes start <= p < q."""
    total = carry if carry is not None else Interval(0.0, 0.0)
    if q <= start:
        return total
    work = _segment_worker(term_kind, start, q)
    for data in iter_segments(start, q, segment_odds, fn=work):
        total = total + data.total
    return total


# scan state and checkpoints ------------------------------------------------


@dataclass
class ScanState:
    kind: str
    bound: int
    segment_odds: int
    next_lo: int
    primes_consumed: int
    q_next: int
    prefix: Interval
    digest: str
    segments_done: int = 0
    acc: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "bound": self.bound,
            "segment_odds": self.segment_odds,
            "next_lo": self.next_lo,
            "primes_consumed": self.primes_consumed,
            "q_next": self.q_next,
            "prefix_log": self.prefix.to_hex(),
            "digest": self.digest,
            "segments_done": self.segments_done,
            "acc": self.acc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanState":
        return cls(d["kind"], d["bound"], d["segment_odds"], d["next_lo"], d["primes_consumed"],
                   d["q_next"], Interval.from_hex(d["prefix_log"]), d["digest"],
                   d["segments_done"], d["acc"])


def config_hash(kind: str, bound: int, segment_odds: int, strategy: str, extra: dict | None = None) -> str:
    blob = json.dumps({"kind": kind, "bound": bound, "segment_odds": segment_odds,
                       "strategy": strategy, "extra": extra or {}}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def checkpoint_write(path: str, state: ScanState, strategy: str, cfg_hash: str) -> None:
    body = {
        "magic": CHECKPOINT_MAGIC,
        "version": CHECKPOINT_VERSION,
        "bound": state.bound,
        "strategy": strategy,
        "config_hash": cfg_hash,
        "state": state.to_dict(),
    }
    doc = dict(body, checksum=hashlib.sha256(_canonical(body)).hexdigest())
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
    os.replace(tmp, path)


def checkpoint_read(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CorruptCheckpoint(f"unreadable checkpoint {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("magic") != CHECKPOINT_MAGIC:
        raise CorruptCheckpoint("bad magic")
    checksum = doc.pop("checksum", None)
    if checksum != hashlib.sha256(_canonical(doc)).hexdigest():
        raise CorruptCheckpoint("checksum mismatch")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointMismatch(f"unsupported checkpoint version {doc.get('version')}")
    return doc


def checkpoint_resume(path: str, kind: str, bound: int, segment_odds: int, strategy: str,
                      cfg_hash: str) -> ScanState:
    doc = checkpoint_read(path)
    if doc["strategy"] != strategy:
        raise CheckpointMismatch(f"rounding strategy {doc['strategy']!r} != {strategy!r}")
    if doc["bound"] != bound:
        raise CheckpointMismatch(f"checkpoint bound {doc['bound']} != {bound}")
    if doc["config_hash"] != cfg_hash:
        raise CheckpointMismatch("configuration hash differs")
    try:
        state = ScanState.from_dict(doc["state"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptCheckpoint(f"malformed state: {exc}") from exc
    if state.kind != kind or state.segment_odds != segment_odds:
        raise CheckpointMismatch("checkpoint belongs to a different scan")
    return state


# the scan driver -------------------------------------------------------------


Kernel = Callable[[np.ndarray, IntervalArray, dict], tuple[np.ndarray, IntervalArray]]


def run_prefix_scan(kind: str, term_kind: str, bound: int, kernel: Kernel, *,
                    threads: int = 1, segment_odds: int = DEFAULT_SEGMENT_ODDS,
                    checkpoint_path: str | None = None, resume: bool = False,
                    checkpoint_every: int = 1, max_segments: int | None = None,
                    strategy: str = ROUNDING_STRATEGY, extra_config: dict | None = None,
                    init_acc: Callable[[], dict] = dict) -> tuple[ScanState, bool]:
    """Scan primes 2 <= q <= bound.

    ``kernel(primes, prefix, acc)`` receives the prefix enclosures
    ``sum_{p<q} term(p)`` for each prime of a segment, updates ``acc`` in place
    and returns (status codes, verdict-oriented margins) for fingerprinting.
    Returns the final state and whether the scan reached the bound.
    """
    if strategy != ROUNDING_STRATEGY:
        raise CheckpointMismatch(f"unsupported rounding strategy {strategy!r}")
    cfg = config_hash(kind, bound, segment_odds, strategy, extra_config)
    state = None
    if resume and checkpoint_path and os.path.exists(checkpoint_path):
        state = checkpoint_resume(checkpoint_path, kind, bound, segment_odds, strategy, cfg)
    if state is None:
        state = ScanState(kind, bound, segment_odds, 0, 0, 2, Interval(0.0, 0.0),
                          hashlib.sha256(cfg.encode()).hexdigest(), 0, init_acc())
    end = bound + 1
    if state.next_lo >= end:
        return state, True
    work = _segment_worker(term_kind, 2, end)
    remaining = segment_bounds(state.next_lo, end, segment_odds)
    done_here = 0
    for (_, seg_hi), data in zip(remaining, iter_segments(state.next_lo, end, segment_odds, threads, fn=work)):
        if len(data.primes):
            prefix = data.local + state.prefix
            codes, margins = kernel(data.primes, prefix, state.acc)
            h = hashlib.sha256(state.digest.encode())
            h.update(data.primes.astype("<i8").tobytes())
            h.update(np.asarray(codes, dtype=np.int8).tobytes())
            h.update(margins.lo.astype("<f8").tobytes())
            h.update(margins.hi.astype("<f8").tobytes())
            state.digest = h.hexdigest()
            state.prefix = state.prefix + data.total
            state.primes_consumed += len(data.primes)
        state.next_lo = seg_hi
        state.q_next = next_prime(seg_hi)
        state.segments_done += 1
        done_here += 1
        finished = state.next_lo >= end
        if checkpoint_path and (finished or state.segments_done % checkpoint_every == 0):
            checkpoint_write(checkpoint_path, state, strategy, cfg)
        if max_segments is not None and done_here >= max_segments and not finished:
            if checkpoint_path:
                checkpoint_write(checkpoint_path, state, strategy, cfg)
            return state, False
    return state, True
