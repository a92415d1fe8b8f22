"""Verification reports: per-check results, exit statuses, serialization."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

from . import __version__
from .interval import ROUNDING_STRATEGY, Interval, Status

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_CONFIG = 2
EXIT_INDETERMINATE = 3

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = ("check_id", "subject", "status", "margin_lo_hex", "margin_hi_hex")


def margin_dict(m: Interval | None) -> dict | None:
    if m is None:
        return None
    return {"lo_hex": m.lo.hex(), "hi_hex": m.hi.hex(), "lo": repr(m.lo), "hi": repr(m.hi)}


@dataclass
class CheckResult:
    """One inequality check.

    ``margin`` is oriented toward the verdict: for a Certified check it encloses
    (right side - left side), for a Refuted one (left side - right side), so a
    decided check always has a positive margin.
    """

    check_id: str
    subject: str
    status: Status
    margin: Interval | None = None
    expected_refuted: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        if self.expected_refuted:
            return self.status is Status.REFUTED
        return self.status is Status.CERTIFIED

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "subject": self.subject,
            "status": self.status.value,
            "expected_refuted": self.expected_refuted,
            "margin": margin_dict(self.margin),
            "detail": self.detail,
        }


def oriented(status: Status, lhs: Interval, rhs: Interval) -> Interval | None:
    """Margin of ``lhs < rhs`` oriented toward the verdict."""
    if status is Status.REFUTED:
        return lhs - rhs
    return rhs - lhs


@dataclass
class VerificationReport:
    command: str
    config: dict
    checks: list[CheckResult]
    summary: dict = field(default_factory=dict)
    scan_digests: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    complete: bool = True
    details: dict = field(default_factory=dict)

    def exit_status(self) -> int:
        if any(not c.ok and c.status is not Status.INDETERMINATE for c in self.checks):
            return EXIT_REFUTED
        # a scan stopped early has not decided its whole range
        if not self.complete or any(c.status is Status.INDETERMINATE for c in self.checks):
            return EXIT_INDETERMINATE
        return EXIT_OK

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for c in self.checks:
            m = c.margin
            h.update(f"{c.check_id}|{c.subject}|{c.status.value}|{c.expected_refuted}|".encode())
            if m is not None:
                h.update(f"{m.lo.hex()}|{m.hi.hex()}".encode())
            h.update(b"\n")
        for d in self.scan_digests:
            h.update(d.encode())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "config": self.config,
            "rounding_strategy": ROUNDING_STRATEGY,
            "complete": self.complete,
            "exit_status": self.exit_status(),
            "summary": self.summary,
            "details": self.details,
            "checks": [c.to_dict() for c in self.checks],
            "failures": [c.to_dict() for c in self.checks if not c.ok],
            "wall_time": self.wall_time,
            "fingerprint": self.fingerprint(),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.checks:
            m = c.margin
            w.writerow([c.check_id, c.subject, c.status.value,
                        m.lo.hex() if m else "", m.hi.hex() if m else ""])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.command}: exit {self.exit_status()}  fingerprint {self.fingerprint()[:16]}"]
        for k, v in self.summary.items():
            lines.append(f"  {k}: {v}")
        for c in self.checks:
            tag = "ok " if c.ok else "BAD"
            m = f"  margin [{c.margin.lo:.6e}, {c.margin.hi:.6e}]" if c.margin else ""
            exp = " (expected)" if c.expected_refuted else ""
            lines.append(f"  [{tag}] {c.check_id} {c.subject}: {c.status.value}{exp}{m}")
        lines.append(f"  wall time {self.wall_time:.2f}s")
        return "\n".join(lines)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
