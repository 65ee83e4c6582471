"""Check records and deterministic report serialization.

Every verification routine in the package returns one or more CheckRecords.
Reports serialize to canonical JSON: keys sorted, records ordered by check id,
exact scalars rendered as fraction strings.  Timing data is carried in memory
but serialized as null unless explicitly requested, so that two runs with the
same seed produce byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import CirclePoint, QSqrt3


def jsonable(x: Any) -> Any:
    """Recursively convert exact and numpy scalars to JSON-stable values."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, QSqrt3):
        return {"a": jsonable(x.a), "b": jsonable(x.b)}
    if isinstance(x, CirclePoint):
        return {"c": jsonable(x.c), "s": jsonable(x.s)}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = list(x)
        if isinstance(x, (set, frozenset)):
            items = sorted(items, key=str)
        return [jsonable(v) for v in items]
    if hasattr(x, "item"):  # numpy scalars
        return jsonable(x.item())
    return float(x)  # mpmath mpf and anything else real-valued


@dataclass
class CheckRecord:
    """Outcome of one verification check."""

    check_id: str
    passed: bool
    samples: int = 0
    skipped: int = 0
    tolerance: float | None = None
    max_residual: float | None = None
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed_ms: float | None = None
    status: str | None = None  # "skip" marks a check not run in this mode

    def as_dict(self, timings: bool = False) -> dict:
        return {
            "check_id": self.check_id,
            "passed": self.passed,
            "samples": self.samples,
            "skipped": self.skipped,
            "tolerance": self.tolerance,
            "max_residual": jsonable(self.max_residual),
            "details": jsonable(self.details),
            "failures": jsonable(self.failures),
            "elapsed_ms": self.elapsed_ms if timings else None,
            "status": self.status,
        }

    def status_line(self) -> str:
        status = "SKIP" if self.status == "skip" else ("PASS" if self.passed else "FAIL")
        bits = [f"{status} {self.check_id}"]
        if self.samples:
            bits.append(f"samples={self.samples}")
        if self.skipped:
            bits.append(f"skipped={self.skipped}")
        if self.max_residual is not None:
            bits.append(f"max_residual={float(self.max_residual):.3e}")
        if self.tolerance is not None:
            bits.append(f"tol={self.tolerance:.1e}")
        return bits[0] + (
            " (" + ", ".join(bits[1:]) + ")" if len(bits) > 1 else ""
        )


@dataclass
class VerificationReport:
    """A bundle of check records plus the inputs that produced them."""

    records: list[CheckRecord]
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def sorted_records(self) -> list[CheckRecord]:
        return sorted(self.records, key=lambda r: r.check_id)

    def to_json(self, timings: bool = False) -> str:
        payload = {
            "passed": self.passed,
            "seed": self.seed,
            "meta": jsonable(self.meta),
            "checks": [r.as_dict(timings) for r in self.sorted_records()],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=1)

    def to_text(self) -> str:
        lines = [r.status_line() for r in self.sorted_records()]
        verdict = "ALL CHECKS PASSED" if self.passed else "VERIFICATION FAILED"
        return "\n".join(lines + [verdict])
