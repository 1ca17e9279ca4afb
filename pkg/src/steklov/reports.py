"""Structured pass/fail records and deterministic serialization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional


def fmt(x) -> str:
    """Shortest round-trip decimal for floats, str() for everything else."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return repr(x)
    return str(x)


def _clean(obj):
    # numpy scalars/arrays -> plain python so json output is stable
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: dict = field(default_factory=dict)
    expected_fail: bool = False

    @property
    def ok(self) -> bool:
        """True when the outcome matches expectation."""
        return self.passed != self.expected_fail


@dataclass
class VerificationReport:
    name: str
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, margin: float, expected_fail: bool = False, **detail) -> Check:
        c = Check(name, bool(passed), float(margin), detail, expected_fail)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport", prefix: Optional[str] = None):
        for c in other.checks:
            name = f"{prefix}/{c.name}" if prefix else c.name
            self.checks.append(Check(name, c.passed, c.margin, dict(c.detail), c.expected_fail))

    @property
    def passed(self) -> bool:
        """All checks behave as expected (expected failures must fail)."""
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "meta": _clean(self.meta),
            "checks": [_clean(asdict(c)) for c in self.checks],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def summary(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            tag = "pass" if c.passed else "fail"
            if c.expected_fail:
                tag += " (expected fail)"
            lines.append(f"  {c.name}: {tag}, margin {fmt(c.margin)}")
        return "\n".join(lines)
