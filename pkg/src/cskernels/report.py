"""Structured results shared by the probes and the verification suites."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional


SCHEMA_VERSION = 1


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class CheckRecord:
    name: str
    measured: Any
    passed: bool
    params: dict = field(default_factory=dict)
    expected: Optional[Any] = None
    tolerance: Optional[float] = None

    def to_dict(self) -> dict:
        return _plain(asdict(self))


@dataclass
class ProbeReport:
    suite: str
    records: list[CheckRecord] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, name, measured, passed, *, params=None, expected=None, tolerance=None):
        rec = CheckRecord(
            name=name,
            measured=measured,
            passed=bool(passed),
            params=dict(params or {}),
            expected=expected,
            tolerance=tolerance,
        )
        self.records.append(rec)
        return rec

    def extend(self, other: "ProbeReport", prefix: str = "") -> None:
        for r in other.records:
            self.records.append(
                CheckRecord(prefix + r.name, r.measured, r.passed, r.params, r.expected, r.tolerance)
            )

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "passed": self.passed,
            "config": _plain(self.config),
            "info": _plain(self.info),
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self, **kw) -> str:
        kw.setdefault("indent", 2)
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "ProbeReport":
        rep = cls(suite=data["suite"], config=data.get("config", {}), info=data.get("info", {}))
        for r in data.get("records", []):
            rep.records.append(CheckRecord(**r))
        return rep
