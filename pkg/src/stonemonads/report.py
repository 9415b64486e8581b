"""Verdict reports produced by the law checkers."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from .errors import LawViolation

MAX_STORED = 20


@dataclass
class LawReport:
    """Outcome of an exhaustive (or capped) law check.

    ``checks`` counts instances actually verified, ``skipped`` counts
    instances whose evaluation left the bounded universe, and ``partial``
    is set when the check cap stopped enumeration early.
    """

    name: str
    checks: int = 0
    skipped: int = 0
    violation_count: int = 0
    violations: list[dict[str, Any]] = field(default_factory=list)
    partial: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def ok(self) -> None:
        self.checks += 1

    def fail(self, **witness: Any) -> None:
        self.checks += 1
        self.violation_count += 1
        if len(self.violations) < MAX_STORED:
            self.violations.append(_jsonable(witness))

    def check(self, condition: bool, **witness: Any) -> bool:
        if condition:
            self.ok()
        else:
            self.fail(**witness)
        return condition

    def merge(self, other: LawReport) -> LawReport:
        self.checks += other.checks
        self.skipped += other.skipped
        self.violation_count += other.violation_count
        room = MAX_STORED - len(self.violations)
        self.violations.extend(
            dict(v, law=v.get("law", other.name)) for v in other.violations[:room]
        )
        self.partial = self.partial or other.partial
        return self

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name}: {status} ({self.checks} checks"
        if self.skipped:
            text += f", {self.skipped} out of bounds"
        if self.violation_count:
            text += f", {self.violation_count} violations"
        if self.partial:
            text += ", partial"
        text += ")"
        if self.violations:
            text += f"; first witness {self.violations[0]}"
        return text

    def require(self, exc_type: type[LawViolation] = LawViolation) -> LawReport:
        if not self.passed:
            raise exc_type(self)
        return self

    def to_dict(self) -> dict[str, Any]:
        return dict(asdict(self), passed=self.passed)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LawReport:
        data = {k: v for k, v in data.items() if k != "passed"}
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(value: Any) -> Any:
    """Convert witnesses (terms, tuples, ...) into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)
