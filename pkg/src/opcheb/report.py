"""Pass/fail records shared by the verification routines and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .polycore import Poly, format_rational


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    data: dict[str, Any] = field(default_factory=dict)


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", **data) -> Check:
        c = Check(name, bool(passed), detail, data)
        self.checks.append(c)
        return c

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail, "data": jsonable(c.data)}
                for c in self.checks
            ],
        }

    def render(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f" - {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def jsonable(value):
    """Recursively convert Fractions and Polys into JSON-friendly values."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Poly):
        if value.field == "exact":
            return [format_rational(c) for c in value.coeffs]
        return [float(c) for c in value.coeffs]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)
