"""Structured verdicts returned by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
SKIPPED = "skipped"

VERDICTS = (PASS, FAIL, NOT_APPLICABLE, SKIPPED)


@dataclass
class CheckReport:
    name: str
    verdict: str
    details: dict[str, Any] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    timing_ms: float | None = None

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.name,
            "verdict": self.verdict,
            "details": self.details,
            "witnesses": self.witnesses,
            "notes": list(self.notes),
        }
        if include_timing and self.timing_ms is not None:
            out["timing_ms"] = round(self.timing_ms, 3)
        return out


def verdict_of(ok: bool) -> str:
    return PASS if ok else FAIL


def combine(verdicts: Iterable[str]) -> str:
    """Fail dominates, then pass; all-n/a stays n/a."""
    vs = list(verdicts)
    if FAIL in vs:
        return FAIL
    if PASS in vs:
        return PASS
    if SKIPPED in vs:
        return SKIPPED
    return NOT_APPLICABLE


def render_element(group, x: int) -> dict[str, Any]:
    x = int(x)
    return {"index": x, "label": group.label(x)}


def render_set(group, members: Iterable[int]) -> list[dict[str, Any]]:
    return [render_element(group, x) for x in sorted(int(m) for m in members)]
