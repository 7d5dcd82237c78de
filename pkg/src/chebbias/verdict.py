"""Shared result record for exact inequality scans."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    x: int
    left: str
    right: str


@dataclass(frozen=True)
class BiasVerdict:
    """Outcome of an exact pointwise comparison of two step functions.

    ``holds`` is True exactly when no violation exists in [x_from, x_to];
    otherwise ``first_violation`` carries the smallest violating x together
    with both exact values (rendered as decimal strings).
    """

    metric: str
    left: str
    right: str
    x_from: int
    x_to: int
    holds: bool
    first_violation: Violation | None = None
    last_violation: Violation | None = None
    conditional: str | None = None

    def __post_init__(self):
        if self.holds == (self.first_violation is not None):
            raise ValueError("holds must be True exactly when no violation is present")

    def to_json(self) -> dict:
        out = {
            "metric": self.metric,
            "left": self.left,
            "right": self.right,
            "x_from": self.x_from,
            "x_to": self.x_to,
            "holds": self.holds,
        }
        if self.first_violation is not None:
            out["first_violation"] = vars(self.first_violation)
        if self.last_violation is not None:
            out["last_violation"] = vars(self.last_violation)
        if self.conditional:
            out["conditional"] = self.conditional
        return out
