"""Accept/reject results with located reasons, shared by all checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Reason:
    module: str
    operation: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.module}.{self.operation} @ {self.location}: {self.message}"


@dataclass
class Verdict:
    ok: bool
    reasons: tuple[Reason, ...] = ()
    warnings: tuple[str, ...] = ()
    data: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            s = "accept"
        else:
            s = "reject\n" + "\n".join(f"  - {r}" for r in self.reasons)
        for w in self.warnings:
            s += f"\n  ! {w}"
        return s


def accept(**data: Any) -> Verdict:
    return Verdict(True, data=data)


def reject(module: str, operation: str, location: str, message: str, **data: Any) -> Verdict:
    return Verdict(False, (Reason(module, operation, location, message),), data=data)
