# app/models/plan.py
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

from app.core.exceptions import ContractViolation
from app.models.enums import PlanOutcome
from app.models.world import Atom, Literal, Time


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: Tuple[str, ...]
    precondition: FrozenSet[Literal]
    adds: FrozenSet[Atom]
    dels: FrozenSet[Atom]
    duration: Time

    def __post_init__(self):
        if self.adds & self.dels:
            raise ContractViolation(f"Ground action {self.label} adds and deletes the same atom")

    @property
    def label(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class TimedAction:
    start: Time
    action: GroundAction

    @property
    def end(self) -> Time:
        return self.start + self.action.duration


@dataclass(frozen=True)
class Plan:
    steps: Tuple[TimedAction, ...] = ()

    def __post_init__(self):
        previous_end = 0
        for step in self.steps:
            if step.start < previous_end:
                raise ContractViolation(
                    f"Plan is not sequential: {step.action.label} starts at {step.start} before {previous_end}"
                )
            previous_end = step.end

    @property
    def makespan(self) -> Time:
        return self.steps[-1].end if self.steps else 0

    def __len__(self) -> int:
        return len(self.steps)

    def to_lines(self) -> Tuple[str, ...]:
        return tuple(f"{s.start} {s.action.duration} {s.action.label}" for s in self.steps)


@dataclass(frozen=True)
class PlanResult:
    outcome: PlanOutcome
    plan: Optional[Plan] = None
    expanded: int = 0
    wall_seconds: float = 0.0

    @property
    def solved(self) -> bool:
        return self.outcome == PlanOutcome.SOLVED


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failed_step: Optional[int] = None
    failed_action: Optional[str] = None
    reason: Optional[str] = None
    end_time: Time = 0
