# app/models/api.py
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.report import GoalSpan, PromiseStats, RunReport


class ScenarioInfo(BaseModel):
    name: str
    description: str = ""
    agents: List[str]
    promises_enabled: bool
    tick_bound: int


class RunRequest(BaseModel):
    scenario: str = Field(..., description="Name of a shipped scenario, e.g. 's3-promises'.")
    seed: Optional[int] = None
    promises: Optional[bool] = None
    lookahead: Optional[int] = Field(default=None, ge=0, description="Forces every goal operator's lookahead (ticks).")
    include_events: bool = False


class RunSummary(BaseModel):
    scenario: str
    seed: int
    promises_enabled: bool
    completed: bool
    timed_out: bool
    makespan: Optional[int]
    final_time: int
    goal_spans: List[GoalSpan]
    utilization: Dict[str, float]
    promise_stats: PromiseStats
    invariant_violations: List[str]
    alert_count: int
    gantt: str
    events: Optional[List[dict]] = None

    @classmethod
    def from_report(cls, report: RunReport, gantt: str, include_events: bool = False) -> "RunSummary":
        return cls(
            scenario=report.scenario,
            seed=report.seed,
            promises_enabled=report.promises_enabled,
            completed=report.completed,
            timed_out=report.timed_out,
            makespan=report.makespan,
            final_time=report.final_time,
            goal_spans=report.goal_spans,
            utilization=report.utilization,
            promise_stats=report.promise_stats,
            invariant_violations=report.invariant_violations,
            alert_count=len(report.alerts),
            gantt=gantt,
            events=[e.model_dump(mode="json", exclude_none=True) for e in report.events] if include_events else None,
        )


class PlanRequest(BaseModel):
    domain: str = Field(..., description="PDDL domain text.")
    problem: str = Field(..., description="PDDL problem text, timed initial literals allowed.")
    mode: Optional[str] = Field(default=None, pattern="^(greedy|uniform)$")


class PlanResponse(BaseModel):
    outcome: str
    steps: List[str] = Field(default_factory=list)
    makespan: Optional[int] = None
    expanded: int
    valid: Optional[bool] = None
