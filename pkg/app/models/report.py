# app/models/report.py
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.enums import EventKind


class SimEvent(BaseModel):
    """One record of the run event log (one line of events.jsonl)."""
    time: int
    seq: int
    kind: EventKind
    agent: Optional[str] = None
    goal: Optional[str] = None
    goal_class: Optional[str] = None
    action: Optional[str] = None
    resource: Optional[str] = None
    detail: Dict[str, Any] = Field(default_factory=dict)

    def to_json_line(self) -> str:
        return self.model_dump_json(exclude_none=True)


class RunAlert(BaseModel):
    level: str
    logger: str
    message: str
    sim_time: Optional[int] = None
    details: Optional[str] = None


class GoalSpan(BaseModel):
    goal: str
    goal_class: str
    label: str
    agent: str
    formulated_at: int
    dispatched_at: Optional[int] = None
    ended_at: Optional[int] = None
    outcome: Optional[str] = None
    promise_dependent: bool = False


class PromiseStats(BaseModel):
    issued: int = 0
    used_in_formulation: int = 0
    stale: int = 0


class RunReport(BaseModel):
    scenario: str
    seed: int
    promises_enabled: bool
    lookahead_override: Optional[int] = None
    completed: bool = False
    timed_out: bool = False
    makespan: Optional[int] = None
    final_time: int = 0
    events: List[SimEvent] = Field(default_factory=list)
    goal_spans: List[GoalSpan] = Field(default_factory=list)
    utilization: Dict[str, float] = Field(default_factory=dict)
    promise_stats: PromiseStats = Field(default_factory=PromiseStats)
    invariant_violations: List[str] = Field(default_factory=list)
    alerts: List[RunAlert] = Field(default_factory=list)
    # Wall-clock figures are not part of the event log, replayed reports leave them empty
    planner_calls: int = 0
    planner_max_seconds: Optional[float] = None


class Comparison(BaseModel):
    scenario: str
    baseline_makespan: Optional[int]
    promises_makespan: Optional[int]
    delta: Optional[int]
    improvement_percent: Optional[float]
    formulation_deltas: Dict[str, int] = Field(default_factory=dict)


class BatchSummary(BaseModel):
    scenario: str
    seeds: List[int]
    baseline_makespans: List[Optional[int]]
    promises_makespans: List[Optional[int]]
    baseline_mean: Optional[float] = None
    baseline_std: Optional[float] = None
    promises_mean: Optional[float] = None
    promises_std: Optional[float] = None
    improvement_percent: Optional[float] = None
    planner_max_seconds: Optional[float] = None
