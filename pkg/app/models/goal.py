# app/models/goal.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.models.enums import LifecycleMode
from app.models.pddl import Param
from app.models.plan import Plan
from app.models.world import Literal, Time


@dataclass(frozen=True)
class PromiseTemplate:
    literal: Literal  # pattern over operator params
    offset: Optional[Time] = None  # None -> operator est_duration


@dataclass(frozen=True)
class GoalOperator:
    class_name: str
    params: Tuple[Param, ...]
    lookahead_time: Time
    precondition: Tuple[Literal, ...]
    objective: Tuple[Literal, ...]
    est_duration: Time
    promise_templates: Tuple[PromiseTemplate, ...] = ()
    required_resources: Tuple[str, ...] = ()
    priority: int = 0
    agent_param: Optional[str] = None

    @property
    def param_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    def template_offset(self, template: PromiseTemplate) -> Time:
        return self.est_duration if template.offset is None else template.offset


class ModeTraceEntry(BaseModel):
    time: int
    mode: LifecycleMode
    event: str


class Goal(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    id: str
    operator: GoalOperator = Field(exclude=True)
    binding: Dict[str, str]
    agent: str
    mode: LifecycleMode = LifecycleMode.FORMULATED
    formulated_at: int = 0
    priority: int = 0
    plan: Optional[Plan] = Field(default=None, exclude=True)
    promise_dependent: bool = False
    # Goals whose promises covered a precondition literal false at formulation time
    promise_sources: List[str] = Field(default_factory=list)
    acquired_resources: Set[str] = Field(default_factory=set)
    # Resources waited on through their `promised-` shadow lock
    deferred_resources: Set[str] = Field(default_factory=set)
    trace: List[ModeTraceEntry] = Field(default_factory=list)

    @property
    def class_name(self) -> str:
        return self.operator.class_name

    @property
    def key(self) -> Tuple[str, Tuple[Tuple[str, str], ...]]:
        """Class plus binding; equal keys describe the same candidate across formulations."""
        return (self.operator.class_name, tuple(sorted(self.binding.items())))

    def label(self) -> str:
        args = " ".join(self.binding[name] for name in self.operator.param_names)
        return f"{self.operator.class_name}({args})" if args else self.operator.class_name


class SelectionConfig(BaseModel):
    """Goal selection strategy: class priority from the operator plus per-object bonuses."""
    object_priority: Dict[str, int] = Field(default_factory=dict)
