# app/models/scenario.py
from __future__ import annotations

import pathlib
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from app.core.config import settings
from app.models.goal import GoalOperator
from app.models.pddl import Domain
from app.models.world import Atom, Literal, Signature


class MonitorConfig(BaseModel):
    pending_timeout: int = Field(default=settings.PENDING_TIMEOUT, gt=0)
    promise_multiplier: float = Field(default=settings.PROMISE_MULTIPLIER, ge=1.0)
    max_retries: int = Field(default=settings.MAX_RETRIES, ge=0)

    def effective_timeout(self, promise_dependent: bool) -> int:
        if promise_dependent:
            return int(round(self.pending_timeout * self.promise_multiplier))
        return self.pending_timeout


class AgentConfig(BaseModel):
    id: str
    # Ticks before the agent runs its first reasoning cycle
    start_delay: int = Field(default=0, ge=0)


class FaultConfig(BaseModel):
    # Goals of these agents keep their resources when they finish or fail
    suppress_release_agents: List[str] = Field(default_factory=list)


class ScenarioConfig(BaseModel):
    """Raw scenario file contents (JSON)."""
    name: str
    description: str = ""
    domain: str
    goal_operators: str
    objects: Dict[str, List[str]]
    init: List[str]
    agents: List[AgentConfig]
    durations: Dict[str, int]
    objective: List[str]
    monitor: MonitorConfig = Field(default_factory=MonitorConfig)
    lookahead_override: Optional[int] = Field(default=None, ge=0)
    promises_enabled: bool = True
    seed: int = 0
    tick_bound: int = Field(default=20_000, gt=0)
    duration_jitter: int = Field(default=0, ge=0)
    world_latency: int = Field(default=settings.WORLD_LATENCY, ge=0)
    lock_latency: int = Field(default=settings.LOCK_LATENCY, ge=0)
    faults: FaultConfig = Field(default_factory=FaultConfig)

    @field_validator("agents")
    @classmethod
    def _at_least_one_agent(cls, agents: List[AgentConfig]) -> List[AgentConfig]:
        if not agents:
            raise ValueError("a scenario needs at least one agent")
        return agents

    @field_validator("objective")
    @classmethod
    def _objective_not_empty(cls, objective: List[str]) -> List[str]:
        if not objective:
            raise ValueError("objective must name at least one literal")
        return objective


@dataclass(frozen=True)
class Scenario:
    """A fully resolved, cross-validated scenario."""
    config: ScenarioConfig
    path: Optional[pathlib.Path]
    domain: Domain  # durations already taken from the scenario table
    operators: Tuple[GoalOperator, ...]
    signature: Signature
    init: FrozenSet[Atom]
    objective: Tuple[Literal, ...]

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def agent_ids(self) -> List[str]:
        return sorted(a.id for a in self.config.agents)

    @property
    def promises_active(self) -> bool:
        """Promises are off when disabled or when every lookahead is forced to zero."""
        return self.config.promises_enabled and self.config.lookahead_override != 0

    def lookahead_for(self, operator: GoalOperator) -> int:
        if not self.promises_active:
            return 0
        if self.config.lookahead_override is not None:
            return self.config.lookahead_override
        return operator.lookahead_time

    def with_overrides(
        self,
        seed: Optional[int] = None,
        promises: Optional[bool] = None,
        lookahead: Optional[int] = None,
        clear_lookahead: bool = False,
    ) -> "Scenario":
        update: Dict[str, object] = {}
        if seed is not None:
            update["seed"] = seed
        if promises is not None:
            update["promises_enabled"] = promises
        if lookahead is not None:
            update["lookahead_override"] = lookahead
        elif clear_lookahead:
            update["lookahead_override"] = None
        return replace(self, config=self.config.model_copy(update=update))
