# app/services/executor.py
"""
Per-agent plan execution.

Preconditions are always checked against the agent's actual world atoms,
never against promises. An action that cannot start waits PENDING until it
can, or until the monitor's timeout fails the goal.
"""
import logging
from dataclasses import dataclass, field
from typing import AbstractSet, Any, Callable, Dict, List, Optional

from app.core.exceptions import ContractViolation
from app.models.enums import EventKind, ExecPhase, LifecycleMode
from app.models.goal import Goal
from app.models.plan import GroundAction
from app.models.scenario import MonitorConfig
from app.models.world import Atom, Time
from app.services.world import satisfies_all

logger = logging.getLogger("app.services.executor")  # Logger for this module


@dataclass
class ExecEvent:
    kind: EventKind
    action: Optional[str] = None
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass
class CurrentAction:
    index: int
    action: GroundAction
    phase: ExecPhase
    since: Time
    ends_at: Optional[Time] = None
    # Deferred resource the action last waited on
    waiting_for: Optional[str] = None


@dataclass
class ExecutionState:
    goal: Goal
    cursor: int = 0
    current: Optional[CurrentAction] = None
    retries_used: Dict[int, int] = field(default_factory=dict)
    finished: bool = False
    failed: bool = False
    failure_reason: Optional[str] = None

    @property
    def steps(self):
        return self.goal.plan.steps if self.goal.plan is not None else ()

    @property
    def done(self) -> bool:
        return self.finished or self.failed


def _blocked_by_handover(goal: Goal, action: GroundAction) -> Optional[str]:
    for resource in sorted(goal.deferred_resources):
        if resource in action.args:
            return resource
    return None


def tick(
    exec_state: ExecutionState,
    world_atoms: AbstractSet[Atom],
    cfg: MonitorConfig,
    now: Time,
    duration_of: Optional[Callable[[GroundAction], Time]] = None,
) -> List[ExecEvent]:
    """
    Advances one executor by one tick: loads the next step, starts it when its
    precondition holds, or keeps it PENDING and enforces the timeout.
    """
    goal = exec_state.goal
    if goal.mode != LifecycleMode.DISPATCHED:
        raise ContractViolation(f"Executor tick for {goal.id} in mode {goal.mode.value}")
    if exec_state.done:
        return []
    events: List[ExecEvent] = []
    current = exec_state.current
    if current is None:
        if exec_state.cursor >= len(exec_state.steps):
            exec_state.finished = True
            return [ExecEvent(EventKind.GOAL_FINISHED)]
        action = exec_state.steps[exec_state.cursor].action
        current = CurrentAction(exec_state.cursor, action, ExecPhase.PENDING, now)
        exec_state.current = current
        entering = True
    elif current.phase == ExecPhase.RUNNING:
        return []
    else:
        entering = False

    action = current.action
    waiting_for = _blocked_by_handover(goal, action)
    if waiting_for is not None:
        current.waiting_for = waiting_for
    if waiting_for is None and satisfies_all(world_atoms, action.precondition):
        duration = duration_of(action) if duration_of else action.duration
        current.phase = ExecPhase.RUNNING
        current.since = now
        current.ends_at = now + duration
        events.append(ExecEvent(EventKind.ACTION_START, action.label, {"until": current.ends_at}))
        return events

    if entering:
        detail = {"waiting_for": waiting_for} if waiting_for else {}
        events.append(ExecEvent(EventKind.ACTION_PENDING, action.label, detail))
        return events

    timeout = cfg.effective_timeout(goal.promise_dependent)
    if now - current.since >= timeout:
        used = exec_state.retries_used.get(current.index, 0)
        if used < cfg.max_retries:
            exec_state.retries_used[current.index] = used + 1
            current.since = now
            events.append(ExecEvent(EventKind.ACTION_RETRY, action.label, {"attempt": used + 1}))
        else:
            events.append(ExecEvent(EventKind.ACTION_TIMEOUT, action.label, {"pending_for": now - current.since}))
            events.extend(fail_goal(exec_state, f"timeout of {action.label}"))
    return events


def stalled_after_handover(exec_state: ExecutionState, world_atoms: AbstractSet[Atom]) -> bool:
    """
    True when a PENDING action that waited for a deferred resource still
    cannot start once that resource has been handed over.
    """
    current = exec_state.current
    if exec_state.done or current is None or current.phase != ExecPhase.PENDING or current.waiting_for is None:
        return False
    if current.waiting_for in exec_state.goal.deferred_resources:
        return False
    return not satisfies_all(world_atoms, current.action.precondition)


def complete_action(exec_state: ExecutionState, now: Time) -> Optional[GroundAction]:
    """
    Finishes the running action if it ends at `now`. Returns the action whose
    effects must be published, or None. The caller publishes the effects,
    then treats `exec_state.finished` as the end of the goal.
    """
    current = exec_state.current
    if current is None or current.phase != ExecPhase.RUNNING or current.ends_at != now:
        return None
    exec_state.current = None
    exec_state.cursor += 1
    if exec_state.cursor >= len(exec_state.steps):
        exec_state.finished = True
    return current.action


def fail_goal(exec_state: ExecutionState, reason: str) -> List[ExecEvent]:
    if exec_state.done:
        return []
    exec_state.failed = True
    exec_state.failure_reason = reason
    exec_state.current = None
    logger.info(f"Goal {exec_state.goal.id} fails: {reason}")
    return [ExecEvent(EventKind.GOAL_FAILED, detail={"reason": reason})]
