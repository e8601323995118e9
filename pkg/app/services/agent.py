# app/services/agent.py
"""
One robot's goal reasoner: formulation pool, selection, expansion, commit,
lock acquisition and dispatch, plus the hooks that feed its executor.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from app.models.enums import AcquisitionOutcome, EventKind, LifecycleEvent
from app.models.goal import Goal, GoalOperator
from app.models.plan import GroundAction, PlanResult
from app.models.world import INFINITY, Literal, Time
from app.services import executor
from app.services.coordination import promised
from app.services.executor import ExecutionState
from app.services.goal_model import (
    GoalIdCounter, ground_bindings, ground_literal, ground_term, goal_priority, make_goal_id, prefilter_static,
    select_goal, transition,
)
from app.services.grounding import ground_actions
from app.services.promises import (
    PromiseStore, check_formulation, issue_promises, promise_record, promise_sources, retract_record, to_tils,
)
from app.services.world import satisfies_all
from app.core.logging_utils import sim_context

if TYPE_CHECKING:
    from app.services.simulator import Simulator

logger = logging.getLogger("app.services.agent")  # Logger for this module

GoalKey = Tuple[str, Tuple[Tuple[str, str], ...]]
Versions = Tuple[int, int, int]

_EMPTY_PROMISES = PromiseStore()


@dataclass(frozen=True)
class Candidate:
    """A grounding of one operator for this agent whose static precondition holds."""
    operator: GoalOperator
    binding: Dict[str, str]
    key: GoalKey
    dynamic_precondition: Tuple[Literal, ...]


class Agent:
    def __init__(self, agent_id: str, start_delay: int, sim: "Simulator"):
        self.id = agent_id
        self.start_delay = start_delay
        self.sim = sim
        self.replica = sim.world.replica(agent_id)
        self.counter = GoalIdCounter()
        self.pool: Dict[GoalKey, Goal] = {}
        self.goals: Dict[str, Goal] = {}
        self.rejected: Dict[GoalKey, Versions] = {}
        self.active: Optional[ExecutionState] = None
        self.awaiting_lock: Optional[Tuple[Goal, Time]] = None
        self._skip_versions: Optional[Versions] = None
        self._wake_at = INFINITY

        scenario = sim.scenario
        static = scenario.domain.static_predicates()
        objects = scenario.signature.objects_by_type()
        self.candidates: List[Candidate] = []
        for op in scenario.operators:
            fixed = {op.agent_param: agent_id} if op.agent_param else None
            for binding in prefilter_static(op, ground_bindings(op, objects, fixed), static, scenario.init):
                dynamic = tuple(ground_literal(l, binding) for l in op.precondition if l.atom.predicate not in static)
                key = (op.class_name, tuple(sorted(binding.items())))
                self.candidates.append(Candidate(op, binding, key, dynamic))
        self.max_lookahead = max((scenario.lookahead_for(op) for op in scenario.operators), default=0)

        own_type = scenario.signature.objects.get(agent_id)
        restrict = {own_type: [agent_id]} if own_type else None
        self.actions: List[GroundAction] = ground_actions(
            scenario.domain, scenario.signature.objects, scenario.init, restrict=restrict
        )
        logger.debug(f"Agent {agent_id}: {len(self.candidates)} goal candidates, {len(self.actions)} ground actions")

    # --- state ---

    @property
    def idle(self) -> bool:
        return self.active is None and self.awaiting_lock is None

    def versions(self) -> Versions:
        return (self.replica.fact_version, self.replica.promise_version, self.sim.locks.version)

    def _promises(self) -> PromiseStore:
        return self.replica.promises if self.sim.promises_active else _EMPTY_PROMISES

    def _log_extra(self, now: Time, goal: Optional[Goal] = None):
        return sim_context(now, self.id, goal.id if goal else None)

    def wants_formulation(self, now: Time) -> bool:
        if now < self.start_delay or not self.idle:
            return False
        return not (self._skip_versions == self.versions() and now < self._wake_at)

    # --- formulation ---

    def evaluate(self, now: Time) -> Dict[GoalKey, bool]:
        """Formulation check of every candidate. Reads the replica only."""
        atoms = self.replica.atoms
        promises = self._promises()
        scenario = self.sim.scenario
        mode = self.sim.formulation_mode
        grace = self.sim.staleness_grace
        return {
            cand.key: check_formulation(
                cand.dynamic_precondition, atoms, now, promises, scenario.lookahead_for(cand.operator),
                mode, exclude_agent=self.id, grace=grace,
            )
            for cand in self.candidates
        }

    def _dependency(self, cand_pre: Tuple[Literal, ...], now: Time) -> Tuple[bool, List[str]]:
        atoms = self.replica.atoms
        if satisfies_all(atoms, cand_pre):
            return False, []
        sources = promise_sources(cand_pre, atoms, now, self._promises(), self.id, self.sim.staleness_grace)
        return True, sources

    def _update_pool(self, now: Time, checks: Dict[GoalKey, bool], versions: Versions) -> None:
        log = self.sim.log
        for cand in self.candidates:
            ok = checks[cand.key]
            existing = self.pool.get(cand.key)
            if ok and existing is None:
                if self.rejected.get(cand.key) == versions:
                    continue
                goal = Goal(
                    id=make_goal_id(cand.operator.class_name, cand.binding, self.counter()),
                    operator=cand.operator,
                    binding=dict(cand.binding),
                    agent=self.id,
                    formulated_at=now,
                )
                goal.priority = goal_priority(goal, self.sim.selection)
                goal.promise_dependent, goal.promise_sources = self._dependency(cand.dynamic_precondition, now)
                self.pool[cand.key] = goal
                self.goals[goal.id] = goal
                if goal.promise_dependent:
                    self.sim.promises_used += len(goal.promise_sources)
                log.emit(now, EventKind.GOAL_FORMULATED, self.id, goal, label=goal.label(),
                         priority=goal.priority, promise_dependent=goal.promise_dependent,
                         sources=list(goal.promise_sources))
            elif not ok and existing is not None:
                del self.pool[cand.key]
                if self._move(existing, LifecycleEvent.RETRACT, now):
                    log.emit(now, EventKind.GOAL_RETRACTED, self.id, existing, reason="precondition")

    def _next_wake(self, now: Time) -> float:
        if not self.sim.promises_active:
            return INFINITY
        wake = INFINITY
        grace = self.sim.staleness_grace
        for promise in self.replica.promises:
            if promise.agent == self.id:
                continue
            for when in (promise.at - self.max_lookahead, promise.at + grace + 1):
                if now < when < wake:
                    wake = when
        return wake

    def reasoning_cycle(self, now: Time, precomputed: Optional[Tuple[Versions, Dict[GoalKey, bool]]] = None) -> None:
        if self.awaiting_lock is not None:
            goal, due = self.awaiting_lock
            if now >= due:
                self._acquire(goal, now)
            return
        if not self.wants_formulation(now):
            return
        versions = self.versions()
        if precomputed is not None and precomputed[0][:2] == versions[:2]:
            checks = precomputed[1]
        else:
            checks = self.evaluate(now)
        self._update_pool(now, checks, versions)

        selectable = [g for g in self.pool.values() if self.rejected.get(g.key) != versions]
        chosen_id = select_goal(selectable, self.sim.selection)
        if chosen_id is None:
            self._skip_versions = versions
            self._wake_at = self._next_wake(now)
            return
        self._skip_versions = None
        goal = next(g for g in selectable if g.id == chosen_id)
        del self.pool[goal.key]
        self._pursue(goal, now)

    # --- select / expand / commit / dispatch ---

    def _move(self, goal: Goal, event: LifecycleEvent, now: Time) -> bool:
        return transition(goal, event, now, on_illegal=self._illegal)

    def _illegal(self, goal: Goal, event: LifecycleEvent, now: Time) -> None:
        self.sim.log.emit(now, EventKind.ILLEGAL_TRANSITION, self.id, goal, mode=goal.mode.value, event=event.value)

    def _reject(self, goal: Goal, now: Time, event: LifecycleEvent, reason: str) -> None:
        if self._move(goal, event, now):
            self.sim.log.emit(now, EventKind.GOAL_REJECTED, self.id, goal, reason=reason)
        self.rejected[goal.key] = self.versions()
        logger.info(f"{self.id} rejects {goal.label()}: {reason}", extra=self._log_extra(now, goal))

    def _plan_for(self, goal: Goal, now: Time) -> Tuple[PlanResult, int]:
        """
        Plans the goal's objective from the replica with the usable promises as
        TILs. A promise-dependent goal first plans without the actions that
        would achieve a promised literal itself.
        """
        atoms = self.replica.atoms
        tils = []
        if self.sim.promises_active:
            tils = to_tils(self.replica.promises, now, self.id, atoms, self.sim.staleness_grace)
        objective = [ground_literal(l, goal.binding) for l in goal.operator.objective]
        if goal.promise_dependent and tils:
            awaited = {literal.atom for _, literal in tils if literal.positive}
            own = [a for a in self.actions if not (a.adds & awaited)]
            result = self.sim.expand(self, atoms, objective, tils, actions=own)
            if result.solved:
                return result, len(tils)
        return self.sim.expand(self, atoms, objective, tils), len(tils)

    def _pursue(self, goal: Goal, now: Time) -> None:
        log = self.sim.log
        dynamic = next(c.dynamic_precondition for c in self.candidates if c.key == goal.key)
        goal.promise_dependent, goal.promise_sources = self._dependency(dynamic, now)

        if not self._move(goal, LifecycleEvent.SELECT, now):
            return
        log.emit(now, EventKind.GOAL_SELECTED, self.id, goal)

        result, til_count = self._plan_for(goal, now)
        if not result.solved:
            self._reject(goal, now, LifecycleEvent.REJECT, result.outcome.value)
            return
        goal.plan = result.plan
        if not self._move(goal, LifecycleEvent.EXPAND, now):
            return
        log.emit(now, EventKind.GOAL_EXPANDED, self.id, goal, steps=len(result.plan),
                 planned_makespan=result.plan.makespan, tils=til_count)

        if not self._move(goal, LifecycleEvent.COMMIT, now):
            return
        log.emit(now, EventKind.GOAL_COMMITTED, self.id, goal)
        if self.sim.lock_latency > 0:
            self.awaiting_lock = (goal, now + self.sim.lock_latency)
            return
        self._acquire(goal, now)

    def _acquire(self, goal: Goal, now: Time) -> None:
        self.awaiting_lock = None
        log = self.sim.log
        resources = [ground_term(r, goal.binding) for r in goal.operator.required_resources]
        decision = self.sim.locks.request(goal, resources)
        if decision.outcome == AcquisitionOutcome.DENIED:
            for resource, outcome in decision.per_resource.items():
                if outcome == AcquisitionOutcome.DENIED:
                    holder = decision.blockers.get(resource)
                    log.emit(now, EventKind.LOCK_DENIED, self.id, goal, resource=resource,
                             holder=holder[1] if holder else None)
            self._reject(goal, now, LifecycleEvent.RESOURCE_DENIED, "resource-denied")
            return
        for resource, outcome in decision.per_resource.items():
            if outcome == AcquisitionOutcome.GRANTED:
                log.emit(now, EventKind.LOCK_GRANTED, self.id, goal, resource=resource)
            else:
                holder = decision.blockers[resource]
                log.emit(now, EventKind.LOCK_DEFERRED, self.id, goal, resource=promised(resource),
                         waiting_for=resource, holder=holder[1])

        if not self._move(goal, LifecycleEvent.DISPATCH, now):
            self.sim.release(self, goal, now)
            return
        log.emit(now, EventKind.GOAL_DISPATCHED, self.id, goal, promise_dependent=goal.promise_dependent)
        if self.sim.promises_active:
            issued = issue_promises(goal, now)
            if issued:
                self.sim.publish(self.id, now, records=tuple(promise_record(p) for p in issued))
                for promise in issued:
                    log.emit(now, EventKind.PROMISE_ISSUED, self.id, goal, literal=str(promise.literal), at=promise.at)
        self.active = ExecutionState(goal)

    # --- execution hooks ---

    def complete(self, now: Time) -> None:
        if self.active is None:
            return
        action = executor.complete_action(self.active, now)
        if action is None:
            return
        self.sim.publish(self.id, now, adds=action.adds, dels=action.dels)
        self.sim.log.emit(now, EventKind.ACTION_DONE, self.id, self.active.goal, action=action.label)
        if self.active.finished:
            self.end_goal(now, success=True)

    def _repair(self, now: Time) -> None:
        """Replans a dispatched goal whose plan no longer fits the world it was handed."""
        goal = self.active.goal
        result, til_count = self._plan_for(goal, now)
        if not result.solved:
            self.end_goal(now, success=False, reason="no plan after handover")
            return
        goal.plan = result.plan
        self.active = ExecutionState(goal)
        self.sim.log.emit(now, EventKind.GOAL_EXPANDED, self.id, goal, steps=len(result.plan),
                          planned_makespan=result.plan.makespan, tils=til_count, repaired=True)
        logger.info(f"{self.id} replans {goal.label()} after handover", extra=self._log_extra(now, goal))

    def exec_tick(self, now: Time) -> None:
        if self.active is None:
            return
        if (executor.stalled_after_handover(self.active, self.replica.atoms)
                and not self.sim.world.has_pending(self.id)):
            self._repair(now)
            if self.active is None:
                return
        goal = self.active.goal
        events = executor.tick(self.active, self.replica.atoms, self.sim.monitor, now, self.sim.duration_of)
        for event in events:
            if event.kind == EventKind.GOAL_FINISHED:
                self.end_goal(now, success=True)
            elif event.kind == EventKind.GOAL_FAILED:
                self.end_goal(now, success=False, reason=event.detail.get("reason"))
            else:
                self.sim.log.emit(now, event.kind, self.id, goal, action=event.action, **event.detail)

    def end_goal(self, now: Time, success: bool, reason: Optional[str] = None) -> None:
        """Finish or fail the dispatched goal, then retract its promises and release its locks."""
        goal = self.active.goal
        self.active = None
        log = self.sim.log
        if success:
            if self._move(goal, LifecycleEvent.FINISH, now):
                log.emit(now, EventKind.GOAL_FINISHED, self.id, goal)
        elif self._move(goal, LifecycleEvent.FAIL, now):
            log.emit(now, EventKind.GOAL_FAILED, self.id, goal, reason=reason)
            logger.info(f"{self.id}: {goal.label()} failed ({reason})", extra=self._log_extra(now, goal))

        own = list(self.replica.promises.for_goal(goal.id))
        if own:
            self.sim.publish(self.id, now, records=(retract_record(self.id, goal.id),))
            for promise in own:
                log.emit(now, EventKind.PROMISE_RETRACTED, self.id, goal, literal=str(promise.literal), at=promise.at)
        self.sim.release(self, goal, now)
        self.sim.goal_ended(goal)
