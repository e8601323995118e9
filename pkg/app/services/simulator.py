# app/services/simulator.py
"""
Deterministic discrete-event loop binding world model, agents, lock
authority, planner and executors.

Per tick: deliver world updates, complete actions ending now, test the
scenario objective, run the runtime checks, then give every agent (in
agent-id order) a reasoning cycle followed by an executor tick.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.alert_handler import collect_run_alerts
from app.core.config import settings
from app.core.logging_utils import sim_context
from app.models.enums import EventKind, ExecPhase, FormulationMode, SearchMode
from app.models.goal import Goal, SelectionConfig
from app.models.plan import GroundAction, PlanResult
from app.models.report import RunReport
from app.models.scenario import Scenario
from app.models.world import Literal, Time
from app.services import planner
from app.services.agent import Agent
from app.services.coordination import LockTable, is_promised, promised
from app.services.event_log import EventLog
from app.services.promises import PromiseStore, is_stale
from app.services.reporting import build_report
from app.services.world import satisfies, satisfies_all
from app.services.world_model import SharedWorldModel

logger = logging.getLogger("app.services.simulator")  # Logger for this module


class Simulator:
    def __init__(
        self,
        scenario: Scenario,
        *,
        planner_mode: Optional[SearchMode] = None,
        parallel: Optional[bool] = None,
        formulation_mode: Optional[FormulationMode] = None,
    ):
        cfg = scenario.config
        self.scenario = scenario
        self.monitor = cfg.monitor
        self.promises_active = scenario.promises_active
        self.formulation_mode = formulation_mode or FormulationMode(settings.FORMULATION_MODE)
        self.staleness_grace = settings.STALENESS_GRACE
        self.selection = SelectionConfig(object_priority=settings.OBJECT_PRIORITY)
        self.planner_mode = planner_mode or SearchMode(settings.PLANNER_MODE)
        self.parallel = settings.PARALLEL_FORMULATION if parallel is None else parallel
        self.lock_latency = cfg.lock_latency
        self.suppress_release = set(cfg.faults.suppress_release_agents)
        self.rng = np.random.default_rng(cfg.seed)

        self.log = EventLog()
        self.world = SharedWorldModel(scenario.init, scenario.agent_ids, cfg.world_latency)
        self.locks = LockTable()
        # Every promise currently in force, as the publishing agents see them
        self.ledger = PromiseStore()
        delays = {a.id: a.start_delay for a in cfg.agents}
        self.agents: List[Agent] = [Agent(agent_id, delays[agent_id], self) for agent_id in scenario.agent_ids]

        self.promises_used = 0
        self.planner_calls = 0
        self.planner_max_seconds = 0.0
        self.invariant_violations: List[str] = []
        self._ended: List[Goal] = []
        self._stale_reported = set()
        self.now: Time = 0

    # --- services used by agents ---

    def duration_of(self, action: GroundAction) -> Time:
        jitter = self.scenario.config.duration_jitter
        if jitter <= 0:
            return action.duration
        return action.duration + int(self.rng.integers(0, jitter + 1))

    def expand(
        self, agent: Agent, atoms, objective: Sequence[Literal], tils, actions: Optional[Sequence[GroundAction]] = None,
    ) -> PlanResult:
        result = planner.plan(
            None, atoms, objective, tils, settings.PLANNER_TIME_BOUND,
            actions=agent.actions if actions is None else actions,
            mode=self.planner_mode, node_budget=settings.PLANNER_NODE_BUDGET,
        )
        self.planner_calls += 1
        self.planner_max_seconds = max(self.planner_max_seconds, result.wall_seconds)
        return result

    def publish(self, origin: str, now: Time, adds=(), dels=(), records: Tuple[str, ...] = ()) -> None:
        update = self.world.make_update(origin, adds, dels, records)
        self.world.publish(update, now)
        for record in records:
            self.ledger.apply_record(record)

    def goal(self, goal_id: str) -> Optional[Goal]:
        for agent in self.agents:
            if goal_id in agent.goals:
                return agent.goals[goal_id]
        return None

    def release(self, agent: Agent, goal: Goal, now: Time) -> None:
        held = self.locks.resources_of(goal.id)
        if not held:
            return
        if agent.id in self.suppress_release:
            for resource in sorted(held):
                self.log.emit(now, EventKind.LOCK_RELEASE_SUPPRESSED, agent.id, goal, resource=resource)
            logger.warning(f"Release of {sorted(held)} by {goal.id} suppressed", extra=sim_context(now, agent.id, goal.id))
            return
        released, handovers = self.locks.release(goal.id)
        by_resource = {h.resource: h for h in handovers}
        for resource in released:
            self.log.emit(now, EventKind.LOCK_RELEASED, agent.id, goal, resource=resource)
            handover = by_resource.get(resource)
            if handover is None:
                continue
            self.log.emit(now, EventKind.LOCK_HANDOVER, handover.to_agent, handover.to_goal, resource=resource,
                          from_goal=goal.id)
            self.log.emit(now, EventKind.LOCK_RELEASED, handover.to_agent, handover.to_goal,
                          resource=promised(resource), reason="handover")
            recipient = self.goal(handover.to_goal)
            if recipient is not None:
                recipient.acquired_resources.add(resource)
                recipient.deferred_resources.discard(resource)

    def goal_ended(self, goal: Goal) -> None:
        self._ended.append(goal)

    # --- runtime checks ---

    def _violation(self, now: Time, message: str) -> None:
        text = f"t={now}: {message}"
        self.invariant_violations.append(text)
        logger.error(f"Invariant violated: {message}", extra=sim_context(now))

    def check_invariants(self, now: Time) -> None:
        for goal in self._ended:
            if self.ledger.for_goal(goal.id):
                self._violation(now, f"{goal.id} ended with active promises")
            if goal.agent not in self.suppress_release and self.locks.resources_of(goal.id):
                self._violation(now, f"{goal.id} ended holding {sorted(self.locks.resources_of(goal.id))}")
        self._ended.clear()

        for resource, holder in self.locks.holders.items():
            if not is_promised(resource) and self.locks.holder(promised(resource)) == holder:
                self._violation(now, f"{holder[1]} holds both {resource} and {promised(resource)}")

        if self.world.latency == 0:
            expected = {p.identity for p in self.ledger}
            for agent in self.agents:
                if {p.identity for p in agent.replica.promises} != expected:
                    self._violation(now, f"promise store of {agent.id} diverges from the published promises")

        pending = [a for a in self.agents if a.active is not None and a.active.current is not None
                   and a.active.current.phase == ExecPhase.PENDING]
        running = [a for a in self.agents if a.active is not None and a.active.current is not None
                   and a.active.current.phase == ExecPhase.RUNNING]
        if pending and not running and len(pending) == len([a for a in self.agents if a.active is not None]):
            waiting_on = {a.active.goal.id for a in pending}
            if all(a.active.goal.promise_sources and set(a.active.goal.promise_sources) <= waiting_on for a in pending):
                self._violation(now, f"pending agents wait only on each other: {sorted(waiting_on)}")

    def report_stale(self, now: Time) -> None:
        atoms = self.world.truth.atoms
        for promise in self.ledger:
            if promise.identity in self._stale_reported:
                continue
            if is_stale(promise, now, self.staleness_grace) and not satisfies(atoms, promise.literal):
                self._stale_reported.add(promise.identity)
                self.log.emit(now, EventKind.PROMISE_STALE, promise.agent, promise.goal_id,
                              literal=str(promise.literal), at=promise.at)

    # --- main loop ---

    def _precompute(self, pool: ThreadPoolExecutor, now: Time) -> Dict[str, tuple]:
        wanting = [a for a in self.agents if a.wants_formulation(now)]
        if len(wanting) < 2:
            return {}
        futures = {a.id: (a.versions(), pool.submit(a.evaluate, now)) for a in wanting}
        return {agent_id: (versions, future.result()) for agent_id, (versions, future) in futures.items()}

    def step(self, now: Time, pool: Optional[ThreadPoolExecutor] = None) -> bool:
        """Runs one tick. Returns True once the objective holds."""
        self.now = now
        self.world.advance(now)
        before = {a.id: a.replica.duplicates for a in self.agents}
        self.world.deliver(now)
        for agent in self.agents:
            if agent.replica.duplicates > before[agent.id]:
                self.log.emit(now, EventKind.WORLD_DUPLICATE, agent.id,
                              count=agent.replica.duplicates - before[agent.id])

        for agent in self.agents:
            agent.complete(now)
        if satisfies_all(self.world.truth.atoms, self.scenario.objective):
            return True

        self.check_invariants(now)
        if self.promises_active:
            self.report_stale(now)

        precomputed = self._precompute(pool, now) if pool is not None else {}
        for agent in self.agents:
            if now >= agent.start_delay:
                agent.reasoning_cycle(now, precomputed.get(agent.id))
            agent.exec_tick(now)
        return False

    def run(self) -> RunReport:
        cfg = self.scenario.config
        with collect_run_alerts() as alerts:
            self.log.emit(0, EventKind.RUN_START, scenario=self.scenario.name, seed=cfg.seed,
                          promises=self.promises_active, agents=self.scenario.agent_ids)
            completed = False
            pool = ThreadPoolExecutor(max_workers=len(self.agents)) if self.parallel else None
            try:
                now = 0
                while True:
                    if self.step(now, pool):
                        completed = True
                        break
                    if now >= cfg.tick_bound:
                        break
                    now += 1
            finally:
                if pool is not None:
                    pool.shutdown()
            if completed:
                self.log.emit(now, EventKind.RUN_END, completed=True, makespan=now)
                logger.info(f"{self.scenario.name} (seed {cfg.seed}): objective reached at t={now}")
            else:
                self.log.emit(now, EventKind.RUN_END, completed=False, timed_out=True)
                logger.warning(f"{self.scenario.name} (seed {cfg.seed}): tick bound {cfg.tick_bound} reached",
                               extra=sim_context(now))

        report = build_report(self.log.events)
        report.invariant_violations = list(self.invariant_violations)
        report.alerts = list(alerts.alerts)
        report.planner_calls = self.planner_calls
        report.planner_max_seconds = self.planner_max_seconds
        return report


def run(scenario: Scenario, **kwargs) -> RunReport:
    return Simulator(scenario, **kwargs).run()
