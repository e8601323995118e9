# app/services/coordination.py
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from app.core.config import settings
from app.models.enums import AcquisitionOutcome
from app.models.goal import Goal

logger = logging.getLogger("app.services.coordination")  # Logger for this module

PROMISED_PREFIX = "promised-"

Holder = Tuple[str, str]  # (agent, goal_id)


def promised(resource: str) -> str:
    return f"{PROMISED_PREFIX}{resource}"


def is_promised(resource: str) -> bool:
    return resource.startswith(PROMISED_PREFIX)


def main_resource(resource: str) -> str:
    return resource[len(PROMISED_PREFIX):] if is_promised(resource) else resource


@dataclass
class LockDecision:
    outcome: AcquisitionOutcome
    per_resource: Dict[str, AcquisitionOutcome] = field(default_factory=dict)
    # resource -> current holder, for every DENIED or DEFERRED entry
    blockers: Dict[str, Holder] = field(default_factory=dict)


@dataclass(frozen=True)
class Handover:
    resource: str
    from_goal: str
    to_agent: str
    to_goal: str


class LockTable:
    """
    Exclusive resource locks. A promise-dependent goal blocked by the goal
    that promised it waits on `promised-R`; when R is released it moves to
    that waiter and `promised-R` is freed in the same step.
    """

    def __init__(self, defer_on_any_holder: bool = settings.DEFER_ON_ANY_HOLDER):
        self.defer_on_any_holder = defer_on_any_holder
        self.holders: Dict[str, Holder] = {}
        self._by_goal: Dict[str, Set[str]] = {}
        self.version = 0

    def holder(self, resource: str) -> Optional[Holder]:
        return self.holders.get(resource)

    def resources_of(self, goal_id: str) -> Set[str]:
        return set(self._by_goal.get(goal_id, ()))

    def waiters(self) -> Dict[str, Holder]:
        return {main_resource(r): h for r, h in self.holders.items() if is_promised(r)}

    def _acquire(self, resource: str, holder: Holder) -> None:
        self.holders[resource] = holder
        self._by_goal.setdefault(holder[1], set()).add(resource)

    def _free(self, resource: str) -> None:
        agent, goal_id = self.holders.pop(resource)
        owned = self._by_goal.get(goal_id)
        if owned is not None:
            owned.discard(resource)
            if not owned:
                del self._by_goal[goal_id]

    def _may_defer(self, goal: Goal, blocker: Holder) -> bool:
        if not goal.promise_dependent:
            return False
        return self.defer_on_any_holder or blocker[1] in goal.promise_sources

    def request(self, goal: Goal, resources: Iterable[str]) -> LockDecision:
        """All-or-nothing: on DENIED nothing is acquired."""
        me: Holder = (goal.agent, goal.id)
        decision = LockDecision(AcquisitionOutcome.GRANTED)
        for resource in sorted(set(resources)):
            current = self.holders.get(resource)
            if current is None or current == me:
                decision.per_resource[resource] = AcquisitionOutcome.GRANTED
                continue
            decision.blockers[resource] = current
            if self._may_defer(goal, current):
                shadow = self.holders.get(promised(resource))
                if shadow is None or shadow == me:
                    decision.per_resource[resource] = AcquisitionOutcome.DEFERRED
                    continue
                decision.blockers[promised(resource)] = shadow
            decision.per_resource[resource] = AcquisitionOutcome.DENIED

        if AcquisitionOutcome.DENIED in decision.per_resource.values():
            decision.outcome = AcquisitionOutcome.DENIED
            logger.debug(f"Lock request of {goal.id} denied: {decision.blockers}")
            return decision
        for resource, outcome in decision.per_resource.items():
            if outcome == AcquisitionOutcome.GRANTED:
                self._acquire(resource, me)
            else:
                self._acquire(promised(resource), me)
                goal.deferred_resources.add(resource)
                decision.outcome = AcquisitionOutcome.DEFERRED
        goal.acquired_resources.update(r for r, o in decision.per_resource.items() if o == AcquisitionOutcome.GRANTED)
        self.version += 1
        return decision

    def release(self, goal_id: str) -> Tuple[List[str], List[Handover]]:
        """Frees everything `goal_id` holds. Returns (released resources, handovers)."""
        owned = self._by_goal.get(goal_id)
        if not owned:
            logger.warning(f"Release for {goal_id}: goal holds no resources")
            return [], []
        released: List[str] = []
        handovers: List[Handover] = []
        for resource in sorted(owned):
            self._free(resource)
            released.append(resource)
            if is_promised(resource):
                continue
            waiter = self.holders.get(promised(resource))
            if waiter is not None:
                self._acquire(resource, waiter)
                self._free(promised(resource))
                handovers.append(Handover(resource, goal_id, waiter[0], waiter[1]))
                logger.debug(f"Handover of {resource} from {goal_id} to {waiter[1]}")
        self.version += 1
        return released, handovers
