# app/services/promises.py
import logging
import re
from typing import AbstractSet, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from app.core.exceptions import ConfigurationError, PddlSyntaxError
from app.models.enums import FormulationMode
from app.models.goal import Goal
from app.models.promise import Promise
from app.models.world import INFINITY, Literal, Time
from app.services.goal_model import ground_literal
from app.services.pddl_parser import parse_literal
from app.services.world import satisfies

logger = logging.getLogger("app.services.promises")  # Logger for this module

TimeOrInf = Union[int, float]

_PROMISE_RECORD = re.compile(r"^promise (?P<literal>\(.*\)) @ (?P<at>\d+) by (?P<agent>[^/\s]+)/(?P<goal>\S+)$")
_RETRACT_RECORD = re.compile(r"^retract (?P<agent>[^/\s]+)/(?P<goal>\S+)$")


class PromiseStore:
    """Active promises of one world-model replica, indexed by literal and by issuing goal."""

    def __init__(self):
        self._by_literal: Dict[Literal, List[Promise]] = {}
        self._by_goal: Dict[str, List[Promise]] = {}
        self.version = 0

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_goal.values())

    def __iter__(self):
        for goal_id in sorted(self._by_goal):
            yield from self._by_goal[goal_id]

    def __contains__(self, promise: Promise) -> bool:
        return any(p.identity == promise.identity for p in self._by_literal.get(promise.literal, ()))

    def add(self, promise: Promise) -> bool:
        if promise in self:
            logger.debug(f"Ignoring identical promise {promise}")
            return False
        self._by_literal.setdefault(promise.literal, []).append(promise)
        self._by_goal.setdefault(promise.goal_id, []).append(promise)
        self.version += 1
        return True

    def retract_goal(self, goal_id: str) -> List[Promise]:
        removed = self._by_goal.pop(goal_id, None)
        if removed is None:
            return []
        for promise in removed:
            remaining = [p for p in self._by_literal[promise.literal] if p.goal_id != goal_id]
            if remaining:
                self._by_literal[promise.literal] = remaining
            else:
                del self._by_literal[promise.literal]
        self.version += 1
        return removed

    def for_literal(self, literal: Literal) -> Sequence[Promise]:
        return self._by_literal.get(literal, ())

    def for_goal(self, goal_id: str) -> Sequence[Promise]:
        return self._by_goal.get(goal_id, ())

    def goal_ids(self) -> List[str]:
        return sorted(self._by_goal)

    def apply_record(self, record: str) -> None:
        parsed = parse_record(record)
        if isinstance(parsed, Promise):
            self.add(parsed)
        else:
            agent, goal_id = parsed
            if not self.retract_goal(goal_id):
                logger.warning(f"Retraction for {agent}/{goal_id} matched no promise")

    @classmethod
    def of(cls, promises: Iterable[Promise]) -> "PromiseStore":
        store = cls()
        for promise in promises:
            store.add(promise)
        return store


def is_stale(promise: Promise, now: Time, grace: int) -> bool:
    """Elapsed by more than `grace` ticks. Callers only ask while the literal is still false."""
    return promise.at + grace < now


def _usable(promise: Promise, now: Time, exclude_agent: Optional[str], grace: Optional[int]) -> bool:
    if exclude_agent is not None and promise.agent == exclude_agent:
        return False
    if grace is not None and is_stale(promise, now, grace):
        return False
    return True


def _earliest_promise(literal: Literal, t: Time, promises: PromiseStore, exclude_agent: Optional[str], grace: Optional[int]) -> Optional[Promise]:
    best: Optional[Promise] = None
    for promise in promises.for_literal(literal):
        if not _usable(promise, t, exclude_agent, grace):
            continue
        if best is None or (promise.at, promise.goal_id) < (best.at, best.goal_id):
            best = promise
    return best


def from_time(literal: Literal, state_atoms: AbstractSet, t: Time, promises: PromiseStore,
              exclude_agent: Optional[str] = None, grace: Optional[int] = None) -> TimeOrInf:
    if satisfies(state_atoms, literal):
        return t
    best = _earliest_promise(literal, t, promises, exclude_agent, grace)
    return best.at if best is not None else INFINITY


def until_time(literal: Literal, state_atoms: AbstractSet, t: Time, promises: PromiseStore,
               exclude_agent: Optional[str] = None, grace: Optional[int] = None) -> TimeOrInf:
    complement = literal.complement()
    if satisfies(state_atoms, complement):
        return t
    best = _earliest_promise(complement, t, promises, exclude_agent, grace)
    return best.at if best is not None else INFINITY


def from_time_set(literals: Iterable[Literal], state_atoms: AbstractSet, t: Time, promises: PromiseStore,
                  exclude_agent: Optional[str] = None, grace: Optional[int] = None) -> TimeOrInf:
    """Latest from-time over `literals`; `t` for an empty set. A past-dated promise can yield a time before `t`."""
    result: TimeOrInf = -INFINITY
    for literal in literals:
        value = from_time(literal, state_atoms, t, promises, exclude_agent, grace)
        if value == INFINITY:
            return INFINITY
        result = max(result, value)
    return t if result == -INFINITY else result


def until_time_set(literals: Iterable[Literal], state_atoms: AbstractSet, t: Time, promises: PromiseStore,
                   exclude_agent: Optional[str] = None, grace: Optional[int] = None) -> TimeOrInf:
    result: TimeOrInf = INFINITY
    for literal in literals:
        result = min(result, until_time(literal, state_atoms, t, promises, exclude_agent, grace))
    return result


def check_formulation(
    precondition: Sequence[Literal],
    state_atoms: AbstractSet,
    t: Time,
    promises: PromiseStore,
    lookahead: Time,
    mode: FormulationMode = FormulationMode.OPTIMISTIC,
    exclude_agent: Optional[str] = None,
    grace: Optional[int] = None,
) -> bool:
    if lookahead <= 0:
        return all(satisfies(state_atoms, literal) for literal in precondition)
    horizon = t + lookahead
    if from_time_set(precondition, state_atoms, t, promises, exclude_agent, grace) > horizon:
        return False
    if mode == FormulationMode.PESSIMISTIC:
        return until_time_set(precondition, state_atoms, t, promises, exclude_agent, grace) >= horizon
    return True


def promise_sources(
    precondition: Sequence[Literal],
    state_atoms: AbstractSet,
    t: Time,
    promises: PromiseStore,
    exclude_agent: Optional[str] = None,
    grace: Optional[int] = None,
) -> List[str]:
    """Goal ids whose promises cover the precondition literals the state does not satisfy."""
    sources: List[str] = []
    for literal in precondition:
        if satisfies(state_atoms, literal):
            continue
        best = _earliest_promise(literal, t, promises, exclude_agent, grace)
        if best is not None and best.goal_id not in sources:
            sources.append(best.goal_id)
    return sorted(sources)


def issue_promises(goal: Goal, t_dispatch: Time) -> List[Promise]:
    issued: List[Promise] = []
    for template in goal.operator.promise_templates:
        literal = ground_literal(template.literal, goal.binding)
        if any(arg.startswith("?") for arg in literal.atom.args):
            raise ConfigurationError(f"Promise template {template.literal} of {goal.class_name} is not ground")
        issued.append(Promise(literal, t_dispatch + goal.operator.template_offset(template), goal.id, goal.agent))
    return issued


def to_tils(
    promises: PromiseStore,
    t_now: Time,
    own_agent: Optional[str],
    state_atoms: AbstractSet = frozenset(),
    grace: int = 1,
) -> List[Tuple[Time, Literal]]:
    tils = set()
    for promise in promises:
        if own_agent is not None and promise.agent == own_agent:
            continue
        if promise.at > t_now:
            tils.add((promise.at - t_now, promise.literal))
        elif satisfies(state_atoms, promise.literal):
            continue  # already part of the initial state
        elif is_stale(promise, t_now, grace):
            continue
        else:
            # Due but not yet realized: earliest possible point of the plan
            tils.add((1, promise.literal))
    return sorted(tils, key=lambda til: (til[0], str(til[1])))


# --- Wire records ---

def promise_record(promise: Promise) -> str:
    return f"promise {promise.literal} @ {promise.at} by {promise.agent}/{promise.goal_id}"


def retract_record(agent: str, goal_id: str) -> str:
    return f"retract {agent}/{goal_id}"


def parse_record(record: str) -> Union[Promise, Tuple[str, str]]:
    text = record.strip()
    match = _PROMISE_RECORD.match(text)
    if match:
        literal = parse_literal(match.group("literal"))
        return Promise(literal, int(match.group("at")), match.group("goal"), match.group("agent"))
    match = _RETRACT_RECORD.match(text)
    if match:
        return (match.group("agent"), match.group("goal"))
    raise PddlSyntaxError(f"Malformed promise record: {record!r}")
