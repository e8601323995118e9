# app/services/goal_model.py
import hashlib
import itertools
import logging
from typing import AbstractSet, Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence

from app.core.exceptions import ConfigurationError, ContractViolation
from app.models.enums import LifecycleEvent, LifecycleMode
from app.models.goal import Goal, GoalOperator, ModeTraceEntry, SelectionConfig
from app.models.pddl import is_variable
from app.models.world import Atom, Literal, Time
from app.services.world import satisfies

logger = logging.getLogger("app.services.goal_model")  # Logger for this module

M = LifecycleMode
E = LifecycleEvent

_PRE_DISPATCH = (M.FORMULATED, M.SELECTED, M.EXPANDED, M.COMMITTED)

LEGAL_EDGES: Dict[tuple, LifecycleMode] = {
    (M.FORMULATED, E.SELECT): M.SELECTED,
    (M.SELECTED, E.EXPAND): M.EXPANDED,
    (M.EXPANDED, E.COMMIT): M.COMMITTED,
    (M.COMMITTED, E.DISPATCH): M.DISPATCHED,
    (M.COMMITTED, E.RESOURCE_DENIED): M.REJECTED,
    (M.DISPATCHED, E.FINISH): M.FINISHED,
    (M.DISPATCHED, E.FAIL): M.FAILED,
}
for _mode in _PRE_DISPATCH:
    LEGAL_EDGES[(_mode, E.REJECT)] = M.REJECTED
    LEGAL_EDGES[(_mode, E.RETRACT)] = M.RETRACTED


def ground_literal(pattern: Literal, binding: Mapping[str, str]) -> Literal:
    args = tuple(binding.get(arg[1:], arg) if is_variable(arg) else arg for arg in pattern.atom.args)
    return Literal(Atom(pattern.atom.predicate, args), pattern.positive)


def ground_term(term: str, binding: Mapping[str, str]) -> str:
    return binding.get(term[1:], term) if is_variable(term) else term


def make_goal_id(class_name: str, binding: Mapping[str, str], counter: int) -> str:
    canonical = ",".join(f"{k}={v}" for k, v in sorted(binding.items()))
    digest = hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:8]
    return f"{class_name}#{digest}#{counter}"


def ground_bindings(
    op: GoalOperator,
    objects: Mapping[str, Sequence[str]],
    fixed: Optional[Mapping[str, str]] = None,
) -> Iterator[Dict[str, str]]:
    """Typed Cartesian product of the parameter domains, in sorted order."""
    domains: List[List[str]] = []
    for name, typ in op.params:
        if typ not in objects:
            raise ConfigurationError(f"{op.class_name}: parameter '{name}' has unknown type '{typ}'")
        if fixed and name in fixed:
            domain = [fixed[name]] if fixed[name] in objects[typ] else []
        else:
            domain = sorted(set(objects[typ]))
        domains.append(domain)
    names = op.param_names
    for values in itertools.product(*domains):
        yield dict(zip(names, values))


class GoalIdCounter:
    """Formulation counter shared by all goals of one agent."""

    def __init__(self, start: int = 1):
        self._next = itertools.count(start)

    def __call__(self) -> int:
        return next(self._next)


def ground_operator(
    op: GoalOperator,
    objects: Mapping[str, Sequence[str]],
    agent: Optional[str] = None,
    formulated_at: Time = 0,
    counter: Optional[Callable[[], int]] = None,
    selection: Optional[SelectionConfig] = None,
) -> List[Goal]:
    """
    One candidate goal per grounding. With `agent` set and an agent parameter
    declared, only bindings assigning that agent are produced.
    """
    counter = counter or GoalIdCounter()
    fixed = {op.agent_param: agent} if agent is not None and op.agent_param else None
    goals = []
    for binding in ground_bindings(op, objects, fixed):
        owner = agent if agent is not None else binding.get(op.agent_param or "", "")
        goal = Goal(
            id=make_goal_id(op.class_name, binding, counter()),
            operator=op,
            binding=binding,
            agent=owner,
            formulated_at=formulated_at,
        )
        goal.priority = goal_priority(goal, selection) if selection else op.priority
        goals.append(goal)
    return goals


def static_precondition(op: GoalOperator, static_predicates: AbstractSet[str]) -> List[Literal]:
    return [lit for lit in op.precondition if lit.atom.predicate in static_predicates]


def prefilter_static(
    op: GoalOperator,
    bindings: Iterable[Dict[str, str]],
    static_predicates: AbstractSet[str],
    atoms: FrozenSet[Atom],
) -> List[Dict[str, str]]:
    """Drops bindings whose never-changing precondition literals fail."""
    static = static_precondition(op, static_predicates)
    if not static:
        return list(bindings)
    return [b for b in bindings if all(satisfies(atoms, ground_literal(lit, b)) for lit in static)]


def transition(
    goal: Goal,
    event: LifecycleEvent,
    time: Time,
    on_illegal: Optional[Callable[[Goal, LifecycleEvent, Time], None]] = None,
) -> bool:
    """
    Moves `goal` along one lifecycle edge. An illegal edge leaves the goal
    untouched and returns False after calling `on_illegal`.
    """
    target = LEGAL_EDGES.get((goal.mode, event))
    if target is None:
        logger.error(f"Illegal transition {goal.id}: {goal.mode.value} + {event.value} at t={time}")
        if on_illegal is not None:
            on_illegal(goal, event, time)
        return False
    goal.mode = target
    goal.trace.append(ModeTraceEntry(time=time, mode=target, event=event.value))
    return True


def is_lifecycle_path(trace: Sequence[ModeTraceEntry]) -> bool:
    mode = M.FORMULATED
    for entry in trace:
        if LEGAL_EDGES.get((mode, LifecycleEvent(entry.event))) != entry.mode:
            return False
        mode = entry.mode
    return True


def goal_priority(goal: Goal, selection: Optional[SelectionConfig]) -> int:
    bonus = 0
    if selection is not None:
        bonus = sum(selection.object_priority.get(obj, 0) for obj in set(goal.binding.values()))
    return goal.operator.priority + bonus


def select_goal(formulated: Sequence[Goal], selection: Optional[SelectionConfig] = None) -> Optional[str]:
    """Highest priority first, then earliest formulation, then smallest id."""
    if not formulated:
        return None
    for goal in formulated:
        if goal.mode != M.FORMULATED:
            raise ContractViolation(f"select_goal got {goal.id} in mode {goal.mode.value}")
    best = min(formulated, key=lambda g: (-goal_priority(g, selection), g.formulated_at, g.id))
    return best.id
