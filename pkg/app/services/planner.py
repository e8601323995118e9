# app/services/planner.py
"""
Sequential temporal forward search over (atoms, time) with timed initial
literals.

States are Python ints: every atom is interned to one bit. A node either
starts an applicable action (TILs falling inside the action's span apply
before its end effects) or waits until the next pending TIL. The objective
is tested on the root and on nodes reached by an action, so a plan never
ends in a wait.
"""
import heapq
import itertools
import logging
import time as wallclock
from typing import AbstractSet, Dict, List, Mapping, Optional, Sequence, Tuple

from app.core.config import settings
from app.models.enums import PlanOutcome, SearchMode
from app.models.pddl import Domain, Problem
from app.models.plan import GroundAction, Plan, PlanResult, TimedAction
from app.models.world import Atom, Literal, Time
from app.services.grounding import ground_actions

logger = logging.getLogger("app.services.planner")  # Logger for this module


class _Interner:
    def __init__(self):
        self.bits: Dict[Atom, int] = {}

    def bit(self, atom: Atom) -> int:
        index = self.bits.get(atom)
        if index is None:
            index = len(self.bits)
            self.bits[atom] = index
        return 1 << index

    def mask(self, atoms) -> int:
        value = 0
        for atom in atoms:
            value |= self.bit(atom)
        return value


class _CompiledAction:
    __slots__ = ("action", "pre_pos", "pre_neg", "add", "delete", "duration")

    def __init__(self, action: GroundAction, interner: _Interner):
        self.action = action
        self.pre_pos = interner.mask(l.atom for l in action.precondition if l.positive)
        self.pre_neg = interner.mask(l.atom for l in action.precondition if not l.positive)
        self.add = interner.mask(action.adds)
        self.delete = interner.mask(action.dels)
        self.duration = action.duration

    def applicable(self, state: int) -> bool:
        return (state & self.pre_pos) == self.pre_pos and not (state & self.pre_neg)


def _sorted_tils(tils: Sequence[Tuple[Time, Literal]]) -> List[Tuple[Time, Literal]]:
    return sorted(tils, key=lambda til: (til[0], str(til[1])))


def plan(
    domain: Optional[Domain],
    init: AbstractSet[Atom],
    objective: Sequence[Literal],
    tils: Sequence[Tuple[Time, Literal]] = (),
    bound: Time = settings.PLANNER_TIME_BOUND,
    *,
    objects: Optional[Mapping[str, str]] = None,
    actions: Optional[Sequence[GroundAction]] = None,
    mode: SearchMode = SearchMode(settings.PLANNER_MODE),
    node_budget: int = settings.PLANNER_NODE_BUDGET,
) -> PlanResult:
    """
    Returns SOLVED with a plan, UNSOLVABLE when no plan ends within `bound`,
    or RESOURCE_LIMIT when more than `node_budget` nodes were expanded.
    Pass pre-grounded `actions` to skip grounding.
    """
    if bound <= 0:
        raise ValueError(f"Planner bound must be positive, got {bound}")
    started = wallclock.perf_counter()
    if actions is None:
        if domain is None:
            raise ValueError("plan() needs either a domain or ground actions")
        actions = ground_actions(domain, objects or {}, init)

    interner = _Interner()
    state0 = interner.mask(init)
    compiled = [_CompiledAction(a, interner) for a in actions]
    goal_pos = interner.mask(l.atom for l in objective if l.positive)
    goal_neg = interner.mask(l.atom for l in objective if not l.positive)
    til_list = _sorted_tils(tils)
    til_times = [t for t, _ in til_list]
    til_ops = [(interner.bit(l.atom), l.positive) for _, l in til_list]

    def apply_tils(state: int, index: int, until: Time) -> Tuple[int, int]:
        while index < len(til_list) and til_times[index] <= until:
            bit, positive = til_ops[index]
            state = state | bit if positive else state & ~bit
            index += 1
        return state, index

    def reached(state: int) -> bool:
        return (state & goal_pos) == goal_pos and not (state & goal_neg)

    def unmet(state: int) -> int:
        return bin(goal_pos & ~state).count("1") + bin(goal_neg & state).count("1")

    greedy = mode == SearchMode.GREEDY
    seq = itertools.count()
    # Node storage: parallel lists indexed by node id
    parents: List[int] = [-1]
    steps: List[Optional[Tuple[Time, int]]] = [None]
    # Actions on the path to each node; fewer wins a tie on time, so waiting
    # for a TIL beats re-achieving its literal
    lengths: List[int] = [0]
    state0, til0 = apply_tils(state0, 0, 0)
    # Keyed on (state, next TIL, reached by an action); an action-reached node
    # dominates a wait-reached one with the same state at a later time
    best_time: Dict[Tuple[int, int, bool], Time] = {(state0, til0, True): 0}

    def dominated(state: int, til_index: int, when: Time, via_action: bool) -> bool:
        known = best_time.get((state, til_index, True))
        if known is not None and (known <= when if via_action else known < when):
            return True
        if via_action:
            return False
        known = best_time.get((state, til_index, False))
        return known is not None and known <= when

    start_key = (unmet(state0), 0, 0, next(seq)) if greedy else (0, 0, next(seq))
    frontier = [(start_key, 0, state0, 0, til0, True)]
    expanded = 0

    def result(outcome: PlanOutcome, plan_obj: Optional[Plan] = None) -> PlanResult:
        elapsed = wallclock.perf_counter() - started
        logger.debug(f"Planner {mode.value}: {outcome.value} after {expanded} expansions in {elapsed:.3f}s")
        return PlanResult(outcome, plan_obj, expanded, elapsed)

    while frontier:
        _, node, state, now, til_index, via_action = heapq.heappop(frontier)
        if best_time.get((state, til_index, via_action), now) < now:
            continue
        if not via_action and best_time.get((state, til_index, True), now) < now:
            continue
        if via_action and reached(state):
            return result(PlanOutcome.SOLVED, _extract(node, parents, steps, compiled))
        expanded += 1
        if expanded > node_budget:
            return result(PlanOutcome.RESOURCE_LIMIT)

        successors: List[Tuple[int, Time, int, Optional[Tuple[Time, int]]]] = []
        for index, act in enumerate(compiled):
            if not act.applicable(state):
                continue
            end = now + act.duration
            if end > bound:
                continue
            nxt, nxt_til = apply_tils(state, til_index, end)
            nxt = (nxt & ~act.delete) | act.add
            successors.append((nxt, end, nxt_til, (now, index)))
        if til_index < len(til_list) and til_times[til_index] <= bound:
            wake = til_times[til_index]
            nxt, nxt_til = apply_tils(state, til_index, wake)
            successors.append((nxt, wake, nxt_til, None))

        for nxt, when, nxt_til, step in successors:
            via_action = step is not None
            if dominated(nxt, nxt_til, when, via_action):
                continue
            best_time[(nxt, nxt_til, via_action)] = when
            length = lengths[node] + (1 if via_action else 0)
            parents.append(node)
            steps.append(step)
            lengths.append(length)
            child = len(parents) - 1
            priority = (unmet(nxt), when, length, next(seq)) if greedy else (when, length, next(seq))
            heapq.heappush(frontier, (priority, child, nxt, when, nxt_til, via_action))

    return result(PlanOutcome.UNSOLVABLE)


def _extract(node: int, parents: List[int], steps, compiled: List[_CompiledAction]) -> Plan:
    timed: List[TimedAction] = []
    while node > 0:
        step = steps[node]
        if step is not None:
            start, index = step
            timed.append(TimedAction(start, compiled[index].action))
        node = parents[node]
    timed.reverse()
    return Plan(tuple(timed))


def plan_problem(domain: Domain, problem: Problem, **kwargs) -> PlanResult:
    objects = {k: v for k, v in problem.objects.items() if k not in domain.constants}
    return plan(domain, problem.init, problem.objective, problem.tils, objects=objects, **kwargs)


def makespan(plan_obj: Plan) -> Time:
    return plan_obj.makespan
