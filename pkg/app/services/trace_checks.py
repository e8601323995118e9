# app/services/trace_checks.py
"""
Post-hoc checks over a finished event log. Each check returns a list of
human-readable violations; an empty list means the trace is clean.
"""
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

from app.models.enums import EventKind
from app.models.plan import GroundAction
from app.models.report import SimEvent
from app.models.scenario import Scenario
from app.services.coordination import is_promised, promised
from app.services.grounding import ground_schema
from app.services.pddl_parser import parse_atom

logger = logging.getLogger("app.services.trace_checks")  # Logger for this module

_LOCK_KINDS = (
    EventKind.LOCK_GRANTED, EventKind.LOCK_DEFERRED, EventKind.LOCK_HANDOVER, EventKind.LOCK_RELEASED,
)


def check_mutual_exclusion(events: Sequence[SimEvent]) -> List[str]:
    holders: Dict[str, str] = {}
    problems: List[str] = []
    for event in events:
        if event.kind not in _LOCK_KINDS or event.resource is None:
            continue
        resource, goal = event.resource, event.goal
        if event.kind == EventKind.LOCK_RELEASED:
            if holders.get(resource) != goal:
                problems.append(f"t={event.time}: {goal} releases {resource} held by {holders.get(resource)}")
            holders.pop(resource, None)
            continue
        current = holders.get(resource)
        if current is not None and current != goal:
            problems.append(f"t={event.time}: {goal} acquires {resource} while {current} holds it")
        holders[resource] = goal
    return problems


def check_handover_sequence(events: Sequence[SimEvent]) -> List[str]:
    """Every handover of R follows: promised-R acquired, R released by its holder, R handed over, promised-R released."""
    problems: List[str] = []
    shadow_holder: Dict[str, str] = {}
    for index, event in enumerate(events):
        if event.kind == EventKind.LOCK_DEFERRED and event.resource:
            shadow_holder[event.resource] = event.goal
        elif event.kind == EventKind.LOCK_RELEASED and event.resource and is_promised(event.resource):
            shadow_holder.pop(event.resource, None)
        if event.kind != EventKind.LOCK_HANDOVER:
            continue
        resource = event.resource
        if shadow_holder.get(promised(resource)) != event.goal:
            problems.append(f"t={event.time}: handover of {resource} to {event.goal} without {promised(resource)}")
        previous = events[index - 1] if index > 0 else None
        if previous is None or previous.kind != EventKind.LOCK_RELEASED or previous.resource != resource \
                or previous.goal != event.detail.get("from_goal"):
            problems.append(f"t={event.time}: handover of {resource} not preceded by its release")
        following = events[index + 1] if index + 1 < len(events) else None
        if following is None or following.kind != EventKind.LOCK_RELEASED \
                or following.resource != promised(resource) or following.goal != event.goal \
                or following.time != event.time:
            problems.append(f"t={event.time}: {promised(resource)} not released right after the handover")
    return problems


def _ground_from_label(scenario: Scenario, label: str, cache: Dict[str, GroundAction]) -> Optional[GroundAction]:
    action = cache.get(label)
    if action is None:
        atom = parse_atom(label)
        try:
            schema = scenario.domain.action(atom.predicate)
        except KeyError:
            return None
        binding = dict(zip((name for name, _ in schema.params), atom.args))
        action = ground_schema(schema, binding)
        cache[label] = action
    return action


def check_action_purity(events: Sequence[SimEvent], scenario: Scenario) -> List[str]:
    """Replays the world from the scenario's initial state; no action may start with a false precondition."""
    state: Set = set(scenario.init)
    cache: Dict[str, GroundAction] = {}
    problems: List[str] = []
    for event in events:
        if event.kind not in (EventKind.ACTION_START, EventKind.ACTION_DONE) or event.action is None:
            continue
        action = _ground_from_label(scenario, event.action, cache)
        if action is None:
            problems.append(f"t={event.time}: unknown action {event.action}")
            continue
        if event.kind == EventKind.ACTION_START:
            false = [str(l) for l in sorted(action.precondition, key=str) if (l.atom in state) != l.positive]
            if false:
                problems.append(f"t={event.time}: {event.agent} starts {event.action} with false {', '.join(false)}")
        else:
            state.difference_update(action.dels)
            state.update(action.adds)
    return problems


def check_promise_acyclicity(events: Sequence[SimEvent]) -> List[str]:
    """A goal may only depend on promises of goals dispatched before it was formulated."""
    dispatched: Dict[str, int] = {}
    edges: Dict[str, List[str]] = {}
    problems: List[str] = []
    for event in events:
        if event.kind == EventKind.GOAL_DISPATCHED:
            dispatched[event.goal] = event.time
        elif event.kind == EventKind.GOAL_FORMULATED:
            sources = list(event.detail.get("sources", []))
            edges[event.goal] = sources
            for source in sources:
                if source not in dispatched:
                    problems.append(f"t={event.time}: {event.goal} relies on undispatched {source}")

    state: Dict[str, int] = {}

    def visit(node: str, path: Tuple[str, ...]) -> None:
        mark = state.get(node, 0)
        if mark == 1:
            problems.append(f"promise cycle: {' -> '.join(path + (node,))}")
            return
        if mark == 2:
            return
        state[node] = 1
        for nxt in edges.get(node, ()):
            visit(nxt, path + (node,))
        state[node] = 2

    for node in sorted(edges):
        visit(node, ())
    return problems


def check_promise_store(events: Sequence[SimEvent]) -> List[str]:
    """Promises come from dispatched goals and are retracted when their goal ends."""
    active: Dict[str, int] = {}
    dispatched: Set[str] = set()
    ended: Dict[str, int] = {}
    problems: List[str] = []
    for event in events:
        if event.kind == EventKind.GOAL_DISPATCHED:
            dispatched.add(event.goal)
        elif event.kind == EventKind.PROMISE_ISSUED:
            if event.goal not in dispatched:
                problems.append(f"t={event.time}: promise of undispatched goal {event.goal}")
            active[event.goal] = active.get(event.goal, 0) + 1
        elif event.kind == EventKind.PROMISE_RETRACTED:
            if not active.get(event.goal):
                problems.append(f"t={event.time}: retraction without promise for {event.goal}")
            else:
                active[event.goal] -= 1
        elif event.kind in (EventKind.GOAL_FINISHED, EventKind.GOAL_FAILED):
            ended[event.goal] = event.time
    for goal, time in sorted(ended.items()):
        if active.get(goal):
            problems.append(f"t={time}: {goal} ended with {active[goal]} promise(s) still active")
    return problems


def run_all(events: Sequence[SimEvent], scenario: Optional[Scenario] = None) -> Dict[str, List[str]]:
    results = {
        "mutual-exclusion": check_mutual_exclusion(events),
        "handover-sequence": check_handover_sequence(events),
        "promise-acyclicity": check_promise_acyclicity(events),
        "promise-store": check_promise_store(events),
    }
    if scenario is not None:
        results["action-purity"] = check_action_purity(events, scenario)
    for name, problems in results.items():
        for problem in problems:
            logger.error(f"{name}: {problem}")
    return results
