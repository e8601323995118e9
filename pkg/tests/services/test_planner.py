# tests/services/test_planner.py
import random

import pytest

from app.models.enums import PlanOutcome, SearchMode
from app.models.plan import GroundAction
from app.models.world import Atom, neg, pos
from app.services.planner import plan, plan_problem
from app.services.validator import validate_plan


@pytest.mark.parametrize("mode", [SearchMode.UNIFORM, SearchMode.GREEDY])
def test_toy_problem_is_solved(toy_domain, toy_problem, mode):
    result = plan_problem(toy_domain, toy_problem, mode=mode)
    assert result.solved
    assert result.plan.to_lines() == ("0 10 (go A B)", "10 10 (go B C)", "20 5 (switch-on C)")
    assert result.plan.makespan == 25


def test_xenonite_problem_waits_for_timed_literal(xenonite_domain, xenonite_problem):
    result = plan_problem(xenonite_domain, xenonite_problem, mode=SearchMode.UNIFORM)
    assert result.solved
    assert result.plan.to_lines() == (
        "0 100 (move R2D2 BASE M1-OUT)",
        "199 50 (collect-processite R2D2 C2 M1 M1-OUT)",
    )
    report = validate_plan(result.plan, xenonite_problem.init, xenonite_problem.tils, xenonite_problem.objective)
    assert report.valid
    assert report.end_time == 249


def test_objective_already_true_gives_empty_plan(toy_domain, toy_problem):
    result = plan(toy_domain, toy_problem.init, [pos("in", "A")], objects={"A": "room", "B": "room", "C": "room"})
    assert result.solved
    assert len(result.plan) == 0
    assert result.plan.makespan == 0


def test_unreachable_objective_is_unsolvable(toy_domain, toy_problem):
    objects = {"A": "room", "B": "room", "C": "room"}
    result = plan(toy_domain, toy_problem.init, [pos("in", "A"), pos("lit", "B"), neg("lit", "B")], objects=objects)
    assert result.outcome == PlanOutcome.UNSOLVABLE
    assert result.plan is None


def test_bound_cuts_off_long_plans(toy_domain, toy_problem):
    assert not plan_problem(toy_domain, toy_problem, bound=24).solved
    assert plan_problem(toy_domain, toy_problem, bound=25).solved


def test_node_budget_gives_resource_limit(toy_domain, toy_problem):
    result = plan_problem(toy_domain, toy_problem, node_budget=1)
    assert result.outcome == PlanOutcome.RESOURCE_LIMIT
    assert result.expanded == 2


@pytest.mark.parametrize("bound", [0, -5])
def test_non_positive_bound_is_rejected(toy_domain, toy_problem, bound):
    with pytest.raises(ValueError):
        plan_problem(toy_domain, toy_problem, bound=bound)


def test_plan_without_domain_or_actions_is_rejected():
    with pytest.raises(ValueError):
        plan(None, set(), [])


def test_timed_literal_enables_action():
    through = GroundAction("walk", (), frozenset({pos("door-open")}), frozenset({Atom("outside", ())}), frozenset(), 3)
    result = plan(None, set(), [pos("outside")], [(40, pos("door-open"))], actions=[through])
    assert result.plan.to_lines() == ("40 3 (walk)",)


def test_timed_literal_beyond_bound_is_ignored():
    through = GroundAction("walk", (), frozenset({pos("door-open")}), frozenset({Atom("outside", ())}), frozenset(), 3)
    result = plan(None, set(), [pos("outside")], [(40, pos("door-open"))], bound=30, actions=[through])
    assert result.outcome == PlanOutcome.UNSOLVABLE


FETCH = GroundAction("fetch", (), frozenset(), frozenset({Atom("q", ())}), frozenset(), 8)
USE = GroundAction("use", (), frozenset({pos("q")}), frozenset({Atom("r", ())}), frozenset(), 2)


@pytest.mark.parametrize("mode", [SearchMode.UNIFORM, SearchMode.GREEDY])
def test_action_reaching_a_timed_literal_state_still_counts(mode):
    result = plan(None, set(), [pos("q")], [(5, pos("q"))], actions=[FETCH], mode=mode)
    assert result.solved
    assert result.plan.to_lines() == ("0 8 (fetch)",)


@pytest.mark.parametrize("mode", [SearchMode.UNIFORM, SearchMode.GREEDY])
def test_waiting_for_timed_literal_beats_achieving_it(mode):
    result = plan(None, set(), [pos("r")], [(5, pos("q"))], actions=[FETCH, USE], mode=mode)
    assert result.plan.to_lines() == ("5 2 (use)",)


@pytest.mark.parametrize("mode", [SearchMode.UNIFORM, SearchMode.GREEDY])
def test_equal_makespan_prefers_fewer_actions(mode):
    # The timed literal and fetch both make q true at 8
    result = plan(None, set(), [pos("r")], [(8, pos("q"))], actions=[FETCH, USE], mode=mode)
    assert result.plan.to_lines() == ("8 2 (use)",)


def test_timed_delete_forces_reachieving_the_literal():
    move = GroundAction("move", (), frozenset(), frozenset({Atom("there", ())}), frozenset(), 5)
    use = GroundAction("use", (), frozenset({pos("q"), pos("there")}), frozenset({Atom("r", ())}), frozenset(), 2)
    tils = [(4, neg("q"))]
    init = {Atom("q", ())}
    result = plan(None, init, [pos("r")], tils, actions=[FETCH, move, use], mode=SearchMode.UNIFORM)
    assert result.solved
    assert result.plan.makespan == 15
    assert [step.action.name for step in result.plan.steps][-1] == "use"
    assert validate_plan(result.plan, init, tils, [pos("r")]).valid


# --- randomized checks against a replay and an exhaustive search ---

ATOMS = [Atom("p", (str(i),)) for i in range(5)]


def _random_actions(rng: random.Random, count: int):
    actions = []
    for index in range(count):
        chosen = rng.sample(ATOMS, 3)
        precondition = frozenset(
            pos("p", *a.args) if rng.random() < 0.7 else neg("p", *a.args) for a in chosen[:rng.randint(0, 2)]
        )
        adds = frozenset({chosen[2]})
        dels = frozenset(a for a in chosen[:1] if rng.random() < 0.4 and a not in adds)
        actions.append(GroundAction(f"a{index}", (), precondition, adds, dels, rng.randint(1, 9)))
    return actions


def _shortest_makespan(actions, init, objective, depth):
    best = None

    def holds(state, literal):
        return (literal.atom in state) is literal.positive

    def search(state, clock, remaining):
        nonlocal best
        if best is not None and clock >= best:
            return
        if all(holds(state, l) for l in objective):
            best = clock
            return
        if remaining == 0:
            return
        for action in actions:
            if all(holds(state, l) for l in action.precondition):
                search((state - action.dels) | action.adds, clock + action.duration, remaining - 1)

    search(frozenset(init), 0, depth)
    return best


def test_uniform_search_matches_exhaustive_search():
    rng = random.Random(11)
    for _ in range(200):
        actions = _random_actions(rng, rng.randint(1, 6))
        init = {a for a in ATOMS if rng.random() < 0.3}
        objective = [pos("p", *a.args) for a in rng.sample(ATOMS, rng.randint(1, 2))]
        result = plan(None, init, objective, actions=actions, mode=SearchMode.UNIFORM)
        reference = _shortest_makespan(actions, init, objective, depth=4)
        if reference is None:
            assert not result.solved or len(result.plan) > 4
            continue
        assert result.solved
        assert result.plan.makespan <= reference
        if len(result.plan) <= 4:
            assert result.plan.makespan == reference


def _shortest_makespan_with_tils(actions, init, tils, objective, depth):
    best = None
    timeline = sorted(tils, key=lambda til: (til[0], str(til[1])))

    def holds(state, literal):
        return (literal.atom in state) is literal.positive

    def advance(state, index, until):
        while index < len(timeline) and timeline[index][0] <= until:
            literal = timeline[index][1]
            state = state | {literal.atom} if literal.positive else state - {literal.atom}
            index += 1
        return state, index

    def search(state, clock, index, remaining):
        nonlocal best
        if best is not None and clock >= best:
            return
        if remaining > 0:
            for action in actions:
                if not all(holds(state, l) for l in action.precondition):
                    continue
                end = clock + action.duration
                after, after_index = advance(state, index, end)
                after = (after - action.dels) | action.adds
                if all(holds(after, l) for l in objective):
                    best = end if best is None else min(best, end)
                    continue
                search(after, end, after_index, remaining - 1)
        if index < len(timeline):
            wake = timeline[index][0]
            woken, woken_index = advance(state, index, wake)
            search(woken, wake, woken_index, remaining)

    state0, index0 = advance(frozenset(init), 0, 0)
    if all(holds(state0, l) for l in objective):
        return 0
    search(state0, 0, index0, depth)
    return best


def test_uniform_search_matches_exhaustive_search_with_timed_literals():
    rng = random.Random(53)
    for _ in range(200):
        actions = _random_actions(rng, rng.randint(1, 5))
        init = {a for a in ATOMS if rng.random() < 0.3}
        tils = [(rng.randint(1, 20), (pos if rng.random() < 0.6 else neg)("p", str(rng.randrange(5))))
                for _ in range(rng.randint(1, 3))]
        objective = [pos("p", *a.args) for a in rng.sample(ATOMS, rng.randint(1, 2))]
        result = plan(None, init, objective, tils, bound=200, actions=actions, mode=SearchMode.UNIFORM)
        reference = _shortest_makespan_with_tils(actions, init, tils, objective, depth=3)
        if reference is None:
            assert not result.solved or len(result.plan) > 3
            continue
        assert result.solved, f"missed a plan of makespan {reference}"
        assert result.plan.makespan <= reference
        if len(result.plan) <= 3:
            assert result.plan.makespan == reference
        assert validate_plan(result.plan, init, tils, objective).valid


@pytest.mark.parametrize("mode", [SearchMode.UNIFORM, SearchMode.GREEDY])
def test_found_plans_always_validate(mode):
    rng = random.Random(29)
    for _ in range(200):
        actions = _random_actions(rng, rng.randint(1, 6))
        init = {a for a in ATOMS if rng.random() < 0.3}
        tils = [(rng.randint(1, 30), (pos if rng.random() < 0.6 else neg)("p", str(rng.randrange(5))))
                for _ in range(rng.randint(0, 3))]
        objective = [pos("p", *a.args) for a in rng.sample(ATOMS, rng.randint(1, 2))]
        result = plan(None, init, objective, tils, bound=200, actions=actions, mode=mode)
        if result.solved:
            assert validate_plan(result.plan, init, tils, objective).valid
