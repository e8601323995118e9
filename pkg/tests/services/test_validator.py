# tests/services/test_validator.py
import pytest

from app.core.exceptions import ContractViolation
from app.models.plan import GroundAction, Plan, TimedAction
from app.models.world import Atom, neg, pos
from app.services.grounding import ground_schema
from app.services.validator import validate_plan


def _ground(domain, name, *args):
    schema = domain.action(name)
    return ground_schema(schema, {param: arg for (param, _), arg in zip(schema.params, args)})


def test_valid_toy_plan(toy_domain, toy_problem):
    steps = (
        TimedAction(0, _ground(toy_domain, "go", "A", "B")),
        TimedAction(10, _ground(toy_domain, "go", "B", "C")),
        TimedAction(20, _ground(toy_domain, "switch-on", "C")),
    )
    report = validate_plan(Plan(steps), toy_problem.init, toy_problem.tils, toy_problem.objective)
    assert report.valid
    assert report.end_time == 25
    assert report.failed_step is None


def test_failed_precondition_names_the_step(toy_domain, toy_problem):
    steps = (
        TimedAction(0, _ground(toy_domain, "go", "A", "B")),
        TimedAction(10, _ground(toy_domain, "switch-on", "C")),
    )
    report = validate_plan(Plan(steps), toy_problem.init, toy_problem.tils, toy_problem.objective)
    assert not report.valid
    assert report.failed_step == 1
    assert report.failed_action == "(switch-on C)"
    assert "(in C)" in report.reason


def test_gaps_between_steps_are_allowed(toy_domain, toy_problem):
    steps = (
        TimedAction(3, _ground(toy_domain, "go", "A", "B")),
        TimedAction(40, _ground(toy_domain, "go", "B", "C")),
        TimedAction(50, _ground(toy_domain, "switch-on", "C")),
    )
    report = validate_plan(Plan(steps), toy_problem.init, (), toy_problem.objective)
    assert report.valid
    assert report.end_time == 55


def test_overlapping_steps_cannot_form_a_plan(toy_domain):
    with pytest.raises(ContractViolation):
        Plan((TimedAction(0, _ground(toy_domain, "go", "A", "B")), TimedAction(5, _ground(toy_domain, "go", "B", "C"))))


def test_unmet_objective_is_reported(toy_domain, toy_problem):
    report = validate_plan(Plan((TimedAction(0, _ground(toy_domain, "go", "A", "B")),)), toy_problem.init, (), toy_problem.objective)
    assert not report.valid
    assert report.failed_step is None
    assert "objective" in report.reason
    assert report.end_time == 10


def test_empty_plan_checks_objective_on_initial_state(toy_problem):
    assert validate_plan(Plan(), toy_problem.init, (), [pos("in", "A")]).valid
    assert not validate_plan(Plan(), toy_problem.init, (), toy_problem.objective).valid


def test_timed_literal_due_at_start_is_seen(xenonite_domain, xenonite_problem):
    collect = _ground(xenonite_domain, "collect-processite", "R2D2", "C2", "M1", "M1-OUT")
    move = _ground(xenonite_domain, "move", "R2D2", "BASE", "M1-OUT")
    on_time = Plan((TimedAction(0, move), TimedAction(199, collect)))
    too_early = Plan((TimedAction(0, move), TimedAction(198, collect)))
    args = (xenonite_problem.init, xenonite_problem.tils, xenonite_problem.objective)
    assert validate_plan(on_time, *args).valid
    report = validate_plan(too_early, *args)
    assert not report.valid
    assert report.failed_step == 1
    assert report.failed_action == "(collect-processite R2D2 C2 M1 M1-OUT)"
    assert report.end_time == 198
    assert "machine-in-state M1 READY" in report.reason


def test_timed_literal_due_before_end_precedes_effects():
    light = Atom("light", ())
    switch = GroundAction("switch", (), frozenset(), frozenset({light}), frozenset(), 10)
    # The timed delete lands inside the action; the add effect at the end wins
    report = validate_plan(Plan((TimedAction(0, switch),)), set(), [(5, neg("light"))], [pos("light")])
    assert report.valid
    report = validate_plan(Plan((TimedAction(0, switch),)), set(), [(15, neg("light"))], [pos("light")])
    assert report.valid


@pytest.mark.parametrize("start, valid", [(11, False), (12, True)])
def test_step_right_before_enabling_timed_literal_is_named(start, valid):
    walk = GroundAction("walk", ("R2D2",), frozenset({pos("door-open")}), frozenset({Atom("outside", ())}), frozenset(), 3)
    report = validate_plan(Plan((TimedAction(start, walk),)), set(), [(12, pos("door-open"))], [pos("outside")])
    assert report.valid is valid
    if not valid:
        assert report.failed_step == 0
        assert report.failed_action == "(walk R2D2)"
        assert report.reason == "precondition (door-open) false at 11"
