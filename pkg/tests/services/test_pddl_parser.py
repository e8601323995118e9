# tests/services/test_pddl_parser.py
import random

import pytest

from app.core.exceptions import (
    ConfigurationError, PddlSemanticError, PddlSyntaxError, UnsupportedFeatureError,
)
from app.models.world import Atom, TimedState, neg, pos
from app.services.grounding import ground_schema
from app.services.pddl_parser import (
    emit_problem, parse_atom, parse_domain, parse_goal_operators, parse_literal, parse_problem, read_sexps,
)
from app.services.world import satisfies_all


def test_parse_literal_positive_and_negative():
    assert parse_literal("(robot-at WALL-E BASE)") == pos("robot-at", "WALL-E", "BASE")
    assert parse_literal("(not (storage-is-full))") == neg("storage-is-full")
    assert parse_atom("(machine-in-state M1 READY)") == Atom("machine-in-state", ("M1", "READY"))


def test_parse_atom_rejects_negation():
    with pytest.raises(PddlSyntaxError):
        parse_atom("(not (container-can-be-filled C1))")


def test_unbalanced_parenthesis_is_a_syntax_error():
    with pytest.raises(PddlSyntaxError) as exc:
        read_sexps("(define (domain x)\n  (:types a b)\n", source="broken.pddl")
    assert exc.value.source == "broken.pddl"


def test_stray_closing_parenthesis_has_position():
    with pytest.raises(PddlSyntaxError) as exc:
        read_sexps("(a b)\n  )", source="x")
    assert exc.value.line == 2


def test_xenonite_domain_shape(xenonite_domain):
    assert xenonite_domain.name == "xenonite"
    names = [a.name for a in xenonite_domain.actions]
    assert names == [
        "move", "pick-container", "fill-container", "deliver-container",
        "start-machine", "collect-processite", "collect-xenonite", "store-container",
    ]
    assert xenonite_domain.constants["BASE"] == "loc"
    assert xenonite_domain.constants["READY"] == "mstate"
    assert "robot" in xenonite_domain.types


def test_toy_domain_actions(toy_domain):
    go = toy_domain.action("go")
    assert go.duration == 10
    assert [p for p, _ in go.params] == ["from", "to"]
    assert Atom("in", ("?to",)) in go.adds
    assert Atom("in", ("?from",)) in go.dels


def test_untyped_action_duration_defaults_to_one():
    domain = parse_domain("""
    (define (domain d) (:types t) (:predicates (p ?x - t))
      (:action a :parameters (?x - t) :precondition (and) :effect (and (p ?x))))
    """)
    assert domain.action("a").duration == 1


def test_unknown_requirement_is_unsupported():
    with pytest.raises(UnsupportedFeatureError):
        parse_domain("(define (domain d) (:requirements :fluents))")


def test_type_hierarchy_is_unsupported():
    with pytest.raises(UnsupportedFeatureError):
        parse_domain("(define (domain d) (:types car - vehicle))")


def test_duplicate_action_is_semantic_error():
    text = """
    (define (domain d) (:types t) (:predicates (p ?x - t))
      (:action a :parameters (?x - t) :precondition (and) :effect (and (p ?x)))
      (:action a :parameters (?x - t) :precondition (and) :effect (and (p ?x))))
    """
    with pytest.raises(PddlSemanticError):
        parse_domain(text)


def test_unknown_predicate_in_action_reports_line():
    text = "(define (domain d) (:types t) (:predicates (p ?x - t))\n" \
           "  (:action a :parameters (?x - t)\n" \
           "     :precondition (and (q ?x)) :effect (and (p ?x))))"
    with pytest.raises(PddlSemanticError) as exc:
        parse_domain(text)
    assert exc.value.line == 3


def test_over_all_condition_is_unsupported():
    text = """
    (define (domain d) (:requirements :durative-actions) (:types t) (:predicates (p ?x - t))
      (:durative-action a :parameters (?x - t) :duration (= ?duration 5)
        :condition (and (over all (p ?x))) :effect (and (at end (p ?x)))))
    """
    with pytest.raises(UnsupportedFeatureError):
        parse_domain(text)


def test_disjunction_is_unsupported():
    text = """
    (define (domain d) (:types t) (:predicates (p ?x - t))
      (:action a :parameters (?x - t) :precondition (or (p ?x) (p ?x)) :effect (and (p ?x))))
    """
    with pytest.raises(UnsupportedFeatureError):
        parse_domain(text)


def test_problem_with_timed_initial_literals(xenonite_problem):
    assert xenonite_problem.domain_name == "xenonite"
    assert xenonite_problem.tils == (
        (199, pos("machine-in-state", "M1", "READY")),
        (199, neg("machine-in-state", "M1", "FILLED")),
    )
    assert Atom("robot-at", ("R2D2", "BASE")) in xenonite_problem.init
    assert pos("container-filled", "C2", "PROCESSITE") in xenonite_problem.objective


def test_til_time_must_be_positive(toy_domain):
    text = "(define (problem p) (:domain toy) (:objects A - room) (:init (at 0 (in A))) (:goal (and (in A))))"
    with pytest.raises(PddlSemanticError):
        parse_problem(text, toy_domain)


def test_problem_with_badly_typed_object(xenonite_domain):
    text = """
    (define (problem p) (:domain xenonite) (:objects R2D2 - robot)
      (:init (robot-at BASE R2D2)) (:goal (and (robot-at R2D2 BASE))))
    """
    with pytest.raises(PddlSemanticError):
        parse_problem(text, xenonite_domain)


def test_metric_is_ignored(toy_domain):
    text = "(define (problem p) (:domain toy) (:objects A - room) (:init (in A)) (:goal (and (in A))) (:metric minimize (total-time)))"
    assert parse_problem(text, toy_domain).objective == (pos("in", "A"),)


def test_emitted_problem_parses_back(toy_domain, toy_problem):
    text = emit_problem(
        TimedState(toy_problem.init, 0),
        toy_problem.objective,
        [(5, pos("lit", "B"))],
        {"A": "room", "B": "room", "C": "room"},
        domain_name="toy",
    )
    again = parse_problem(text, toy_domain)
    assert again.init == toy_problem.init
    assert again.objective == toy_problem.objective
    assert again.tils == ((5, pos("lit", "B")),)


ROOMS = {"A": "room", "B": "room", "C": "room"}


def _toy_atoms():
    rooms = sorted(ROOMS)
    atoms = [Atom("in", (r,)) for r in rooms] + [Atom("lit", (r,)) for r in rooms]
    return atoms + [Atom("connected", (a, b)) for a in rooms for b in rooms if a != b]


def _round_trip(toy_domain, init, objective, tils):
    text = emit_problem(TimedState(frozenset(init), 0), objective, tils, ROOMS, domain_name="toy")
    return parse_problem(text, toy_domain)


@pytest.mark.parametrize("tils", [
    [],
    [(1, neg("lit", "C"))],
    [(3, pos("in", "B")), (3, neg("in", "A")), (40, pos("lit", "B"))],
])
def test_emitted_problem_keeps_timed_literals(toy_domain, toy_problem, tils):
    again = _round_trip(toy_domain, toy_problem.init, toy_problem.objective, tils)
    assert again.init == toy_problem.init
    assert again.tils == tuple(sorted(tils, key=lambda til: (til[0], str(til[1]))))
    assert again.objects == ROOMS


def test_emitted_problem_with_ten_random_timed_literals(toy_domain, toy_problem):
    rng = random.Random(3)
    atoms = _toy_atoms()
    tils = []
    while len(tils) < 10:
        atom = rng.choice(atoms)
        til = (rng.randint(1, 500), pos(atom.predicate, *atom.args) if rng.random() < 0.5 else neg(atom.predicate, *atom.args))
        if til not in tils:
            tils.append(til)
    again = _round_trip(toy_domain, toy_problem.init, toy_problem.objective, tils)
    assert len(again.tils) == 10
    assert set(again.tils) == set(tils)
    assert [when for when, _ in again.tils] == sorted(when for when, _ in tils)


def test_randomized_problems_survive_emit_and_parse(toy_domain):
    rng = random.Random(17)
    atoms = _toy_atoms()
    for _ in range(50):
        init = {a for a in atoms if rng.random() < 0.4}
        objective = [
            pos(a.predicate, *a.args) if rng.random() < 0.7 else neg(a.predicate, *a.args)
            for a in rng.sample(atoms, rng.randint(1, 3))
        ]
        tils = {
            (rng.randint(1, 100), pos(a.predicate, *a.args) if rng.random() < 0.5 else neg(a.predicate, *a.args))
            for a in rng.sample(atoms, rng.randint(0, 4))
        }
        again = _round_trip(toy_domain, init, objective, sorted(tils, key=lambda til: (til[0], str(til[1]))))
        assert again.init == frozenset(init)
        assert again.objective == tuple(objective)
        assert set(again.tils) == tils


def test_goal_operators_of_xenonite(xenonite_operators):
    assert set(xenonite_operators) == {"FillContainer", "Deliver", "StartMachine", "CleanMachine", "DeliverXenonite"}
    clean = xenonite_operators["CleanMachine"]
    assert clean.lookahead_time == 200
    assert clean.param_names == ("r", "side", "machine", "c", "mat")
    assert clean.agent_param == "r"
    assert clean.required_resources == ("?machine",)
    assert neg("storage-is-full") in clean.precondition
    assert clean.promise_templates[0].literal == pos("machine-in-state", "?machine", "IDLE")
    assert clean.template_offset(clean.promise_templates[0]) == clean.est_duration


def test_robots_may_share_a_location(xenonite_domain):
    assert "location-is-free" not in xenonite_domain.predicates
    schema = xenonite_domain.action("move")
    move = ground_schema(schema, {param: arg for (param, _), arg in zip(schema.params, ("R2D2", "BASE", "M1-IN"))})
    state = {Atom("robot-at", ("R2D2", "BASE")), Atom("robot-at", ("WALL-E", "M1-IN"))}
    assert satisfies_all(state, move.precondition)


def _gop(body: str) -> str:
    return f"""
    (goal-operator (class G)
      (param-names r m) (param-types robot machine) (param-quantified)
      (est-duration 10)
      {body})
    """


def test_goal_operator_promise_offset(xenonite_domain):
    text = _gop('(preconditions "(and)") (objective "(and (machine-in-state ?m READY))") '
                '(promises "(and (at 20 (machine-in-state ?m READY)))")')
    op = parse_goal_operators(text, xenonite_domain)[0]
    assert op.template_offset(op.promise_templates[0]) == 20


def test_goal_operator_unbound_variable_is_configuration_error(xenonite_domain):
    text = _gop('(preconditions "(and (robot-at ?r ?where))") (objective "(and (machine-in-state ?m READY))")')
    with pytest.raises(ConfigurationError):
        parse_goal_operators(text, xenonite_domain)


def test_goal_operator_quantified_params_unsupported(xenonite_domain):
    text = """
    (goal-operator (class G) (param-names r) (param-types robot) (param-quantified r)
      (preconditions "(and)") (objective "(and)") (est-duration 1))
    """
    with pytest.raises(UnsupportedFeatureError):
        parse_goal_operators(text, xenonite_domain)


def test_goal_operator_missing_objective_is_syntax_error(xenonite_domain):
    text = '(goal-operator (class G) (param-names r) (param-types robot) (preconditions "(and)") (est-duration 1))'
    with pytest.raises(PddlSyntaxError):
        parse_goal_operators(text, xenonite_domain)


def test_goal_operator_formula_error_points_into_file(xenonite_domain):
    text = '(goal-operator (class G)\n (param-names r) (param-types robot)\n (preconditions "\n (and (nonsense ?r))")\n (objective "(and)") (est-duration 1))'
    with pytest.raises(PddlSemanticError) as exc:
        parse_goal_operators(text, xenonite_domain)
    assert exc.value.line == 4
