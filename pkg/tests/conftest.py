# tests/conftest.py
import logging

import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from app.main import app
from app.services.pddl_parser import parse_domain, parse_goal_operators, parse_problem
from app.services.scenario_loader import load_scenario

XENONITE_DIR = settings.DATA_DIR / "xenonite"

# A two-action toy domain used by planner, validator and parser tests
TOY_DOMAIN = """
(define (domain toy)
  (:requirements :strips :typing :negative-preconditions)
  (:types room)
  (:predicates (in ?r - room) (connected ?a - room ?b - room) (lit ?r - room))
  (:action go
    :parameters (?from - room ?to - room)
    :duration 10
    :precondition (and (in ?from) (connected ?from ?to))
    :effect (and (not (in ?from)) (in ?to)))
  (:action switch-on
    :parameters (?r - room)
    :duration 5
    :precondition (and (in ?r) (not (lit ?r)))
    :effect (and (lit ?r)))
)
"""

TOY_PROBLEM = """
(define (problem toy-1)
  (:domain toy)
  (:objects A B C - room)
  (:init (in A) (connected A B) (connected B C))
  (:goal (and (lit C)))
)
"""


@pytest.fixture(scope="module")
def client() -> TestClient:
    """Provides a TestClient for making API requests."""
    return TestClient(app)


@pytest.fixture(scope="session")
def xenonite_domain():
    path = XENONITE_DIR / "domain.pddl"
    return parse_domain(path.read_text(encoding="utf-8"), source=str(path))


@pytest.fixture(scope="session")
def xenonite_operators(xenonite_domain):
    path = XENONITE_DIR / "goals.gop"
    return {op.class_name: op for op in parse_goal_operators(path.read_text(encoding="utf-8"), xenonite_domain)}


@pytest.fixture(scope="session")
def xenonite_problem(xenonite_domain):
    path = XENONITE_DIR / "problem.pddl"
    return parse_problem(path.read_text(encoding="utf-8"), xenonite_domain, source=str(path))


@pytest.fixture(scope="session")
def toy_domain():
    return parse_domain(TOY_DOMAIN, source="toy-domain")


@pytest.fixture(scope="session")
def toy_problem(toy_domain):
    return parse_problem(TOY_PROBLEM, toy_domain, source="toy-problem")


@pytest.fixture(scope="session")
def toy_text():
    """Raw PDDL text of the toy domain and problem."""
    return {"domain": TOY_DOMAIN, "problem": TOY_PROBLEM}


@pytest.fixture(scope="session")
def load():
    """Loads a shipped scenario by name; results are cached for the session."""
    cache = {}

    def _load(name: str):
        if name not in cache:
            cache[name] = load_scenario(name)
        return cache[name]

    return _load


def pytest_configure(config):
    """
    Hook to configure logging levels before tests are run.
    This silences noisy third-party libraries.
    """
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("httpcore").setLevel(logging.WARNING)
