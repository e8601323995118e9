# tests/api/test_planning_api.py
from fastapi.testclient import TestClient

from app.core.config import settings

PLAN_URL = f"{settings.API_V1_STR}/plan"
XENONITE_DIR = settings.DATA_DIR / "xenonite"


def test_plan_toy_problem(client: TestClient, toy_text):
    response = client.post(PLAN_URL, json={**toy_text, "mode": "uniform"})
    assert response.status_code == 200
    body = response.json()
    assert body["outcome"] == "solved"
    assert body["steps"] == ["0 10 (go A B)", "10 10 (go B C)", "20 5 (switch-on C)"]
    assert body["makespan"] == 25
    assert body["valid"] is True


def test_plan_xenonite_problem_with_timed_literals(client: TestClient):
    payload = {
        "domain": (XENONITE_DIR / "domain.pddl").read_text(encoding="utf-8"),
        "problem": (XENONITE_DIR / "problem.pddl").read_text(encoding="utf-8"),
        "mode": "uniform",
    }
    body = client.post(PLAN_URL, json=payload).json()
    assert body["makespan"] == 249
    assert body["steps"][-1].startswith("199 50 (collect-processite R2D2")


def test_plan_unsolvable(client: TestClient, toy_text):
    problem = toy_text["problem"].replace("(connected B C)", "")
    body = client.post(PLAN_URL, json={"domain": toy_text["domain"], "problem": problem}).json()
    assert body["outcome"] == "unsolvable"
    assert body["steps"] == []
    assert body["valid"] is None


def test_plan_syntax_error_is_422_with_position(client: TestClient, toy_text):
    response = client.post(PLAN_URL, json={"domain": toy_text["domain"] + ")", "problem": toy_text["problem"]})
    assert response.status_code == 422
    assert response.json()["detail"].startswith("domain:")


def test_plan_unknown_mode_is_rejected(client: TestClient, toy_text):
    response = client.post(PLAN_URL, json={**toy_text, "mode": "astar"})
    assert response.status_code == 422
