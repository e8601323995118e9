# tests/core/test_logging.py
import json
import logging

from app.core.alert_handler import collect_run_alerts
from app.core.exceptions import PddlSyntaxError
from app.core.logging_utils import SimJSONFormatter, sim_context


def _record(msg="hello", level=logging.INFO, **extra):
    record = logging.LogRecord("app.services.agent", level, __file__, 10, msg, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_json_formatter_puts_sim_context_first():
    formatter = SimJSONFormatter(fmt_keys={"level": "levelname", "logger": "name"})
    line = formatter.format(_record(**sim_context(120, agent="R2D2", goal_id="CleanMachine#abc#1")))
    data = json.loads(line)
    assert list(data)[:3] == ["sim_time", "agent", "goal_id"]
    assert data["sim_time"] == 120
    assert data["level"] == "INFO"
    assert data["message"] == "hello"


def test_sim_context_omits_missing_fields():
    assert sim_context(5) == {"sim_time": 5}


def test_collect_run_alerts_keeps_errors_only():
    logger = logging.getLogger("app.tests.alerts")
    with collect_run_alerts() as handler:
        logger.warning("just a warning")
        logger.error("lock table broken", extra=sim_context(7))
    logger.error("after the block")
    assert len(handler.alerts) == 1
    assert handler.alerts[0].message == "lock table broken"
    assert handler.alerts[0].sim_time == 7
    assert handler.alerts[0].logger == "app.tests.alerts"


def test_located_error_message_carries_position():
    error = PddlSyntaxError("unbalanced parenthesis", 3, 7, "domain.pddl")
    assert str(error) == "domain.pddl:3:7: unbalanced parenthesis"
    assert error.line == 3 and error.column == 7
