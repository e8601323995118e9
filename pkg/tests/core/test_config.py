# tests/core/test_config.py
from app.core.config import get_settings, Settings


def test_get_settings_loads_defaults():
    settings = get_settings()
    assert isinstance(settings, Settings)
    assert settings.PROJECT_NAME == "Promise Goal Reasoning Executive"
    assert settings.TICK_MS == 100
    assert settings.PENDING_TIMEOUT == 300
    assert settings.STALENESS_GRACE == 1
    assert settings.OBJECT_PRIORITY == {"M2": 1}
    assert settings.DEFER_ON_ANY_HOLDER is False


def test_settings_read_environment(monkeypatch):
    monkeypatch.setenv("PLANNER_MODE", "uniform")
    monkeypatch.setenv("PENDING_TIMEOUT", "42")
    fresh = Settings()
    assert fresh.PLANNER_MODE == "uniform"
    assert fresh.PENDING_TIMEOUT == 42


def test_shipped_directories_exist():
    settings = get_settings()
    assert (settings.DATA_DIR / "xenonite" / "domain.pddl").exists()
    assert settings.SCENARIO_DIR.is_dir()
