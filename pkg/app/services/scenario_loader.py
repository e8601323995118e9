# app/services/scenario_loader.py
import json
import logging
import pathlib
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import ExecutiveError, ScenarioLoadError
from app.models.scenario import Scenario, ScenarioConfig
from app.services.pddl_parser import parse_atom, parse_domain, parse_goal_operators, parse_literal

logger = logging.getLogger("app.services.scenario_loader")  # Logger for this module


def _locate(text: str, needle: str) -> Tuple[Optional[int], Optional[int]]:
    """Line/column of the first occurrence of `needle` in the scenario text."""
    index = text.find(needle)
    if index < 0:
        return None, None
    line = text.count("\n", 0, index) + 1
    column = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, column


def _error(message: str, text: str, needle: str, source: str) -> ScenarioLoadError:
    line, column = _locate(text, needle)
    return ScenarioLoadError(message, line, column, source)


def _resolve(reference: str, scenario_dir: pathlib.Path) -> pathlib.Path:
    candidate = pathlib.Path(reference)
    if candidate.is_absolute():
        return candidate
    for base in (scenario_dir, settings.DATA_DIR):
        if (base / candidate).exists():
            return base / candidate
    return settings.DATA_DIR / candidate


def resolve_scenario_path(name_or_path: Union[str, pathlib.Path]) -> pathlib.Path:
    path = pathlib.Path(name_or_path)
    if path.is_file():
        return path
    shipped = settings.SCENARIO_DIR / f"{path.stem if path.suffix == '.json' else path.name}.json"
    if shipped.exists():
        return shipped
    raise ScenarioLoadError(f"scenario '{name_or_path}' not found", source=str(name_or_path))


def list_scenarios() -> List[str]:
    return sorted(p.stem for p in settings.SCENARIO_DIR.glob("*.json"))


def load_scenario(path: Union[str, pathlib.Path]) -> Scenario:
    """Reads a scenario file and cross-validates every name it references."""
    path = resolve_scenario_path(path)
    source = str(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioLoadError(f"invalid JSON: {e.msg}", e.lineno, e.colno, source) from e
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = str(first["loc"][0]) if first["loc"] else ""
        where = ".".join(str(part) for part in first["loc"])
        raise _error(f"{where}: {first['msg']}", text, f'"{field}"', source) from e

    domain_path = _resolve(config.domain, path.parent)
    gop_path = _resolve(config.goal_operators, path.parent)
    for key, ref in (("domain", domain_path), ("goal_operators", gop_path)):
        if not ref.exists():
            raise _error(f"{key} file '{ref}' does not exist", text, f'"{key}"', source)

    domain = parse_domain(domain_path.read_text(encoding="utf-8"), source=str(domain_path))

    missing = [a.name for a in domain.actions if a.name not in config.durations]
    if missing:
        raise _error(f"missing duration for action(s) {', '.join(missing)}", text, '"durations"', source)
    for action_name, ticks in config.durations.items():
        if not any(a.name == action_name for a in domain.actions):
            raise _error(f"duration given for unknown action '{action_name}'", text, f'"{action_name}"', source)
        if ticks < 1:
            raise _error(f"duration of '{action_name}' must be at least 1 tick", text, f'"{action_name}"', source)
    domain = domain.with_durations(config.durations)

    table: Dict[str, str] = {}
    for type_name, names in config.objects.items():
        if type_name not in domain.types:
            raise _error(f"unknown type '{type_name}'", text, f'"{type_name}"', source)
        for name in names:
            if name in table or name in domain.constants:
                raise _error(f"object '{name}' declared twice", text, f'"{name}"', source)
            table[name] = type_name
    signature = domain.signature(table)

    def checked(entry: str, positive_only: bool):
        try:
            value = parse_atom(entry) if positive_only else parse_literal(entry)
            signature.check_atom(value if positive_only else value.atom)
        except ExecutiveError as e:
            raise _error(f"{entry}: {e}", text, entry, source) from e
        return value

    init = frozenset(checked(entry, True) for entry in config.init)
    objective = tuple(checked(entry, False) for entry in config.objective)

    seen = set()
    for agent in config.agents:
        if agent.id in seen:
            raise _error(f"agent '{agent.id}' listed twice", text, f'"{agent.id}"', source)
        if agent.id not in signature.objects:
            raise _error(f"agent '{agent.id}' is not a declared object", text, f'"{agent.id}"', source)
        seen.add(agent.id)
    for agent_id in config.faults.suppress_release_agents:
        if agent_id not in seen:
            raise _error(f"fault names unknown agent '{agent_id}'", text, '"faults"', source)

    operators = parse_goal_operators(gop_path.read_text(encoding="utf-8"), domain, source=str(gop_path))
    logger.info(f"Loaded scenario '{config.name}': {len(seen)} agents, {len(table)} objects, {len(operators)} goal operators")
    return Scenario(
        config=config,
        path=path,
        domain=domain,
        operators=tuple(operators),
        signature=signature,
        init=init,
        objective=objective,
    )
