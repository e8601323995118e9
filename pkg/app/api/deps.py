# app/api/deps.py
import logging

from fastapi import HTTPException, status

from app.core.exceptions import (
    ExecutiveError, LocatedError, ScenarioLoadError, UnsupportedFeatureError,
)
from app.models.scenario import Scenario
from app.services.scenario_loader import load_scenario, resolve_scenario_path

logger = logging.getLogger("app.api.deps")  # Logger for this module


def http_error(e: ExecutiveError) -> HTTPException:
    """Maps executive errors onto HTTP status codes."""
    if isinstance(e, ScenarioLoadError) and "not found" in e.message:
        code = status.HTTP_404_NOT_FOUND
    elif isinstance(e, (LocatedError, UnsupportedFeatureError)):
        code = status.HTTP_422_UNPROCESSABLE_ENTITY
    else:
        code = status.HTTP_400_BAD_REQUEST
    logger.warning(f"Request failed with {code}: {e}")
    return HTTPException(status_code=code, detail=str(e))


def get_scenario(name: str) -> Scenario:
    # Only shipped scenarios are reachable over HTTP
    if "/" in name or "\\" in name or name.startswith("."):
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=f"Invalid scenario name '{name}'")
    try:
        return load_scenario(resolve_scenario_path(name))
    except ExecutiveError as e:
        raise http_error(e)
