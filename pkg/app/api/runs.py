# app/api/runs.py
import logging
import pathlib
from typing import List

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import HTMLResponse
from fastapi.templating import Jinja2Templates

from app.api import deps
from app.core.exceptions import ExecutiveError
from app.models.api import RunRequest, RunSummary, ScenarioInfo
from app.models.report import RunReport
from app.services import reporting, scenario_loader
from app.services.simulator import run as run_scenario

logger = logging.getLogger("app.api.runs")  # Logger for this module
router = APIRouter()

templates = Jinja2Templates(directory=str(pathlib.Path(__file__).resolve().parent.parent / "templates"))


def _execute(request: RunRequest) -> RunReport:
    scenario = deps.get_scenario(request.scenario).with_overrides(
        seed=request.seed, promises=request.promises, lookahead=request.lookahead
    )
    try:
        return run_scenario(scenario)
    except ExecutiveError as e:
        raise deps.http_error(e)


@router.get("/scenarios", response_model=List[ScenarioInfo])
def list_scenarios_api():
    """Lists the shipped scenarios."""
    infos = []
    for name in scenario_loader.list_scenarios():
        try:
            scenario = scenario_loader.load_scenario(name)
        except ExecutiveError as e:
            logger.error(f"Shipped scenario '{name}' does not load: {e}")
            continue
        infos.append(ScenarioInfo(
            name=scenario.name,
            description=scenario.config.description,
            agents=scenario.agent_ids,
            promises_enabled=scenario.config.promises_enabled,
            tick_bound=scenario.config.tick_bound,
        ))
    return infos


@router.post("/runs", response_model=RunSummary)
def create_run_api(request: RunRequest):
    """Runs a shipped scenario synchronously and returns its summary."""
    report = _execute(request)
    logger.info(f"API run of '{report.scenario}' seed {report.seed}: makespan {report.makespan}")
    return RunSummary.from_report(report, reporting.render_gantt(report), include_events=request.include_events)


@router.post("/runs/report", response_class=HTMLResponse)
def create_run_report_api(request: Request, run_request: RunRequest):
    report = _execute(run_request)
    if not report.events:
        raise HTTPException(status_code=500, detail="Run produced no events")
    return templates.TemplateResponse(request, "run_report.html", {
        "report": report,
        "gantt": reporting.render_gantt(report),
        "dispatched": [s for s in report.goal_spans if s.dispatched_at is not None],
    })
