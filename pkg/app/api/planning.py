# app/api/planning.py
import logging

from fastapi import APIRouter

from app.api import deps
from app.core.config import settings
from app.core.exceptions import ExecutiveError
from app.models.api import PlanRequest, PlanResponse
from app.models.enums import SearchMode
from app.services.pddl_parser import parse_domain, parse_problem
from app.services.planner import plan_problem
from app.services.validator import validate_plan

logger = logging.getLogger("app.api.planning")  # Logger for this module
router = APIRouter()


@router.post("/plan", response_model=PlanResponse)
def plan_api(request: PlanRequest):
    """
    Plans a PDDL problem against a PDDL domain. Solved plans are replayed by
    the validator before they are returned.
    """
    try:
        domain = parse_domain(request.domain, source="domain")
        problem = parse_problem(request.problem, domain, source="problem")
    except ExecutiveError as e:
        raise deps.http_error(e)

    result = plan_problem(domain, problem, mode=SearchMode(request.mode or settings.PLANNER_MODE))
    if not result.solved:
        return PlanResponse(outcome=result.outcome.value, expanded=result.expanded)

    check = validate_plan(result.plan, problem.init, problem.tils, problem.objective)
    if not check.valid:
        logger.error(f"Planner returned an invalid plan: step {check.failed_step} {check.reason}")
    return PlanResponse(
        outcome=result.outcome.value,
        steps=list(result.plan.to_lines()),
        makespan=result.plan.makespan,
        expanded=result.expanded,
        valid=check.valid,
    )
