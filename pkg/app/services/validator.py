# app/services/validator.py
import logging
from typing import AbstractSet, List, Sequence, Set, Tuple

from app.models.plan import Plan, ValidationReport
from app.models.world import Atom, Literal, Time

logger = logging.getLogger("app.services.validator")  # Logger for this module


def _holds(state: AbstractSet[Atom], literal: Literal) -> bool:
    return (literal.atom in state) is literal.positive


def validate_plan(
    plan: Plan,
    init: AbstractSet[Atom],
    tils: Sequence[Tuple[Time, Literal]],
    objective: Sequence[Literal],
) -> ValidationReport:
    """
    Replays `plan` on a plain set of atoms. TILs due by a step's start are
    applied before its precondition check; TILs due by its end are applied
    before its effects.
    """
    state: Set[Atom] = set(init)
    pending: List[Tuple[Time, Literal]] = sorted(tils, key=lambda til: (til[0], str(til[1])))
    cursor = 0

    def advance(until: Time) -> None:
        nonlocal cursor
        while cursor < len(pending) and pending[cursor][0] <= until:
            literal = pending[cursor][1]
            if literal.positive:
                state.add(literal.atom)
            else:
                state.discard(literal.atom)
            cursor += 1

    clock = 0
    for index, step in enumerate(plan.steps):
        if step.start < clock:
            return ValidationReport(False, index, step.action.label, f"starts at {step.start} before {clock}", clock)
        advance(step.start)
        for literal in sorted(step.action.precondition, key=str):
            if not _holds(state, literal):
                reason = f"precondition {literal} false at {step.start}"
                logger.debug(f"Plan invalid at step {index}: {reason}")
                return ValidationReport(False, index, step.action.label, reason, step.start)
        end = step.start + step.action.duration
        advance(end)
        state.difference_update(step.action.dels)
        state.update(step.action.adds)
        clock = end

    for literal in objective:
        if not _holds(state, literal):
            return ValidationReport(False, None, None, f"objective literal {literal} false at {clock}", clock)
    return ValidationReport(True, end_time=clock)
