# app/services/world.py
import logging
from typing import AbstractSet, Iterable, Optional

from app.core.exceptions import ContractViolation
from app.models.world import Atom, Literal, Signature, TimedState, WorldUpdate

logger = logging.getLogger("app.services.world")  # Logger for this module


def satisfies(state_atoms: AbstractSet[Atom], literal: Literal, signature: Optional[Signature] = None) -> bool:
    """Closed-world check: absent atoms are false."""
    if signature is not None:
        signature.check_literal(literal)
    return (literal.atom in state_atoms) == literal.positive


def satisfies_all(state_atoms: AbstractSet[Atom], literals: Iterable[Literal], signature: Optional[Signature] = None) -> bool:
    for literal in literals:
        if not satisfies(state_atoms, literal, signature):
            return False
    return True


def apply_effects(state: TimedState, adds: AbstractSet[Atom], dels: AbstractSet[Atom]) -> TimedState:
    overlap = set(adds) & set(dels)
    if overlap:
        raise ContractViolation(f"Effects add and delete {sorted(map(str, overlap))}")
    if not adds and not dels:
        return state
    return TimedState((state.atoms - frozenset(dels)) | frozenset(adds), state.time)


def wm_apply(update: WorldUpdate, local: TimedState) -> TimedState:
    """
    Applies the fact part of one shared-world-model update. Ordering and
    duplicate suppression per (origin, seq) are handled by WorldReplica.
    """
    return apply_effects(local, update.adds, update.dels)
