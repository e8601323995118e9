# app/services/grounding.py
import itertools
import logging
from typing import AbstractSet, Dict, List, Mapping, Optional, Sequence

from app.models.pddl import ActionSchema, Domain
from app.models.plan import GroundAction
from app.models.world import Atom, Literal
from app.services.goal_model import ground_literal, ground_term
from app.services.world import satisfies

logger = logging.getLogger("app.services.grounding")  # Logger for this module


def ground_schema(schema: ActionSchema, binding: Mapping[str, str]) -> GroundAction:
    precondition = frozenset(ground_literal(lit, binding) for lit in schema.precondition)
    adds = frozenset(ground_literal(Literal(a), binding).atom for a in schema.adds)
    dels = frozenset(ground_literal(Literal(d), binding).atom for d in schema.dels)
    # An atom both deleted and added ends up true
    dels = dels - adds
    args = tuple(binding[name] for name, _ in schema.params)
    return GroundAction(schema.name, args, precondition, adds, dels, schema.duration)


def _distinct_ok(schema: ActionSchema, binding: Mapping[str, str]) -> bool:
    return all(ground_term(a, binding) != ground_term(b, binding) for a, b in schema.distinct)


def ground_actions(
    domain: Domain,
    objects: Mapping[str, str],
    init: Optional[AbstractSet[Atom]] = None,
    restrict: Optional[Mapping[str, Sequence[str]]] = None,
    prune: bool = True,
) -> List[GroundAction]:
    """
    Typed Cartesian grounding of every schema, in domain order and sorted
    object order. `(not (= ?a ?b))` pairs are resolved here; with `init`
    given, literals over static predicates are evaluated against it too.
    `restrict` narrows a type to the listed objects (an agent's own robot).
    """
    table: Dict[str, str] = dict(domain.constants)
    table.update(objects)
    by_type: Dict[str, List[str]] = {}
    for obj, typ in table.items():
        by_type.setdefault(typ, []).append(obj)
    for objs in by_type.values():
        objs.sort()
    if restrict:
        for typ, allowed in restrict.items():
            by_type[typ] = [o for o in by_type.get(typ, []) if o in set(allowed)]

    static = domain.static_predicates() if init is not None else frozenset()
    result: List[GroundAction] = []
    for schema in domain.actions:
        static_pre = [lit for lit in schema.precondition if lit.atom.predicate in static]
        names = [name for name, _ in schema.params]
        domains = [by_type.get(typ, []) for _, typ in schema.params]
        for values in itertools.product(*domains):
            binding = dict(zip(names, values))
            if prune and not _distinct_ok(schema, binding):
                continue
            if prune and static_pre and not all(satisfies(init, ground_literal(lit, binding)) for lit in static_pre):
                continue
            result.append(ground_schema(schema, binding))
    logger.debug(f"Grounded {len(result)} actions of domain '{domain.name}'")
    return result
