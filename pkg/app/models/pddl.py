# app/models/pddl.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from app.models.world import Atom, Literal, Signature, Time

Param = Tuple[str, str]  # (variable without '?', type)


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: Tuple[Param, ...]
    precondition: Tuple[Literal, ...]
    adds: Tuple[Atom, ...]
    dels: Tuple[Atom, ...]
    duration: Time = 1
    # (not (= ?a ?b)) pairs, resolved statically at grounding time
    distinct: Tuple[Tuple[str, str], ...] = ()

    def with_duration(self, duration: Time) -> "ActionSchema":
        return ActionSchema(self.name, self.params, self.precondition, self.adds, self.dels, duration, self.distinct)


@dataclass(frozen=True)
class Domain:
    name: str
    types: Tuple[str, ...]
    predicates: Mapping[str, Tuple[str, ...]]
    actions: Tuple[ActionSchema, ...]
    constants: Mapping[str, str] = field(default_factory=dict)

    def action(self, name: str) -> ActionSchema:
        for schema in self.actions:
            if schema.name == name:
                return schema
        raise KeyError(name)

    def static_predicates(self) -> FrozenSet[str]:
        """Predicates no action ever adds or deletes."""
        touched: Set[str] = set()
        for schema in self.actions:
            touched.update(a.predicate for a in schema.adds)
            touched.update(a.predicate for a in schema.dels)
        return frozenset(p for p in self.predicates if p not in touched)

    def with_durations(self, durations: Mapping[str, Time]) -> "Domain":
        actions = tuple(s.with_duration(durations[s.name]) if s.name in durations else s for s in self.actions)
        return Domain(self.name, self.types, self.predicates, actions, self.constants)

    def signature(self, objects: Optional[Mapping[str, str]] = None) -> Signature:
        table: Dict[str, str] = dict(self.constants)
        if objects:
            table.update(objects)
        return Signature(self.predicates, table)


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: Mapping[str, str]
    init: FrozenSet[Atom]
    tils: Tuple[Tuple[Time, Literal], ...] = ()
    objective: Tuple[Literal, ...] = ()

    def objects_by_type(self) -> Dict[str, List[str]]:
        table: Dict[str, List[str]] = {}
        for obj, typ in self.objects.items():
            table.setdefault(typ, []).append(obj)
        for objs in table.values():
            objs.sort()
        return table
