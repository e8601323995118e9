# app/models/world.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Tuple

from app.core.exceptions import ContractViolation, SignatureError

Time = int  # simulated ticks, 1 tick = 100 ms
INFINITY = float("inf")


class Atom(NamedTuple):
    predicate: str
    args: Tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"


class Literal(NamedTuple):
    atom: Atom
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"


def pos(predicate: str, *args: str) -> Literal:
    return Literal(Atom(predicate, tuple(args)), True)


def neg(predicate: str, *args: str) -> Literal:
    return Literal(Atom(predicate, tuple(args)), False)


@dataclass(frozen=True)
class Signature:
    """Predicate arities/types plus the typed object table of one problem."""
    predicates: Mapping[str, Tuple[str, ...]]
    objects: Mapping[str, str] = field(default_factory=dict)  # object -> type

    def check_atom(self, atom: Atom) -> None:
        types = self.predicates.get(atom.predicate)
        if types is None:
            raise SignatureError(f"Unknown predicate '{atom.predicate}' in {atom}")
        if len(types) != len(atom.args):
            raise SignatureError(
                f"Arity mismatch for '{atom.predicate}': expected {len(types)}, got {len(atom.args)} in {atom}"
            )
        if self.objects:
            for arg, expected in zip(atom.args, types):
                actual = self.objects.get(arg)
                if actual is None:
                    raise SignatureError(f"Unknown object '{arg}' in {atom}")
                if actual != expected:
                    raise SignatureError(f"Object '{arg}' has type '{actual}', expected '{expected}' in {atom}")

    def check_literal(self, literal: Literal) -> None:
        self.check_atom(literal.atom)

    def objects_by_type(self) -> Dict[str, List[str]]:
        table: Dict[str, List[str]] = {}
        for obj, typ in self.objects.items():
            table.setdefault(typ, []).append(obj)
        for objs in table.values():
            objs.sort()
        return table


@dataclass(frozen=True)
class TimedState:
    atoms: FrozenSet[Atom]
    time: Time = 0

    def with_time(self, time: Time) -> "TimedState":
        if time < self.time:
            raise ContractViolation(f"Clock may not run backwards ({self.time} -> {time})")
        return TimedState(self.atoms, time)


@dataclass(frozen=True)
class WorldUpdate:
    """
    One message on the shared world model. Carries fact changes and promise
    records (`promise ...` / `retract ...` lines, see app.services.promises).
    """
    origin: str
    seq: int
    adds: FrozenSet[Atom] = frozenset()
    dels: FrozenSet[Atom] = frozenset()
    promise_records: Tuple[str, ...] = ()

    def __post_init__(self):
        overlap = self.adds & self.dels
        if overlap:
            raise ContractViolation(
                f"WorldUpdate {self.origin}#{self.seq} adds and deletes {sorted(map(str, overlap))}"
            )
