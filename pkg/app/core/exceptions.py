# app/core/exceptions.py
from typing import Optional


class ExecutiveError(Exception):
    """Base class for every error raised by the executive."""


class SignatureError(ExecutiveError):
    """Unknown predicate, arity mismatch or badly typed object."""


class ContractViolation(ExecutiveError):
    """A caller broke an operation's precondition (e.g. overlapping adds/dels)."""


class ConfigurationError(ExecutiveError):
    """Bad goal-operator, scenario or object-table configuration."""


class UnsupportedFeatureError(ExecutiveError):
    """Input uses a construct outside the supported subset."""


class ComparisonError(ExecutiveError):
    """Two run reports cannot be compared."""


class LocatedError(ExecutiveError):
    """An error that points at a line/column of some input text."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self.__str__())

    def __str__(self) -> str:
        where = ""
        if self.source:
            where += f"{self.source}:"
        if self.line is not None:
            where += f"{self.line}:{self.column if self.column is not None else 0}: "
        elif where:
            where += " "
        return f"{where}{self.message}"


class PddlSyntaxError(LocatedError):
    pass


class PddlSemanticError(LocatedError):
    """Duplicate names, unknown types/objects, bad TIL times."""


class ScenarioLoadError(LocatedError):
    pass


class EventLogError(LocatedError):
    """Malformed events.jsonl record."""
