# app/services/event_log.py
import itertools
import json
import pathlib
from typing import Iterable, Iterator, List, Optional, Union

from app.core.exceptions import EventLogError
from app.models.enums import EventKind
from app.models.goal import Goal
from app.models.report import SimEvent


class EventLog:
    """Run event log. Records are ordered by (time, emission sequence)."""

    def __init__(self):
        self.events: List[SimEvent] = []
        self._seq = itertools.count()

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[SimEvent]:
        return iter(self.events)

    def emit(
        self,
        time: int,
        kind: EventKind,
        agent: Optional[str] = None,
        goal: Union[Goal, str, None] = None,
        action: Optional[str] = None,
        resource: Optional[str] = None,
        **detail,
    ) -> SimEvent:
        goal_id, goal_class = None, None
        if isinstance(goal, Goal):
            goal_id, goal_class = goal.id, goal.class_name
        elif goal is not None:
            goal_id, goal_class = goal, goal.split("#", 1)[0]
        event = SimEvent(
            time=time,
            seq=next(self._seq),
            kind=kind,
            agent=agent,
            goal=goal_id,
            goal_class=goal_class,
            action=action,
            resource=resource,
            detail=detail,
        )
        self.events.append(event)
        return event


def write_jsonl(events: Iterable[SimEvent], path: pathlib.Path) -> pathlib.Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f_out:
        for event in events:
            f_out.write(event.to_json_line())
            f_out.write("\n")
    return path


def read_jsonl(path: pathlib.Path) -> List[SimEvent]:
    events: List[SimEvent] = []
    with open(path, encoding="utf-8") as f_in:
        for number, line in enumerate(f_in, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(SimEvent.model_validate(json.loads(line)))
            except (json.JSONDecodeError, ValueError) as e:
                raise EventLogError(f"malformed event record: {e}", number, 1, str(path)) from e
    return events
