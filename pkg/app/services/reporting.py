# app/services/reporting.py
import logging
import pathlib
from typing import Dict, List, Literal, Sequence

import numpy as np
from jinja2 import Environment, PackageLoader, StrictUndefined

from app.core.config import settings
from app.models.enums import EventKind
from app.models.report import GoalSpan, PromiseStats, RunReport, SimEvent
from app.services.event_log import read_jsonl, write_jsonl

logger = logging.getLogger("app.services.reporting")  # Logger for this module

ReportFormat = Literal["text", "jsonlines", "gantt"]
REPORT_FILES: Dict[str, str] = {"text": "report.txt", "jsonlines": "events.jsonl", "gantt": "gantt.txt"}

GANTT_WIDTH = 100

_OUTCOMES = {
    EventKind.GOAL_FINISHED: "FINISHED",
    EventKind.GOAL_FAILED: "FAILED",
    EventKind.GOAL_REJECTED: "REJECTED",
    EventKind.GOAL_RETRACTED: "RETRACTED",
}

_env = Environment(
    loader=PackageLoader("app", "templates"),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _utilization(events: Sequence[SimEvent], agents: Sequence[str], final_time: int) -> Dict[str, float]:
    if final_time <= 0:
        return {agent: 0.0 for agent in agents}
    busy: Dict[str, List[int]] = {agent: [] for agent in agents}
    for event in events:
        if event.kind == EventKind.ACTION_START and event.agent in busy:
            until = min(int(event.detail.get("until", event.time)), final_time)
            busy[event.agent].append(max(0, until - event.time))
    return {agent: round(float(np.sum(spans)) / final_time, 4) if spans else 0.0 for agent, spans in busy.items()}


def build_report(events: Sequence[SimEvent]) -> RunReport:
    """Derives every report figure from the event log alone, so replayed logs give the same report."""
    start = next((e for e in events if e.kind == EventKind.RUN_START), None)
    end = next((e for e in reversed(events) if e.kind == EventKind.RUN_END), None)
    detail = start.detail if start else {}
    agents = list(detail.get("agents", sorted({e.agent for e in events if e.agent})))
    report = RunReport(
        scenario=detail.get("scenario", "unknown"),
        seed=int(detail.get("seed", 0)),
        promises_enabled=bool(detail.get("promises", False)),
        events=list(events),
    )
    if end is not None:
        report.completed = bool(end.detail.get("completed", False))
        report.timed_out = bool(end.detail.get("timed_out", False))
        report.makespan = end.detail.get("makespan")
        report.final_time = end.time
    elif events:
        report.final_time = events[-1].time

    spans: Dict[str, GoalSpan] = {}
    stats = PromiseStats()
    for event in events:
        if event.kind == EventKind.GOAL_FORMULATED:
            spans[event.goal] = GoalSpan(
                goal=event.goal,
                goal_class=event.goal_class,
                label=event.detail.get("label", event.goal),
                agent=event.agent,
                formulated_at=event.time,
                promise_dependent=bool(event.detail.get("promise_dependent", False)),
            )
            if event.detail.get("promise_dependent"):
                stats.used_in_formulation += len(event.detail.get("sources", []))
        elif event.kind == EventKind.GOAL_DISPATCHED and event.goal in spans:
            spans[event.goal].dispatched_at = event.time
        elif event.kind in _OUTCOMES and event.goal in spans:
            spans[event.goal].ended_at = event.time
            spans[event.goal].outcome = _OUTCOMES[event.kind]
        elif event.kind == EventKind.PROMISE_ISSUED:
            stats.issued += 1
        elif event.kind == EventKind.PROMISE_STALE:
            stats.stale += 1
    report.goal_spans = list(spans.values())
    report.promise_stats = stats
    report.utilization = _utilization(events, agents, report.final_time)
    return report


def _class_symbols(spans: Sequence[GoalSpan]) -> Dict[str, str]:
    symbols: Dict[str, str] = {}
    for span in spans:
        if span.goal_class in symbols:
            continue
        for ch in span.goal_class.upper() + "ABCDEFGHIJKLMNOPQRSTUVWXYZ":
            if ch.isalpha() and ch not in symbols.values():
                symbols[span.goal_class] = ch
                break
    return symbols


def render_gantt(report: RunReport, width: int = GANTT_WIDTH) -> str:
    """
    One row per agent, one bar per dispatched goal. Upper-case bars are goals
    formulated from the actual state, lower-case bars were formulated from
    promises.
    """
    header = f"# {report.scenario} seed={report.seed} promises={'on' if report.promises_enabled else 'off'}"
    bars = [s for s in report.goal_spans if s.dispatched_at is not None]
    if not bars:
        return header + "\n"
    horizon = max(report.final_time, max((s.ended_at or report.final_time) for s in bars), 1)
    scale = width / horizon
    symbols = _class_symbols(bars)
    agents = sorted({s.agent for s in bars} | set(report.utilization))
    label_width = max(len(a) for a in agents)
    lines = [header, f"# 1 column = {horizon / width:.1f} ticks, horizon {horizon}"]
    for agent in agents:
        row = [" "] * width
        for span in bars:
            if span.agent != agent:
                continue
            first = min(int(span.dispatched_at * scale), width - 1)
            last = max(first, min(int(np.ceil((span.ended_at or horizon) * scale)) - 1, width - 1))
            mark = symbols[span.goal_class]
            mark = mark.lower() if span.promise_dependent else mark
            for col in range(first, last + 1):
                row[col] = mark
        lines.append(f"{agent:<{label_width}} |{''.join(row)}|")
    legend = ", ".join(f"{sym}={cls}" for cls, sym in symbols.items())
    lines.append(f"# {legend}; lower case = formulated from promises")
    for span in sorted(bars, key=lambda s: (s.dispatched_at, s.agent, s.goal)):
        flag = "*" if span.promise_dependent else " "
        lines.append(
            f"{flag} {span.agent:<{label_width}} {span.dispatched_at:>6} - {str(span.ended_at or ''):>6} "
            f"{span.outcome or 'RUNNING':<9} {span.label}"
        )
    return "\n".join(lines) + "\n"


def render_text(report: RunReport) -> str:
    template = _env.get_template("report.txt.j2")
    dispatched = [s for s in report.goal_spans if s.dispatched_at is not None]
    return template.render(report=report, dispatched=dispatched, tick_seconds=settings.TICK_MS / 1000)


def emit_report(report: RunReport, fmt: ReportFormat, out_dir: pathlib.Path) -> pathlib.Path:
    if fmt not in REPORT_FILES:
        raise ValueError(f"Unknown report format '{fmt}'")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / REPORT_FILES[fmt]
    if fmt == "jsonlines":
        return write_jsonl(report.events, path)
    text = render_text(report) if fmt == "text" else render_gantt(report)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {fmt} report to {path}")
    return path


def emit_all(report: RunReport, out_dir: pathlib.Path) -> List[pathlib.Path]:
    return [emit_report(report, fmt, out_dir) for fmt in ("jsonlines", "text", "gantt")]


def replay(path: pathlib.Path) -> RunReport:
    events = read_jsonl(path)
    return build_report(events)


ORDER_KINDS = frozenset({
    EventKind.GOAL_FORMULATED, EventKind.GOAL_DISPATCHED, EventKind.GOAL_FINISHED, EventKind.GOAL_FAILED,
    EventKind.GOAL_REJECTED, EventKind.GOAL_RETRACTED, EventKind.ACTION_START, EventKind.ACTION_PENDING,
    EventKind.ACTION_TIMEOUT, EventKind.LOCK_DENIED, EventKind.LOCK_DEFERRED, EventKind.LOCK_HANDOVER,
})


def event_order(events: Sequence[SimEvent]) -> List[str]:
    """Compact ordering of the coordination-relevant events, one line each, as kept in the golden fixtures."""
    lines = []
    for event in events:
        if event.kind not in ORDER_KINDS:
            continue
        subject = event.action or event.resource or ""
        lines.append(f"{event.time} {event.kind.value} {event.agent} {event.goal_class} {subject}".rstrip())
    return lines
