# app/core/alert_handler.py
import logging
import traceback
from contextlib import contextmanager
from typing import Iterator, List

from app.models.report import RunAlert


class RunAlertHandler(logging.Handler):
    """
    Collects ERROR and CRITICAL records emitted while a simulation runs so the
    run report can list them next to the event log.
    """
    def __init__(self, level=logging.ERROR):
        super().__init__(level)
        self.alerts: List[RunAlert] = []

    def emit(self, record: logging.LogRecord):
        if record.levelno < logging.ERROR:
            return
        details = None
        if record.exc_info:
            details = "".join(traceback.format_exception(*record.exc_info))
        try:
            self.alerts.append(RunAlert(
                level=record.levelname,
                logger=record.name,
                message=record.getMessage(),
                sim_time=getattr(record, "sim_time", None),
                details=details,
            ))
        except Exception:
            self.handleError(record)


@contextmanager
def collect_run_alerts(logger_name: str = "app") -> Iterator[RunAlertHandler]:
    """Attaches a RunAlertHandler to `logger_name` for the duration of the block."""
    handler = RunAlertHandler()
    target = logging.getLogger(logger_name)
    target.addHandler(handler)
    try:
        yield handler
    finally:
        target.removeHandler(handler)
