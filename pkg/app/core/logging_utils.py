import atexit
import logging
import logging.config
import logging.handlers
import pathlib
import json
import datetime as dt
from typing import Dict, Any, Optional, Set

# Attributes from LogRecord that are often included by default or are special
LOG_RECORD_BUILTIN_ATTRS: Set[str] = {
    "args", "asctime", "created", "exc_info", "exc_text", "filename",
    "funcName", "levelname", "levelno", "lineno", "module", "msecs",
    "message", "msg", "name", "pathname", "process", "processName",
    "relativeCreated", "stack_info", "thread", "threadName", "taskName",
}

# Simulation context callers pass through `extra=`; always emitted first when present
SIM_CONTEXT_KEYS = ("sim_time", "agent", "goal_id")


class SimJSONFormatter(logging.Formatter):
    def __init__(self, *, fmt_keys: Optional[Dict[str, str]] = None, datefmt: Optional[str] = None):
        super().__init__(datefmt=datefmt)
        self.fmt_keys = fmt_keys if fmt_keys is not None else {}

    def format(self, record: logging.LogRecord) -> str:
        message = self._prepare_log_dict(record)
        return json.dumps(message, default=str)

    def _prepare_log_dict(self, record: logging.LogRecord) -> Dict[str, Any]:
        always_fields: Dict[str, Any] = {"message": record.getMessage()}
        if self.datefmt:
            always_fields["timestamp"] = self.formatTime(record, self.datefmt)
        else:
            always_fields["timestamp"] = dt.datetime.fromtimestamp(
                record.created, tz=dt.timezone.utc
            ).isoformat()

        if record.exc_info:
            always_fields["exc_info"] = self.formatException(record.exc_info)
        if record.stack_info:
            always_fields["stack_info"] = self.formatStack(record.stack_info)

        message_dict: Dict[str, Any] = {}
        for key in SIM_CONTEXT_KEYS:
            if hasattr(record, key):
                message_dict[key] = getattr(record, key)

        for key, attr in self.fmt_keys.items():
            if attr in always_fields:
                message_dict[key] = always_fields[attr]
            else:
                val = getattr(record, attr, None)
                if val is not None:
                    message_dict[key] = val

        for key, value in always_fields.items():
            if key not in message_dict:
                message_dict[key] = value

        # Remaining user extras
        for key, val in record.__dict__.items():
            if key not in LOG_RECORD_BUILTIN_ATTRS and key not in message_dict and key not in self.fmt_keys.values():
                message_dict[key] = val

        return message_dict


def sim_context(sim_time: int, agent: Optional[str] = None, goal_id: Optional[str] = None) -> Dict[str, Any]:
    """Builds the `extra=` dict used by simulation loggers."""
    ctx: Dict[str, Any] = {"sim_time": sim_time}
    if agent is not None:
        ctx["agent"] = agent
    if goal_id is not None:
        ctx["goal_id"] = goal_id
    return ctx


_queue_handler_instance: Optional[logging.handlers.QueueHandler] = None


def configure_logging_from_file(console_level: Optional[str] = None) -> Optional[logging.handlers.QueueHandler]:
    """Loads logging configuration from the JSON file and starts the QueueHandler listener."""
    global _queue_handler_instance
    config_file = pathlib.Path(__file__).resolve().parent.parent / "logging_config.json"
    try:
        with open(config_file) as f_in:
            config = json.load(f_in)
        if console_level:
            config["handlers"]["console_info_and_above"]["level"] = console_level

        pathlib.Path("logs").mkdir(exist_ok=True)
        logging.config.dictConfig(config)

        for handler in logging.getLogger().handlers:
            if isinstance(handler, logging.handlers.QueueHandler):
                _queue_handler_instance = handler
                break
        if _queue_handler_instance is None:
            logging.getLogger("app.core.logging_setup").error(
                "QueueHandler not found in root logger. Off-thread logging will not work as intended."
            )
        elif getattr(_queue_handler_instance, "listener", None) is not None:
            _queue_handler_instance.listener.start()
            atexit.register(_queue_handler_instance.listener.stop)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        print(f"ERROR: Failed to load logging configuration {config_file}: {e}. Falling back to basic logging.")
        logging.basicConfig(level=logging.INFO, format='%(levelname)-8s [%(name)s] %(message)s')
    except Exception as e:
        print(f"ERROR: Failed to configure logging from file: {e}. Falling back to basic logging.")
        logging.basicConfig(level=logging.INFO, format='%(levelname)-8s [%(name)s] %(message)s')
    return _queue_handler_instance
