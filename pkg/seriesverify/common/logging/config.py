import json
import logging
import logging.config
import os
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Iterator

# Record being verified in the current thread or worker, e.g. {"record_id": "C3.1.ii"}
_verification_context: ContextVar[Dict[str, Any]] = ContextVar("verification_context", default={})

# Attributes every LogRecord carries; anything else came from `extra=` or the context
_RECORD_ATTRIBUTES = frozenset(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(context)s%(message)s"


@contextmanager
def verification_context(**fields: Any) -> Iterator[None]:
    """Attach fields (record id, prime, sample) to every log line emitted inside the block."""
    token = _verification_context.set({**_verification_context.get(), **fields})
    try:
        yield
    finally:
        _verification_context.reset(token)


class ContextFilter(logging.Filter):
    """Copies the active verification context onto each record and renders it for text logs."""

    def filter(self, record: logging.LogRecord) -> bool:
        context = _verification_context.get()
        for key, value in context.items():
            if not hasattr(record, key):
                setattr(record, key, value)
        record.context = "".join(f"[{key}={value}] " for key, value in context.items())
        return True


class JSONFormatter(logging.Formatter):
    """
    One JSON object per line: timestamp, service, logger, level, message,
    plus the verification context and any `extra=` fields.
    """
    def __init__(self, service_name):
        self.service_name = service_name
        super().__init__()

    def format(self, record):
        logobj = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "service": self.service_name,
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }

        if record.exc_info:
            logobj["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RECORD_ATTRIBUTES and key != "context":
                logobj[key] = value

        return json.dumps(logobj, default=str)


def configure_logging(service_name, log_level=None):
    """
    Configure logging for the verifier.

    Diagnostics go to stderr; stdout is reserved for reports. LOG_FORMAT=json
    switches to JSON lines.
    """
    log_level = (log_level or os.environ.get("LOG_LEVEL", "INFO")).upper()
    formatter = "json" if os.environ.get("LOG_FORMAT", "").lower() == "json" else "text"

    logging.config.dictConfig({
        "version": 1,
        "disable_existing_loggers": False,
        "filters": {
            "context": {"()": ContextFilter},
        },
        "formatters": {
            "json": {"()": JSONFormatter, "service_name": service_name},
            "text": {"format": TEXT_FORMAT},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": formatter,
                "filters": ["context"],
                "stream": "ext://sys.stderr",
            }
        },
        "root": {"handlers": ["console"], "level": log_level},
    })
