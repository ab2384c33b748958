"""Package logging setup

Modules log through ``logging.getLogger(__name__)``; the CLI configures the
``oodrl_bench`` logger once per command so every module logger inherits it.
"""

import json
import logging
import sys
from typing import Literal, Optional, TextIO

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class JsonFormatter(logging.Formatter):
    """One JSON object per record; exceptions go in an ``exc_info`` field"""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "time": self.formatTime(record),
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        if record.exc_info:
            entry["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False)


def setup_logger(
    name: str,
    level: int | str = logging.INFO,
    format_type: Literal["text", "json"] = "text",
    stream: TextIO | None = None,
) -> logging.Logger:
    """Configure a logger with a single stream handler

    Args:
        name: Logger name, normally the package name
        level: Logging level as int or name ("DEBUG", "INFO", ...)
        format_type: "text" for human-readable or "json" for structured logs
        stream: Defaults to stderr, which keeps stdout free for tables

    Returns:
        Configured logger instance
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers.clear()

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setLevel(level)
    if format_type == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    logger.addHandler(handler)

    return logger


def logger_settings(name: str) -> Optional[tuple[int, str]]:
    """Level and format of a logger set up by ``setup_logger``, None if it was not"""
    logger = logging.getLogger(name)
    if not logger.handlers:
        return None
    is_json = any(isinstance(h.formatter, JsonFormatter) for h in logger.handlers)
    return logger.level, "json" if is_json else "text"
