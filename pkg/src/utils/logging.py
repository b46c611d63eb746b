"""Logging utilities with structured key=value fields."""

import logging
from typing import Any


class FieldFormatter(logging.Formatter):
    """Formatter that appends structured fields passed via ``extra={"fields": {...}}``."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record and append its structured fields.

        Args:
            record: Log record to format

        Returns:
            Formatted message followed by ``key=value`` pairs
        """
        message = super().format(record)
        fields = getattr(record, "fields", None)
        if fields:
            message = f"{message} | {format_fields(fields)}"
        return message


def format_fields(fields: dict[str, Any]) -> str:
    """Render a field mapping as space separated ``key=value`` pairs."""
    parts = []
    for key, value in fields.items():
        if isinstance(value, float):
            parts.append(f"{key}={value:.6g}")
        else:
            parts.append(f"{key}={value}")
    return " ".join(parts)


def setup_logger(
    name: str,
    level: str = "INFO",
    format_str: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
) -> logging.Logger:
    """Set up a logger with structured-field formatting.

    Args:
        name: Logger name
        level: Logging level
        format_str: Log format string

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    # Remove existing handlers
    logger.handlers = []

    handler = logging.StreamHandler()
    handler.setLevel(getattr(logging, level.upper()))
    handler.setFormatter(FieldFormatter(format_str))

    logger.addHandler(handler)

    return logger
