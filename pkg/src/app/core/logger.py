import logging
import os
from logging.handlers import RotatingFileHandler

from .config import settings

LOGGING_LEVEL = getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
LOGGING_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# attributes every LogRecord carries; anything else arrived through extra=
_RESERVED = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class ExtraFormatter(logging.Formatter):
    """Appends the fields passed through `extra=` as key=value pairs."""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        fields = {k: v for k, v in vars(record).items() if k not in _RESERVED and not k.startswith("_")}
        if not fields:
            return line
        return line + " | " + " ".join(f"{k}={v}" for k, v in sorted(fields.items()))


def configure_logging(level: int = LOGGING_LEVEL, to_file: bool = settings.LOG_TO_FILE) -> None:
    """Install the console handler and, when enabled, the rotating lab log; safe to call twice."""
    root = logging.getLogger("")
    root.setLevel(level)
    formatter = ExtraFormatter(LOGGING_FORMAT)
    if not any(getattr(h, "_lab_handler", False) for h in root.handlers):
        console = logging.StreamHandler()
        console.setFormatter(formatter)
        console._lab_handler = True  # type: ignore[attr-defined]
        root.addHandler(console)
    if to_file and not any(isinstance(h, RotatingFileHandler) for h in root.handlers):
        os.makedirs(settings.LOG_DIR, exist_ok=True)
        file_handler = RotatingFileHandler(settings.LOG_FILE_PATH, maxBytes=10485760, backupCount=5)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)


configure_logging()


def get_logger(name: str | None = None) -> logging.Logger:
    """
    Get a logger instance for the specified module.

    Args:
        name: Logger name, typically __name__ from calling module

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)
