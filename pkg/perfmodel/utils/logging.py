"""Logging setup for the perfmodel command line and API server."""

import logging
import sys
from pathlib import Path
from typing import Optional

CONSOLE_FORMAT = "perfmodel: %(levelname)s %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Third-party loggers and the level they are held at.
_QUIET = {"httpx": logging.WARNING, "uvicorn": logging.INFO, "uvicorn.access": logging.WARNING}


def setup_logging(
    log_level: str = "WARNING",
    log_file: Optional[str] = None,
    log_format: str = FILE_FORMAT,
) -> None:
    """Route log records to stderr and optionally to a file.

    stdout carries command results only, so the console handler writes to stderr
    in a short format. The file handler, when given, gets timestamps and always
    records DEBUG and above, whatever the console level.

    Args:
        log_level: Console level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Log file path, relative to the working directory
        log_format: Format string for the log file

    Raises:
        ValueError: if log_level is not a logging level name
    """
    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level: {log_level}")

    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    root.addHandler(console)
    root.setLevel(level)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(log_format))
        root.addHandler(file_handler)
        root.setLevel(logging.DEBUG)

    for name, quiet_level in _QUIET.items():
        logging.getLogger(name).setLevel(quiet_level)
