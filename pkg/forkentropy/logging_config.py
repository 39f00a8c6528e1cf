"""
Logging setup shared by every forkentropy command.

The CLI calls ``setup_logging`` once; modules only ever call ``get_logger(__name__)``.
Console records go to stderr because stdout carries command results.
"""
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Union

CONSOLE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
CONSOLE_DATE_FORMAT = "%H:%M:%S"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(funcName)s() - %(message)s"
FILE_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LEVEL_VARIABLE = "FORKENTROPY_LOG_LEVEL"


def _resolve_level(level: Union[int, str, None]) -> int:
    """Numeric level from a name, a number, or the environment; unknown names mean INFO."""
    if level is None:
        level = os.getenv(LEVEL_VARIABLE, "INFO")
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logging(
    log_level: Union[int, str, None] = None,
    log_file: Optional[Union[str, Path]] = None,
) -> logging.Logger:
    """
    Configure the root logger for a command run.

    Args:
        log_level: Console level name or number; falls back to
            FORKENTROPY_LOG_LEVEL, then INFO
        log_file: Optional file that receives every record at DEBUG level,
            with source locations

    Returns:
        The root logger
    """
    console_level = _resolve_level(log_level)

    root = logging.getLogger()
    # repeated calls (tests, embedding) must not stack handlers
    root.handlers.clear()
    root.setLevel(logging.DEBUG if log_file else console_level)

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(console_level)
    console.setFormatter(logging.Formatter(fmt=CONSOLE_FORMAT, datefmt=CONSOLE_DATE_FORMAT))
    root.addHandler(console)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        to_file = logging.FileHandler(path, encoding="utf-8")
        to_file.setLevel(logging.DEBUG)
        to_file.setFormatter(logging.Formatter(fmt=FILE_FORMAT, datefmt=FILE_DATE_FORMAT))
        root.addHandler(to_file)
        root.debug(f"Logging to console at {logging.getLevelName(console_level)} and to {path}")
    else:
        root.debug(f"Logging to console at {logging.getLevelName(console_level)}")
    return root


def get_logger(name: str) -> logging.Logger:
    """Module logger; pass ``__name__``."""
    return logging.getLogger(name)
