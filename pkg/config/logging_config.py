"""
Logging setup for the command-line runner.
Plain text by default, JSON lines when LOG_FORMAT=json.
"""
import logging
import sys

from pythonjsonlogger import jsonlogger

from config import settings

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
JSON_FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'


def setup_logging(level: str = None, fmt: str = None) -> logging.Logger:
    """
    Configure the root logger once.

    Args:
        level: Log level name, defaults to settings.LOG_LEVEL
        fmt: 'text' or 'json', defaults to settings.LOG_FORMAT

    Returns:
        The root logger
    """
    level = (level or settings.LOG_LEVEL).upper()
    fmt = fmt or settings.LOG_FORMAT

    handler = logging.StreamHandler(sys.stderr)
    if fmt == 'json':
        handler.setFormatter(jsonlogger.JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(getattr(logging, level, logging.INFO))
    return root
