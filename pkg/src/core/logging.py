"""
Logging configuration for the platoon route planner.
"""
import logging
import sys
from typing import Optional

from src.core.config import settings


def configure_logging(level: Optional[str] = None) -> None:
    """Configure application-wide logging.

    Sets up the stdout handler, formatter and level based on application
    settings. An explicit ``level`` overrides ``settings.LOG_LEVEL``.
    """
    level_name = (level or settings.LOG_LEVEL).upper()
    log_level = getattr(logging, level_name, logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Remove existing handlers to avoid duplicates
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
    root_logger.addHandler(console_handler)

    # Set higher log level for noisy libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)
    logging.getLogger("tenacity").setLevel(logging.WARNING)

    logging.debug("Logging configured with level: %s", level_name)
