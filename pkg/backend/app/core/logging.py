import logging
import sys
from typing import Optional

import structlog

from config import settings


def configure_logging(level: Optional[str] = None, json_output: Optional[bool] = None):
    """Route structlog output to stderr so stdout stays reserved for reports"""
    level_name = (level or settings.log_level).upper()
    numeric_level = getattr(logging, level_name, logging.WARNING)
    use_json = settings.log_json if json_output is None else json_output

    renderer = (
        structlog.processors.JSONRenderer()
        if use_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
