"""
Logging configuration shared by the CLI and the API.

Debug mode logs human-readable lines; otherwise records are emitted as JSON
through python-json-logger. Everything goes to stderr so stdout stays free for
command documents.
"""

import logging
import sys

from .config import settings

_CONFIGURED = False


def configure_logging(level: str | None = None, debug: bool | None = None) -> None:
    """Install the root handler once per process."""
    global _CONFIGURED
    if _CONFIGURED:
        return

    level = (level or settings.log_level).upper()
    debug = settings.debug if debug is None else debug

    handler = logging.StreamHandler(sys.stderr)
    if debug:
        handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
    else:
        from pythonjsonlogger import json

        handler.setFormatter(
            json.JsonFormatter(
                "%(asctime)s %(name)s %(levelname)s %(message)s",
                rename_fields={
                    "asctime": "timestamp",
                    "levelname": "level",
                    "name": "logger",
                },
            )
        )
    logging.root.handlers = [handler]
    logging.root.setLevel(level)
    _CONFIGURED = True
