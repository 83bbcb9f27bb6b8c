import logging
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

from fastapi import HTTPException

from .exceptions import ArthurkitError

"""
Utility functions shared by the API routers.
"""

logger = logging.getLogger(__name__)


def sanitize_log_value(value: Any) -> str:
    """Sanitize a value for safe logging (prevent log injection)."""
    return str(value).replace("\r", "").replace("\n", "")


@contextmanager
def domain_errors() -> Iterator[None]:
    """
    Re-raise domain errors as HTTP errors.

    The response detail is the error document ``{"error", "message", "details"}``
    and the status is the error's ``http_status``.
    """
    try:
        yield
    except ArthurkitError as exc:
        logger.info("Request failed with %s: %s", exc.code, sanitize_log_value(exc.message))
        raise HTTPException(status_code=exc.http_status, detail=exc.to_dict()) from exc
