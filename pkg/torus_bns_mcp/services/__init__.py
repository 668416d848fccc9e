from __future__ import annotations

import functools
from collections.abc import Callable
from typing import Any, TypeVar

from torus_bns_mcp.config import logger

AddTool = Callable[..., None]

F = TypeVar("F", bound=Callable[..., Any])


def logged_operation(func: F) -> F:
    """Log input and semantic failures of a service entry point before they reach the caller."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):  # type: ignore
        try:
            return func(*args, **kwargs)
        except ValueError as error:
            logger.error(f"Error executing operation '{func.__name__}': {error}")
            raise

    return wrapper  # type: ignore
