"""
Standardized error handling for CLI commands.

Errors are mapped to exit codes and rendered as one JSON object on stderr:
- Configuration errors (ModelConfigurationError anywhere in the chain) → exit code 2
- Runtime / numerical errors (any other BgReduceError) → exit code 1
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from collections.abc import Callable
from typing import ParamSpec, TypeVar

import typer

from bgreduce.errors import BgReduceError, ModelConfigurationError

logger = logging.getLogger(__name__)

EXIT_RUNTIME = 1
EXIT_CONFIGURATION = 2

P = ParamSpec("P")
R = TypeVar("R")


def is_configuration_error(exc: BaseException) -> bool:
    """
    Check if an exception is a configuration error by examining the exception chain.

    Returns True if ModelConfigurationError appears anywhere in the chain.
    """
    current: BaseException | None = exc
    seen = set()
    while current is not None and id(current) not in seen:
        seen.add(id(current))
        if isinstance(current, ModelConfigurationError):
            return True
        current = current.__cause__ or current.__context__
    return False


def error_payload(exc: BaseException) -> dict:
    if isinstance(exc, BgReduceError):
        return exc.to_dict()
    return {"error": type(exc).__name__, "message": str(exc), "details": {}}


def exit_code(exc: BaseException) -> int:
    return EXIT_CONFIGURATION if is_configuration_error(exc) else EXIT_RUNTIME


def report_error(exc: BaseException) -> int:
    """Write the error JSON to stderr and return the exit code for ``exc``."""
    payload = error_payload(exc)
    sys.stderr.write(json.dumps(payload, default=str) + "\n")
    code = exit_code(exc)
    logger.debug("Command failed with exit code %d", code, exc_info=exc)
    return code


def handle_cli_errors(command: Callable[P, R]) -> Callable[P, R]:
    """Turn library errors raised by a command into a JSON report and exit code."""

    @functools.wraps(command)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return command(*args, **kwargs)
        except BgReduceError as exc:
            raise typer.Exit(code=report_error(exc)) from exc

    return wrapper
