"""Exception hierarchy shared by every bgreduce subpackage.

Each subpackage defines its own subclasses next to the code that raises them;
only the roots live here so the CLI can classify failures without importing
the numerical modules.
"""

from __future__ import annotations

from typing import Any


class BgReduceError(Exception):
    """Base class for all errors raised by bgreduce.

    Attributes:
        details: Machine-readable context (offending vector, residual norm,
            time stamp, parameter point...). Values must be JSON-serializable.
    """

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.details: dict[str, Any] = details

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "details": self.details,
        }


class ModelConfigurationError(BgReduceError):
    """Raised when parameters, topology or user input cannot describe a valid model."""
