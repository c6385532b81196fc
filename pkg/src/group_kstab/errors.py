"""Error hierarchy shared by every analysis module.

Each module defines its own subclasses next to the code that raises them;
this file only holds the roots so that the CLI can map any failure to a
module tag, a machine-readable code and an exit status.
"""

from __future__ import annotations

from typing import Any, ClassVar

__all__ = ["ConvergenceError", "KStabError", "ValidationError"]


class KStabError(Exception):
    """Base exception for all group-kstability errors."""

    module: ClassVar[str] = "core"
    exit_code: ClassVar[int] = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @classmethod
    def code(cls) -> str:
        return cls.__name__

    @property
    def tag(self) -> str:
        return f"{self.module}.{self.code()}"

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "module": self.module,
            "code": self.code(),
            "tag": self.tag,
            "message": self.message,
        }
        if self.details:
            payload["details"] = {
                key: _jsonable(value) for key, value in sorted(self.details.items())
            }
        return payload


class ValidationError(KStabError):
    """Input data rejected before any analysis ran."""

    exit_code = 2


class ConvergenceError(KStabError):
    """An iterative solver stopped without meeting its tolerance."""

    exit_code = 3


def _jsonable(value: Any) -> Any:
    from fractions import Fraction

    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)
