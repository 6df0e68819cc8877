"""
Error hierarchy shared by the engines, the CLI and the HTTP API.

Every error carries the process exit code used by `sparse-evolve` and the
HTTP status used by the API exception handler.
"""
from typing import Any, Optional


class LabError(Exception):
    exit_code: int = 1
    status_code: int = 500

    def __init__(self, detail: str, *, context: Optional[dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}

    def to_dict(self) -> dict[str, Any]:
        payload = {"error": type(self).__name__, "detail": self.detail}
        if self.context:
            payload["context"] = self.context
        return payload


class InvalidArgumentError(LabError):
    exit_code = 2
    status_code = 400


class PreconditionError(InvalidArgumentError):
    status_code = 422


class DomainError(InvalidArgumentError):
    status_code = 422


class DegeneracyError(LabError):
    """Some predimension that must carry a strict sign is exactly zero."""

    exit_code = 3
    status_code = 422


class InfeasibleOracleError(LabError):
    exit_code = 4
    status_code = 413
