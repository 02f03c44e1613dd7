"""Shared error base for all narvis modules.

Every domain error carries a stable ``code`` (used by the HTTP API and the
CLI to build structured ``{code, message, pointer}`` payloads) and an
optional JSON pointer locating the offending field.
"""

from __future__ import annotations


class NarvisError(Exception):
    code = "error"

    def __init__(self, message: str, *, pointer: str | None = None):
        super().__init__(message)
        self.message = message
        self.pointer = pointer

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.pointer is not None:
            out["pointer"] = self.pointer
        return out


class SchemaViolation(NarvisError):
    """A JSON document does not match its schema; ``pointer`` says where."""

    code = "schema_violation"
