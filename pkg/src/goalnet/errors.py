"""Exception hierarchy shared by every layer of the toolkit.

Callers that need to distinguish failure modes (the CLI's exit codes, the
HTTP service's status codes) dispatch on these types, so new failure paths
should reuse one of them rather than raising bare ``ValueError``.
"""
from __future__ import annotations


class GoalNetError(Exception):
    """Base class for all domain errors."""


class ModelError(GoalNetError):
    """An editing operation or domain invariant was violated; nothing changed."""


class NotFoundError(GoalNetError):
    """A referenced entity, net, or user does not exist."""


class AccessDeniedError(GoalNetError):
    """The acting user lacks the required access level."""


class VersionConflictError(GoalNetError):
    """Optimistic-concurrency check failed: someone saved first."""


class DocumentFormatError(GoalNetError):
    """A document file is malformed. ``path`` points at the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class GuardParseError(GoalNetError):
    """Guard text is not valid. ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class GuardEvalError(GoalNetError):
    """Guard evaluation failed (unknown identifier or type mismatch)."""


class InterpreterError(GoalNetError):
    """The reference interpreter hit a structural problem mid-run."""


class ConfigError(GoalNetError):
    """Missing or unusable configuration (e.g. no external compiler set)."""


class AuthError(GoalNetError):
    """Request carried no valid session token."""


class StoreError(GoalNetError):
    """Store-level failure outside the optimistic-versioning path."""
