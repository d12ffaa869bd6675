"""Goal Net toolkit: model, validate, persist, share, and execute
hierarchical goal-oriented agent designs."""

from .errors import GoalNetError
from .model import (
    Arc,
    Association,
    AssociationKind,
    EntityKind,
    EntityRef,
    FunctionDef,
    GoalNetDocument,
    Point,
    State,
    StateKind,
    TaskDef,
    Transition,
    TransitionKind,
    create_goal_net,
)
from .validation import Diagnostic, Rule, Severity, ValidationReport, explain, validate, validate_for_run

__all__ = [
    "Arc",
    "Association",
    "AssociationKind",
    "Diagnostic",
    "EntityKind",
    "EntityRef",
    "FunctionDef",
    "GoalNetError",
    "GoalNetDocument",
    "Point",
    "Rule",
    "Severity",
    "State",
    "StateKind",
    "TaskDef",
    "Transition",
    "TransitionKind",
    "ValidationReport",
    "create_goal_net",
    "explain",
    "validate",
    "validate_for_run",
]
