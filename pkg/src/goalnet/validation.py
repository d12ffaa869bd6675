"""Rule-based diagnostic engine for Goal Net documents.

Errors (must be fixed before a net can be run):

    E1  net has no root / start / end state (one diagnostic per missing one)
    E2  configured root state is not composite
    E3  composite state without start or end child
    E4  non-root state not connected to any transition
    E5  transition not connected to any state
    E6  transition with only incoming or only outgoing arcs

Warnings (may make an agent behave unintendedly):

    W1  state with no associated function
    W2  transition with no associated task
    W3  task with no associated function
    W4  state with only outgoing arcs that is not a start state
    W5  state with only incoming arcs that is not an end state

Validation never raises: malformed structure is reported, not thrown.
Reports are pure functions of document content with a deterministic
ordering (rule code, then subject name, then subject id).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import AssociationKind, EntityKind, EntityRef, GoalNetDocument, StateKind


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Rule(str, Enum):
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    E4 = "E4"
    E5 = "E5"
    E6 = "E6"
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    W5 = "W5"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    rule: Rule
    message: str
    subject: EntityRef

    def to_json_obj(self, doc: GoalNetDocument | None = None) -> dict:
        obj = {
            "severity": self.severity.value,
            "rule": self.rule.value,
            "message": self.message,
            "subject_kind": self.subject.kind.value,
            "subject_id": self.subject.id,
        }
        if doc is not None:
            obj["subject_name"] = doc.entity_name(self.subject.id)
        return obj


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]
    error_count: int
    warning_count: int

    @classmethod
    def from_diagnostics(cls, diagnostics: list[Diagnostic]) -> "ValidationReport":
        return cls(
            diagnostics=tuple(diagnostics),
            error_count=sum(1 for d in diagnostics if d.severity is Severity.ERROR),
            warning_count=sum(1 for d in diagnostics if d.severity is Severity.WARNING),
        )

    def to_json_obj(self, doc: GoalNetDocument | None = None) -> dict:
        return {
            "error_count": self.error_count,
            "warning_count": self.warning_count,
            "diagnostics": [d.to_json_obj(doc) for d in self.diagnostics],
        }


def _arc_degrees(doc: GoalNetDocument) -> dict[str, list[int]]:
    """entity id -> [incoming arcs, outgoing arcs]"""
    degrees: dict[str, list[int]] = {}
    for arc in doc.arcs.values():
        degrees.setdefault(arc.source.id, [0, 0])[1] += 1
        degrees.setdefault(arc.target.id, [0, 0])[0] += 1
    return degrees


def validate(doc: GoalNetDocument) -> ValidationReport:
    """Apply every rule to the document and return the ordered report."""
    diagnostics: list[Diagnostic] = []
    net_ref = EntityRef(EntityKind.GOAL_NET, doc.id)

    def emit(severity: Severity, rule: Rule, message: str, subject: EntityRef) -> None:
        diagnostics.append(Diagnostic(severity, rule, message, subject))

    # E1: missing net properties, in root/start/end order.
    for prop_value, label in ((doc.root_state_id, "root"),
                              (doc.start_state_id, "start"),
                              (doc.end_state_id, "end")):
        if prop_value is None:
            emit(Severity.ERROR, Rule.E1,
                 f"This Goal Net has no {label} state.", net_ref)

    # E2: root set but not composite.
    if doc.root_state_id is not None:
        root = doc.states.get(doc.root_state_id)
        if root is not None and root.kind is not StateKind.COMPOSITE:
            emit(Severity.ERROR, Rule.E2,
                 f"Root state {root.name} is not a composite state.",
                 EntityRef(EntityKind.STATE, root.id))

    degrees = _arc_degrees(doc)
    states_with_functions = {a.owner_id for a in doc.state_functions}
    transitions_with_tasks = {a.owner_id for a in doc.transition_tasks}
    tasks_with_functions = {a.owner_id for a in doc.task_functions}
    child_starts = {s.child_start_id for s in doc.states.values()}
    child_ends = {s.child_end_id for s in doc.states.values()}

    for state in doc.states.values():
        subject = EntityRef(EntityKind.STATE, state.id)
        incoming, outgoing = degrees.get(state.id, [0, 0])
        if state.kind is StateKind.COMPOSITE and (
                state.child_start_id is None or state.child_end_id is None):
            emit(Severity.ERROR, Rule.E3,
                 f"Composite state {state.name} has no start state or end state.",
                 subject)
        if incoming + outgoing == 0 and state.id != doc.root_state_id:
            emit(Severity.ERROR, Rule.E4,
                 f"State {state.name} is not connected to any transition "
                 "and it's not the root state.", subject)
        if state.id not in states_with_functions:
            emit(Severity.WARNING, Rule.W1,
                 f"State {state.name} has no associated function.", subject)
        is_start = state.id == doc.start_state_id or state.id in child_starts
        is_end = state.id == doc.end_state_id or state.id in child_ends
        if outgoing > 0 and incoming == 0 and not is_start:
            emit(Severity.WARNING, Rule.W4,
                 f"State {state.name} has only outgoing arcs but it is not start state.",
                 subject)
        if incoming > 0 and outgoing == 0 and not is_end:
            emit(Severity.WARNING, Rule.W5,
                 f"State {state.name} has only incoming arcs but it is not end state.",
                 subject)

    for transition in doc.transitions.values():
        subject = EntityRef(EntityKind.TRANSITION, transition.id)
        incoming, outgoing = degrees.get(transition.id, [0, 0])
        if incoming + outgoing == 0:
            emit(Severity.ERROR, Rule.E5,
                 f"Transition {transition.name} is not connected to any state.",
                 subject)
        elif incoming == 0 or outgoing == 0:
            emit(Severity.ERROR, Rule.E6,
                 f"Transition {transition.name} has only outgoing arc, "
                 "or only incoming arc.", subject)
        if transition.id not in transitions_with_tasks:
            emit(Severity.WARNING, Rule.W2,
                 f"Transition {transition.name} has no associated task.", subject)

    for task in doc.tasks.values():
        if task.id not in tasks_with_functions:
            emit(Severity.WARNING, Rule.W3,
                 f"Task {task.name} has no associated function.",
                 EntityRef(EntityKind.TASK, task.id))

    diagnostics.sort(key=lambda d: (d.rule.value,
                                    doc.entity_name(d.subject.id),
                                    d.subject.id))
    return ValidationReport.from_diagnostics(diagnostics)


def validate_for_run(doc: GoalNetDocument) -> list[Diagnostic]:
    """The error-severity subset of :func:`validate`, same ordering."""
    return [d for d in validate(doc).diagnostics if d.severity is Severity.ERROR]


@dataclass(frozen=True)
class RuleInfo:
    title: str
    remedy: str
    target_kind: str  # where the UI should navigate to fix the problem


_CATALOG = {
    Rule.E1: RuleInfo(
        "Missing net property",
        "Set the root, start, and end states in the Goal Net properties.",
        "net-properties"),
    Rule.E2: RuleInfo(
        "Root state is not composite",
        "Pick a composite state as root, or convert the current root.",
        "net-properties"),
    Rule.E3: RuleInfo(
        "Composite state without boundaries",
        "Choose a start child and an end child for the composite state.",
        "state"),
    Rule.E4: RuleInfo(
        "Unconnected state",
        "Connect the state to a transition with arcs, or remove it.",
        "state"),
    Rule.E5: RuleInfo(
        "Unconnected transition",
        "Connect the transition to an input and an output state.",
        "transition"),
    Rule.E6: RuleInfo(
        "One-sided transition",
        "Give the transition both an incoming and an outgoing arc.",
        "transition"),
    Rule.W1: RuleInfo(
        "State without functions",
        "Associate at least one function with the state.",
        "state"),
    Rule.W2: RuleInfo(
        "Transition without tasks",
        "Associate at least one task with the transition.",
        "transition"),
    Rule.W3: RuleInfo(
        "Task without functions",
        "Associate at least one function with the task.",
        "task"),
    Rule.W4: RuleInfo(
        "Source-only state",
        "Mark the state as a start state or give it an incoming arc.",
        "state"),
    Rule.W5: RuleInfo(
        "Sink-only state",
        "Mark the state as an end state or give it an outgoing arc.",
        "state"),
}


def explain(rule: Rule) -> RuleInfo:
    """Static catalog entry: title, remedy hint, and navigation target."""
    return _CATALOG[rule]
