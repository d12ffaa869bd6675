"""Validate-gated external launch and the bundled reference interpreter.

``run_external`` validates first and only spawns the configured compiler
when there are zero errors, passing ``--goalnet <uuid> --store <path>``.

``interpret`` executes a document directly under single-token semantics:
the token starts at the net start state, entering a composite descends to
its start child, and completing a composite's end child achieves the
composite and ascends. At each achieved or atomic active state the
outgoing arcs are tried in (priority, name, id) order and the first
transition fires: its tasks run in association order (each task running
its functions in order), then the token moves to the selected output
state. Output selection per transition kind: direct transitions require
exactly one output; conditional transitions take the first output in
ascending priority whose guard holds, with an unguarded arc as default;
probabilistic transitions sample outputs proportionally to arc weight.

Randomness comes from one Mersenne Twister (``random.Random``) seeded from
the run config, so traces are reproducible: identical document, registry,
and config give byte-identical traces. Unbound function keys execute as
recording stubs so design-phase nets stay runnable.
"""
from __future__ import annotations

import random
import subprocess
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, TYPE_CHECKING, Union

from .errors import (
    ConfigError,
    GuardEvalError,
    GuardParseError,
    InterpreterError,
    ModelError,
)
from .guards import eval_guard, is_identifier, parse_guard
from .model import (
    Arc,
    AssociationKind,
    EntityKind,
    EntityRef,
    GoalNetDocument,
    StateKind,
    Transition,
    TransitionKind,
)
from .validation import Diagnostic, validate_for_run

if TYPE_CHECKING:  # pragma: no cover
    from .persistence import Store

Handler = Callable[[dict], None]


@dataclass
class RunConfig:
    compiler_path: str | None = None
    seed: int = 0
    max_steps: int = 10_000
    blackboard: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_steps < 1:
            raise ModelError("max_steps must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ModelError("seed must fit in 64 unsigned bits")
        for key in self.blackboard:
            if not is_identifier(key):
                raise ModelError(f"blackboard key {key!r} is not a valid identifier")


class FunctionRegistry:
    """binding_key -> handler(blackboard). Unbound keys fall back to a stub
    that records the call instead of failing."""

    def __init__(self, handlers: dict[str, Handler] | None = None):
        self.handlers: dict[str, Handler] = dict(handlers or {})
        self.stub_calls: list[str] = []

    def register(self, binding_key: str, handler: Handler) -> None:
        self.handlers[binding_key] = handler

    def resolve(self, binding_key: str) -> Handler:
        if binding_key in self.handlers:
            return self.handlers[binding_key]

        def stub(_bb: dict, _key: str = binding_key) -> None:
            self.stub_calls.append(_key)

        return stub


class FinishReason(str, Enum):
    REACHED_END = "reached_end"
    STEP_LIMIT = "step_limit"
    GUARD_FAILURE = "guard_failure"


@dataclass(frozen=True)
class EnterState:
    id: str


@dataclass(frozen=True)
class ExecuteFunction:
    binding_key: str
    owner: EntityRef


@dataclass(frozen=True)
class FireTransition:
    id: str
    target_id: str


@dataclass(frozen=True)
class ExecuteTask:
    id: str


@dataclass(frozen=True)
class Finish:
    reason: FinishReason


TraceEvent = Union[EnterState, ExecuteFunction, FireTransition, ExecuteTask, Finish]


def event_obj(event: TraceEvent) -> dict:
    if isinstance(event, EnterState):
        return {"type": "enter_state", "id": event.id}
    if isinstance(event, ExecuteFunction):
        return {"type": "execute_function", "binding_key": event.binding_key,
                "owner_kind": event.owner.kind.value, "owner_id": event.owner.id}
    if isinstance(event, FireTransition):
        return {"type": "fire_transition", "id": event.id, "target_id": event.target_id}
    if isinstance(event, ExecuteTask):
        return {"type": "execute_task", "id": event.id}
    return {"type": "finish", "reason": event.reason.value}


@dataclass(frozen=True)
class Marking:
    active: str
    achieved: frozenset[str]


@dataclass
class RunTrace:
    seed: int
    events: list[TraceEvent] = field(default_factory=list)
    final_marking: Marking | None = None

    @property
    def finish_reason(self) -> FinishReason | None:
        last = self.events[-1] if self.events else None
        return last.reason if isinstance(last, Finish) else None

    def transitions_fired(self) -> list[str]:
        return [e.id for e in self.events if isinstance(e, FireTransition)]

    def states_entered(self) -> list[str]:
        return [e.id for e in self.events if isinstance(e, EnterState)]

    def to_jsonl(self) -> bytes:
        import json

        lines = [json.dumps({"seed": self.seed}, sort_keys=True)]
        lines += [json.dumps(event_obj(e), sort_keys=True) for e in self.events]
        return ("\n".join(lines) + "\n").encode("utf-8")


def _sorted_outputs(doc: GoalNetDocument, arcs: list[Arc]) -> list[Arc]:
    def key(arc: Arc):
        target = doc.states[arc.target.id]
        return (arc.priority, target.name, target.id)

    return sorted(arcs, key=key)


def select_target(doc: GoalNetDocument, transition: Transition,
                  outgoing: list[Arc], blackboard: dict,
                  rng: random.Random) -> str | None:
    """Pick the output state for a firing transition; None means guard failure."""
    if not outgoing:
        raise InterpreterError(
            f"transition {transition.name} has no outgoing arcs")
    arcs = _sorted_outputs(doc, outgoing)
    if transition.kind is TransitionKind.DIRECT:
        if len(arcs) != 1:
            raise InterpreterError(
                f"direct transition {transition.name} must have exactly one "
                f"output state, found {len(arcs)}")
        return arcs[0].target.id
    if transition.kind is TransitionKind.CONDITIONAL:
        for arc in arcs:
            if arc.guard is None or arc.guard == "":
                return arc.target.id
            try:
                if eval_guard(parse_guard(arc.guard), blackboard):
                    return arc.target.id
            except (GuardParseError, GuardEvalError) as exc:
                raise InterpreterError(
                    f"guard {arc.guard!r} on transition {transition.name} "
                    f"failed: {exc}") from exc
        return None
    total = sum(arc.weight for arc in arcs)
    draw = rng.random() * total
    cumulative = 0.0
    for arc in arcs:
        cumulative += arc.weight
        if draw < cumulative:
            return arc.target.id
    return arcs[-1].target.id  # draw == total from floating rounding


def interpret(doc: GoalNetDocument, registry: FunctionRegistry,
              config: RunConfig) -> RunTrace:
    """Execute the net from its start state; returns the full event trace."""
    errors = validate_for_run(doc)
    if errors:
        raise InterpreterError(
            f"document has {len(errors)} validation errors; fix them before running")
    if doc.start_state_id is None or doc.end_state_id is None:
        raise InterpreterError("net start and end states must be set")

    rng = random.Random(config.seed)
    blackboard = dict(config.blackboard)
    trace = RunTrace(seed=config.seed)
    achieved: set[str] = set()

    def run_functions(assoc_kind: AssociationKind, owner_id: str,
                      owner_kind: EntityKind) -> None:
        for assoc in doc.associations_of(assoc_kind, owner_id):
            fn = doc.functions[assoc.member_id]
            trace.events.append(ExecuteFunction(
                fn.binding_key, EntityRef(owner_kind, owner_id)))
            registry.resolve(fn.binding_key)(blackboard)

    def enter(state_id: str) -> str:
        """Enter a state, descending through composite start children."""
        while True:
            trace.events.append(EnterState(state_id))
            run_functions(AssociationKind.STATE_FUNCTION, state_id, EntityKind.STATE)
            state = doc.states[state_id]
            if state.kind is StateKind.COMPOSITE and state.child_start_id is not None:
                state_id = state.child_start_id
                continue
            return state_id

    def settle(state_id: str) -> str | None:
        """Mark achievements and ascend out of completed composites.

        Returns the active achieved state, or None when the net end state
        was reached along the way.
        """
        while True:
            achieved.add(state_id)
            if state_id == doc.end_state_id:
                return None
            state = doc.states[state_id]
            parent_id = state.parent_id
            if parent_id is not None and doc.states[parent_id].child_end_id == state_id:
                state_id = parent_id
                continue
            return state_id

    active = settle(enter(doc.start_state_id))
    steps = 0
    while True:
        if active is None:
            trace.events.append(Finish(FinishReason.REACHED_END))
            break
        if steps >= config.max_steps:
            trace.events.append(Finish(FinishReason.STEP_LIMIT))
            break
        outgoing = [a for a in doc.arcs.values() if a.source.id == active]
        if not outgoing:
            raise InterpreterError(
                f"token is stuck: state {doc.states[active].name} has no "
                "outgoing arcs and is not the end state")
        candidates = sorted(
            outgoing,
            key=lambda a: (a.priority, doc.transitions[a.target.id].name, a.target.id))
        transition = doc.transitions[candidates[0].target.id]
        steps += 1
        transition_outputs = [a for a in doc.arcs.values()
                              if a.source.id == transition.id]
        target = select_target(doc, transition, transition_outputs, blackboard, rng)
        if target is None:
            trace.events.append(Finish(FinishReason.GUARD_FAILURE))
            break
        trace.events.append(FireTransition(transition.id, target))
        for assoc in doc.associations_of(AssociationKind.TRANSITION_TASK, transition.id):
            trace.events.append(ExecuteTask(assoc.member_id))
            run_functions(AssociationKind.TASK_FUNCTION, assoc.member_id,
                          EntityKind.TASK)
        active = settle(enter(target))
    trace.final_marking = Marking(
        active=active if active is not None else doc.end_state_id,
        achieved=frozenset(achieved))
    return trace


@dataclass(frozen=True)
class LaunchReport:
    launched: bool
    errors: tuple[Diagnostic, ...]
    compiler_path: str | None = None
    exit_code: int | None = None


def run_external(store: Store, gnet_id: str, config: RunConfig) -> LaunchReport:
    """Validate, then launch the external compiler on a clean net.

    With any validation error nothing is spawned and the errors are
    returned for the user to resolve. The compiler path comes from the
    config or, failing that, the path stored for the net.
    """
    from .persistence import get_compiler_path, load

    doc = load(store, gnet_id)
    errors = validate_for_run(doc)
    if errors:
        return LaunchReport(launched=False, errors=tuple(errors))
    path = config.compiler_path or get_compiler_path(store, gnet_id)
    if not path:
        raise ConfigError("external compiler is not specified")
    try:
        proc = subprocess.run(
            [path, "--goalnet", gnet_id, "--store", store.path],
            capture_output=True, check=False)
    except OSError as exc:
        raise ConfigError(f"failed to launch external compiler {path!r}: {exc}") from exc
    return LaunchReport(launched=True, errors=(), compiler_path=path,
                        exit_code=proc.returncode)
