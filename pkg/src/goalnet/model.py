"""In-memory Goal Net document: entity types, hierarchy, and editing operations.

A :class:`GoalNetDocument` is a single-writer value. Every editing method
validates its preconditions fully before touching any field, so a rejected
operation leaves the document unchanged. Read queries return deterministic
(name, id)-ordered results.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .errors import ModelError, NotFoundError
from .ids import new_uuid


class EntityKind(str, Enum):
    GOAL_NET = "goal_net"
    STATE = "state"
    TRANSITION = "transition"
    ARC = "arc"
    FUNCTION = "function"
    TASK = "task"
    ASSOCIATION = "association"


class StateKind(str, Enum):
    ATOMIC = "atomic"
    COMPOSITE = "composite"


class TransitionKind(str, Enum):
    DIRECT = "direct"
    CONDITIONAL = "conditional"
    PROBABILISTIC = "probabilistic"


class AssociationKind(str, Enum):
    STATE_FUNCTION = "state_function"
    TRANSITION_TASK = "transition_task"
    TASK_FUNCTION = "task_function"


@dataclass(frozen=True)
class EntityRef:
    kind: EntityKind
    id: str


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ModelError("positions must be finite")

    def translated(self, dx: float, dy: float) -> "Point":
        return Point(self.x + dx, self.y + dy)


@dataclass
class State:
    id: str
    name: str
    description: str
    kind: StateKind
    achievement_value: float = 0.0
    cost: float = 0.0
    parent_id: str | None = None
    child_start_id: str | None = None
    child_end_id: str | None = None
    position: Point = field(default_factory=lambda: Point(0.0, 0.0))


@dataclass
class Transition:
    id: str
    name: str
    description: str
    kind: TransitionKind
    parent_id: str | None = None
    position: Point = field(default_factory=lambda: Point(0.0, 0.0))


@dataclass
class Arc:
    id: str
    name: str
    description: str
    source: EntityRef
    target: EntityRef
    guard: str | None = None
    weight: float = 1.0
    priority: int = 0


@dataclass
class FunctionDef:
    id: str
    name: str
    description: str
    binding_key: str = ""


@dataclass
class TaskDef:
    id: str
    name: str
    description: str


@dataclass
class Association:
    id: str
    kind: AssociationKind
    owner_id: str
    member_id: str
    order_index: int


@dataclass
class RemovalReport:
    states: int = 0
    transitions: int = 0
    arcs: int = 0
    functions: int = 0
    tasks: int = 0
    associations: int = 0

    @property
    def total(self) -> int:
        return (self.states + self.transitions + self.arcs
                + self.functions + self.tasks + self.associations)


# Association kind -> (owner collection, member collection) expectations.
_ASSOC_ENDPOINTS = {
    AssociationKind.STATE_FUNCTION: (EntityKind.STATE, EntityKind.FUNCTION),
    AssociationKind.TRANSITION_TASK: (EntityKind.TRANSITION, EntityKind.TASK),
    AssociationKind.TASK_FUNCTION: (EntityKind.TASK, EntityKind.FUNCTION),
}


@dataclass
class GoalNetDocument:
    """One Goal Net: entities, hierarchy, associations, and net properties.

    Entity collections are id-keyed dicts; the three association lists are
    kept with contiguous ``order_index`` values per owner at all times.
    ``version`` is the optimistic-concurrency counter bumped by the store on
    each successful save.
    """

    id: str
    name: str
    description: str
    created_by: str
    version: int = 0
    root_state_id: str | None = None
    start_state_id: str | None = None
    end_state_id: str | None = None
    states: dict[str, State] = field(default_factory=dict)
    transitions: dict[str, Transition] = field(default_factory=dict)
    arcs: dict[str, Arc] = field(default_factory=dict)
    functions: dict[str, FunctionDef] = field(default_factory=dict)
    tasks: dict[str, TaskDef] = field(default_factory=dict)
    state_functions: list[Association] = field(default_factory=list)
    transition_tasks: list[Association] = field(default_factory=list)
    task_functions: list[Association] = field(default_factory=list)
    _rng: random.Random | None = field(default=None, repr=False, compare=False)

    # -- lookup helpers -------------------------------------------------

    def _fresh_id(self) -> str:
        return new_uuid(self._rng)

    def state(self, state_id: str) -> State:
        try:
            return self.states[state_id]
        except KeyError:
            raise NotFoundError(f"unknown state {state_id}") from None

    def transition(self, transition_id: str) -> Transition:
        try:
            return self.transitions[transition_id]
        except KeyError:
            raise NotFoundError(f"unknown transition {transition_id}") from None

    def arc(self, arc_id: str) -> Arc:
        try:
            return self.arcs[arc_id]
        except KeyError:
            raise NotFoundError(f"unknown arc {arc_id}") from None

    def function(self, function_id: str) -> FunctionDef:
        try:
            return self.functions[function_id]
        except KeyError:
            raise NotFoundError(f"unknown function {function_id}") from None

    def task(self, task_id: str) -> TaskDef:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise NotFoundError(f"unknown task {task_id}") from None

    def kind_of(self, entity_id: str) -> EntityKind:
        if entity_id == self.id:
            return EntityKind.GOAL_NET
        if entity_id in self.states:
            return EntityKind.STATE
        if entity_id in self.transitions:
            return EntityKind.TRANSITION
        if entity_id in self.arcs:
            return EntityKind.ARC
        if entity_id in self.functions:
            return EntityKind.FUNCTION
        if entity_id in self.tasks:
            return EntityKind.TASK
        if any(a.id == entity_id for a in self.all_associations()):
            return EntityKind.ASSOCIATION
        raise NotFoundError(f"unknown entity {entity_id}")

    def ref(self, entity_id: str) -> EntityRef:
        return EntityRef(self.kind_of(entity_id), entity_id)

    def resolve(self, ref: EntityRef) -> object:
        actual = self.kind_of(ref.id)
        if actual is not ref.kind:
            raise NotFoundError(f"{ref.id} is a {actual.value}, not a {ref.kind.value}")
        if ref.kind is EntityKind.GOAL_NET:
            return self
        if ref.kind is EntityKind.STATE:
            return self.states[ref.id]
        if ref.kind is EntityKind.TRANSITION:
            return self.transitions[ref.id]
        if ref.kind is EntityKind.ARC:
            return self.arcs[ref.id]
        if ref.kind is EntityKind.FUNCTION:
            return self.functions[ref.id]
        if ref.kind is EntityKind.TASK:
            return self.tasks[ref.id]
        return next(a for a in self.all_associations() if a.id == ref.id)

    def entity_name(self, entity_id: str) -> str:
        kind = self.kind_of(entity_id)
        if kind is EntityKind.GOAL_NET:
            return self.name
        if kind is EntityKind.ASSOCIATION:
            return ""
        return self.resolve(EntityRef(kind, entity_id)).name  # type: ignore[union-attr]

    def all_associations(self) -> list[Association]:
        return self.state_functions + self.transition_tasks + self.task_functions

    def _assoc_list(self, kind: AssociationKind) -> list[Association]:
        if kind is AssociationKind.STATE_FUNCTION:
            return self.state_functions
        if kind is AssociationKind.TRANSITION_TASK:
            return self.transition_tasks
        return self.task_functions

    def associations_of(self, kind: AssociationKind, owner_id: str) -> list[Association]:
        """Associations for one owner, in execution (order_index) order."""
        rows = [a for a in self._assoc_list(kind) if a.owner_id == owner_id]
        rows.sort(key=lambda a: a.order_index)
        return rows

    # -- node-level editing ---------------------------------------------

    def _check_parent(self, parent_id: str | None) -> None:
        if parent_id is None:
            return
        parent = self.state(parent_id)
        if parent.kind is not StateKind.COMPOSITE:
            raise ModelError(f"parent state {parent.name} is not composite")

    def add_state(self, parent_id: str | None, name: str, kind: StateKind,
                  position: Point) -> str:
        self._check_parent(parent_id)
        state_id = self._fresh_id()
        self.states[state_id] = State(
            id=state_id, name=name, description="", kind=kind,
            parent_id=parent_id, position=position,
        )
        return state_id

    def add_transition(self, parent_id: str | None, name: str,
                       kind: TransitionKind, position: Point) -> str:
        self._check_parent(parent_id)
        transition_id = self._fresh_id()
        self.transitions[transition_id] = Transition(
            id=transition_id, name=name, description="", kind=kind,
            parent_id=parent_id, position=position,
        )
        return transition_id

    def add_arc(self, a: EntityRef, b: EntityRef) -> str:
        """Insert the directed arc a -> b.

        Exactly one endpoint must be a state and the other a transition, and
        both must live in the same composite scope. A second arc with the
        same direction between the same endpoints is a duplicate.
        """
        for endpoint in (a, b):
            if endpoint.kind not in (EntityKind.STATE, EntityKind.TRANSITION):
                raise ModelError(f"arc endpoints must be states or transitions, got {endpoint.kind.value}")
            self.resolve(endpoint)
        if {a.kind, b.kind} != {EntityKind.STATE, EntityKind.TRANSITION}:
            raise ModelError("arcs connect exactly one state and one transition")
        scope_a = self.resolve(a).parent_id  # type: ignore[union-attr]
        scope_b = self.resolve(b).parent_id  # type: ignore[union-attr]
        if scope_a != scope_b:
            raise ModelError("arc endpoints must share the same composite scope")
        if any(x.source.id == a.id and x.target.id == b.id for x in self.arcs.values()):
            raise ModelError("identical arc already exists")
        arc_id = self._fresh_id()
        self.arcs[arc_id] = Arc(id=arc_id, name="", description="", source=a, target=b)
        return arc_id

    def convert_state_kind(self, state_id: str, new_kind: StateKind,
                           cascade: bool = False) -> None:
        """Convert a state between atomic and composite.

        Atomic -> composite always succeeds and starts with no children and
        unset boundaries. Composite -> atomic succeeds when childless;
        with ``cascade`` it first deletes every descendant together with
        their arcs and associations.
        """
        state = self.state(state_id)
        if new_kind is state.kind:
            return
        if new_kind is StateKind.COMPOSITE:
            state.kind = StateKind.COMPOSITE
            state.child_start_id = None
            state.child_end_id = None
            return
        descendants = self._descendants(state_id)
        if descendants and not cascade:
            raise ModelError(
                f"state {state.name} has {len(descendants)} descendants; "
                "pass cascade to delete them"
            )
        if descendants:
            self._remove_closure(descendants)
        state.kind = StateKind.ATOMIC
        state.child_start_id = None
        state.child_end_id = None

    def set_net_properties(self, root: str | None, start: str | None,
                           end: str | None) -> None:
        for sid in (root, start, end):
            if sid is not None:
                self.state(sid)
        if root is not None and self.states[root].kind is not StateKind.COMPOSITE:
            raise ModelError("root state must be a composite state")
        self.root_state_id = root
        self.start_state_id = start
        self.end_state_id = end

    def set_composite_boundaries(self, composite_id: str,
                                 start_child: str | None,
                                 end_child: str | None) -> None:
        composite = self.state(composite_id)
        if composite.kind is not StateKind.COMPOSITE:
            raise ModelError(f"state {composite.name} is not composite")
        for sid in (start_child, end_child):
            if sid is None:
                continue
            child = self.state(sid)
            if child.parent_id != composite_id:
                raise ModelError(f"state {child.name} is not a direct child of {composite.name}")
        composite.child_start_id = start_child
        composite.child_end_id = end_child

    def add_function(self, name: str, description: str, binding_key: str = "") -> str:
        if not name.strip():
            raise ModelError("function name must be non-empty")
        function_id = self._fresh_id()
        self.functions[function_id] = FunctionDef(
            id=function_id, name=name, description=description,
            binding_key=binding_key,
        )
        return function_id

    def add_task(self, name: str, description: str) -> str:
        if not name.strip():
            raise ModelError("task name must be non-empty")
        task_id = self._fresh_id()
        self.tasks[task_id] = TaskDef(id=task_id, name=name, description=description)
        return task_id

    def associate(self, kind: AssociationKind, owner_id: str, member_id: str) -> str:
        owner_kind, member_kind = _ASSOC_ENDPOINTS[kind]
        if self.kind_of(owner_id) is not owner_kind:
            raise ModelError(f"{kind.value} owner must be a {owner_kind.value}")
        if self.kind_of(member_id) is not member_kind:
            raise ModelError(f"{kind.value} member must be a {member_kind.value}")
        rows = self._assoc_list(kind)
        if any(a.owner_id == owner_id and a.member_id == member_id for a in rows):
            raise ModelError("association already exists")
        assoc_id = self._fresh_id()
        order = sum(1 for a in rows if a.owner_id == owner_id)
        rows.append(Association(id=assoc_id, kind=kind, owner_id=owner_id,
                                member_id=member_id, order_index=order))
        return assoc_id

    def dissociate(self, association_id: str) -> None:
        for rows in (self.state_functions, self.transition_tasks, self.task_functions):
            for i, assoc in enumerate(rows):
                if assoc.id == association_id:
                    owner = assoc.owner_id
                    del rows[i]
                    self._compact_order(rows, owner)
                    return
        raise NotFoundError(f"unknown association {association_id}")

    @staticmethod
    def _compact_order(rows: list[Association], owner_id: str) -> None:
        mine = sorted((a for a in rows if a.owner_id == owner_id),
                      key=lambda a: a.order_index)
        for i, assoc in enumerate(mine):
            assoc.order_index = i

    def update_properties(self, entity_id: str, **changes) -> None:
        """Edit mutable fields of one entity (names, guards, weights, ...).

        Field validity depends on the entity kind; an unknown or invalid
        field rejects the whole call before anything is written.
        """
        kind = self.kind_of(entity_id)
        allowed = {
            EntityKind.GOAL_NET: {"name", "description"},
            EntityKind.STATE: {"name", "description", "achievement_value", "cost"},
            EntityKind.TRANSITION: {"name", "description", "kind"},
            EntityKind.ARC: {"name", "description", "guard", "weight", "priority"},
            EntityKind.FUNCTION: {"name", "description", "binding_key"},
            EntityKind.TASK: {"name", "description"},
        }.get(kind)
        if allowed is None:
            raise ModelError("associations have no editable properties")
        unknown = set(changes) - allowed
        if unknown:
            raise ModelError(f"cannot set {sorted(unknown)} on a {kind.value}")
        self._validate_property_values(kind, changes)
        entity = self if kind is EntityKind.GOAL_NET else self.resolve(EntityRef(kind, entity_id))
        for key, value in changes.items():
            setattr(entity, key, value)

    def _validate_property_values(self, kind: EntityKind, changes: dict) -> None:
        if kind is EntityKind.GOAL_NET and not str(changes.get("name", "x")).strip():
            raise ModelError("goal net name must be non-empty")
        if kind in (EntityKind.FUNCTION, EntityKind.TASK):
            if "name" in changes and not str(changes["name"]).strip():
                raise ModelError("name must be non-empty")
        if "achievement_value" in changes and float(changes["achievement_value"]) < 0:
            raise ModelError("achievement value must be non-negative")
        if "cost" in changes and float(changes["cost"]) < 0:
            raise ModelError("cost must be non-negative")
        if "weight" in changes and not float(changes["weight"]) > 0:
            raise ModelError("weight must be positive")
        if "priority" in changes and int(changes["priority"]) < 0:
            raise ModelError("priority must be non-negative")
        if "kind" in changes and not isinstance(changes["kind"], TransitionKind):
            raise ModelError("kind must be a transition kind")
        if changes.get("guard") is not None and "guard" in changes:
            from .guards import parse_guard  # deferred: avoids import cycle
            parse_guard(changes["guard"])

    # -- group operations -----------------------------------------------

    def move_entities(self, ids: set[str], delta: Point) -> None:
        nodes: list[State | Transition] = []
        for entity_id in sorted(ids):
            kind = self.kind_of(entity_id)
            if kind is EntityKind.STATE:
                nodes.append(self.states[entity_id])
            elif kind is EntityKind.TRANSITION:
                nodes.append(self.transitions[entity_id])
            else:
                raise ModelError(f"{kind.value} {entity_id} cannot be moved")
        for node in nodes:
            node.position = node.position.translated(delta.x, delta.y)

    def remove_entities(self, ids: set[str]) -> RemovalReport:
        """Remove a group of entities atomically.

        The removal closure adds composite descendants, arcs touching any
        removed node, and associations referencing any removed entity. Net
        properties and composite boundaries naming a removed state are
        cleared. Any unknown id rejects the whole call.
        """
        for entity_id in ids:
            self.kind_of(entity_id)  # raises NotFoundError
        return self._remove_closure(set(ids))

    def _descendants(self, state_id: str) -> set[str]:
        """All states and transitions transitively parented under a state."""
        out: set[str] = set()
        frontier = [state_id]
        while frontier:
            current = frontier.pop()
            for s in self.states.values():
                if s.parent_id == current and s.id not in out:
                    out.add(s.id)
                    frontier.append(s.id)
            for t in self.transitions.values():
                if t.parent_id == current and t.id not in out:
                    out.add(t.id)
        return out

    def _remove_closure(self, ids: set[str]) -> RemovalReport:
        doomed = set(ids)
        for entity_id in ids:
            if entity_id in self.states and self.states[entity_id].kind is StateKind.COMPOSITE:
                doomed |= self._descendants(entity_id)
        doomed |= {a.id for a in self.arcs.values()
                   if a.source.id in doomed or a.target.id in doomed}
        doomed |= {a.id for a in self.all_associations()
                   if a.owner_id in doomed or a.member_id in doomed}

        report = RemovalReport()
        for state_id in [s for s in self.states if s in doomed]:
            del self.states[state_id]
            report.states += 1
        for transition_id in [t for t in self.transitions if t in doomed]:
            del self.transitions[transition_id]
            report.transitions += 1
        for arc_id in [a for a in self.arcs if a in doomed]:
            del self.arcs[arc_id]
            report.arcs += 1
        for function_id in [f for f in self.functions if f in doomed]:
            del self.functions[function_id]
            report.functions += 1
        for task_id in [t for t in self.tasks if t in doomed]:
            del self.tasks[task_id]
            report.tasks += 1
        for rows in (self.state_functions, self.transition_tasks, self.task_functions):
            removed_owners = {a.owner_id for a in rows if a.id in doomed}
            survivors = [a for a in rows if a.id not in doomed]
            report.associations += len(rows) - len(survivors)
            rows[:] = survivors
            for owner in removed_owners:
                self._compact_order(rows, owner)

        if self.root_state_id in doomed:
            self.root_state_id = None
        if self.start_state_id in doomed:
            self.start_state_id = None
        if self.end_state_id in doomed:
            self.end_state_id = None
        for state in self.states.values():
            if state.child_start_id in doomed:
                state.child_start_id = None
            if state.child_end_id in doomed:
                state.child_end_id = None
        return report

    # -- queries ----------------------------------------------------------

    @staticmethod
    def _by_name(entities):
        return sorted(entities, key=lambda e: (e.name, e.id))

    def inputs_of(self, transition_id: str) -> list[State]:
        self.transition(transition_id)
        return self._by_name(self.states[a.source.id] for a in self.arcs.values()
                             if a.target.id == transition_id)

    def outputs_of(self, transition_id: str) -> list[State]:
        self.transition(transition_id)
        return self._by_name(self.states[a.target.id] for a in self.arcs.values()
                             if a.source.id == transition_id)

    def arcs_of(self, entity_id: str) -> list[Arc]:
        self.kind_of(entity_id)
        return self._by_name(a for a in self.arcs.values()
                             if a.source.id == entity_id or a.target.id == entity_id)

    def children_of(self, composite_id: str) -> list[State | Transition]:
        composite = self.state(composite_id)
        if composite.kind is not StateKind.COMPOSITE:
            raise ModelError(f"state {composite.name} is atomic and has no children")
        children = [s for s in self.states.values() if s.parent_id == composite_id]
        children += [t for t in self.transitions.values() if t.parent_id == composite_id]
        return self._by_name(children)

    def functions_of(self, owner_id: str) -> list[FunctionDef]:
        kind = self.kind_of(owner_id)
        if kind is EntityKind.STATE:
            assoc_kind = AssociationKind.STATE_FUNCTION
        elif kind is EntityKind.TASK:
            assoc_kind = AssociationKind.TASK_FUNCTION
        else:
            raise ModelError("functions are associated with states and tasks only")
        rows = self.associations_of(assoc_kind, owner_id)
        return self._by_name(self.functions[a.member_id] for a in rows)

    def tasks_of(self, transition_id: str) -> list[TaskDef]:
        self.transition(transition_id)
        rows = self.associations_of(AssociationKind.TRANSITION_TASK, transition_id)
        return self._by_name(self.tasks[a.member_id] for a in rows)


def create_goal_net(name: str, description: str, creator: str,
                    rng: random.Random | None = None) -> GoalNetDocument:
    """Create an empty Goal Net document with a fresh UUID and version 0.

    No root, start, or end state is set; a fresh net intentionally fails
    validation until its properties are configured.
    """
    if not name.strip():
        raise ModelError("goal net name must be non-empty")
    return GoalNetDocument(
        id=new_uuid(rng), name=name, description=description,
        created_by=creator, _rng=rng,
    )
