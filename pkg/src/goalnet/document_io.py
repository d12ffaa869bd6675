"""Canonical single-document interchange format (``.gnet.json``).

Export is byte-deterministic: every section is an id-sorted array, object
keys are sorted, numbers use shortest round-trip rendering, text is UTF-8
with LF line endings. ``import_document`` re-checks every structural
invariant and reports the path of the first offending field; it never
assigns new ids.
"""
from __future__ import annotations

import json
from typing import Any

from .errors import DocumentFormatError
from .ids import is_entity_id
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
)

FORMAT_VERSION = "goalnet/1"


# -- export -----------------------------------------------------------------

def _state_obj(s: State) -> dict:
    return {
        "id": s.id,
        "name": s.name,
        "description": s.description,
        "kind": s.kind.value,
        "achievement_value": float(s.achievement_value),
        "cost": float(s.cost),
        "parent_id": s.parent_id,
        "child_start_id": s.child_start_id,
        "child_end_id": s.child_end_id,
        "position": {"x": s.position.x, "y": s.position.y},
    }


def _transition_obj(t: Transition) -> dict:
    return {
        "id": t.id,
        "name": t.name,
        "description": t.description,
        "kind": t.kind.value,
        "parent_id": t.parent_id,
        "position": {"x": t.position.x, "y": t.position.y},
    }


def _arc_obj(a: Arc) -> dict:
    return {
        "id": a.id,
        "name": a.name,
        "description": a.description,
        "source": {"kind": a.source.kind.value, "id": a.source.id},
        "target": {"kind": a.target.kind.value, "id": a.target.id},
        "guard": a.guard,
        "weight": float(a.weight),
        "priority": a.priority,
    }


def document_obj(doc: GoalNetDocument) -> dict:
    """The canonical dict form of a document (eight fixed sections)."""
    return {
        "meta": {"format": FORMAT_VERSION},
        "net": {
            "id": doc.id,
            "name": doc.name,
            "description": doc.description,
            "created_by": doc.created_by,
            "version": doc.version,
            "root_state_id": doc.root_state_id,
            "start_state_id": doc.start_state_id,
            "end_state_id": doc.end_state_id,
        },
        "states": [_state_obj(s) for s in sorted(doc.states.values(), key=lambda e: e.id)],
        "transitions": [_transition_obj(t) for t in sorted(doc.transitions.values(), key=lambda e: e.id)],
        "arcs": [_arc_obj(a) for a in sorted(doc.arcs.values(), key=lambda e: e.id)],
        "functions": [
            {"id": f.id, "name": f.name, "description": f.description,
             "binding_key": f.binding_key}
            for f in sorted(doc.functions.values(), key=lambda e: e.id)
        ],
        "tasks": [
            {"id": t.id, "name": t.name, "description": t.description}
            for t in sorted(doc.tasks.values(), key=lambda e: e.id)
        ],
        "associations": [
            {"id": a.id, "kind": a.kind.value, "owner_id": a.owner_id,
             "member_id": a.member_id, "order_index": a.order_index}
            for a in sorted(doc.all_associations(), key=lambda e: e.id)
        ],
    }


def export_document(doc: GoalNetDocument) -> bytes:
    text = json.dumps(document_obj(doc), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


# -- import -----------------------------------------------------------------

def _need(obj: Any, key: str, kind: type | tuple, path: str, nullable: bool = False) -> Any:
    if not isinstance(obj, dict):
        raise DocumentFormatError("expected an object", path)
    if key not in obj:
        raise DocumentFormatError("missing field", f"{path}.{key}")
    value = obj[key]
    if value is None:
        if nullable:
            return None
        raise DocumentFormatError("must not be null", f"{path}.{key}")
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, bool):
        raise DocumentFormatError("expected an integer", f"{path}.{key}")
    if not isinstance(value, kind):
        raise DocumentFormatError(f"expected {getattr(kind, '__name__', kind)}", f"{path}.{key}")
    return value


def _need_id(obj: Any, key: str, path: str, nullable: bool = False) -> Any:
    value = _need(obj, key, str, path, nullable=nullable)
    if value is not None and not is_entity_id(value):
        raise DocumentFormatError("not a valid entity id", f"{path}.{key}")
    return value


def _enum(obj: Any, key: str, enum_cls, path: str):
    raw = _need(obj, key, str, path)
    try:
        return enum_cls(raw)
    except ValueError:
        raise DocumentFormatError(f"unknown {enum_cls.__name__} {raw!r}", f"{path}.{key}") from None


def _point(obj: Any, path: str) -> Point:
    raw = _need(obj, "position", dict, path)
    x = _need(raw, "x", float, f"{path}.position")
    y = _need(raw, "y", float, f"{path}.position")
    try:
        return Point(x, y)
    except Exception:
        raise DocumentFormatError("position must be finite", f"{path}.position") from None


def _entity_ref(obj: Any, key: str, path: str) -> EntityRef:
    raw = _need(obj, key, dict, path)
    kind = _enum(raw, "kind", EntityKind, f"{path}.{key}")
    ref_id = _need_id(raw, "id", f"{path}.{key}")
    return EntityRef(kind, ref_id)


def import_document(data: bytes) -> GoalNetDocument:
    """Parse canonical document bytes back into a :class:`GoalNetDocument`."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentFormatError(f"not valid UTF-8 JSON: {exc}", "") from None
    if not isinstance(payload, dict):
        raise DocumentFormatError("expected a top-level object", "")

    meta = _need(payload, "meta", dict, "")
    fmt = _need(meta, "format", str, "meta")
    if fmt != FORMAT_VERSION:
        raise DocumentFormatError(f"unsupported format version {fmt!r}", "meta.format")

    net = _need(payload, "net", dict, "")
    doc = GoalNetDocument(
        id=_need_id(net, "id", "net"),
        name=_need(net, "name", str, "net"),
        description=_need(net, "description", str, "net"),
        created_by=_need(net, "created_by", str, "net"),
        version=_need(net, "version", int, "net"),
        root_state_id=_need_id(net, "root_state_id", "net", nullable=True),
        start_state_id=_need_id(net, "start_state_id", "net", nullable=True),
        end_state_id=_need_id(net, "end_state_id", "net", nullable=True),
    )
    if doc.version < 0:
        raise DocumentFormatError("version must be non-negative", "net.version")
    if not doc.name.strip():
        raise DocumentFormatError("name must be non-empty", "net.name")

    seen_ids = {doc.id}

    def claim(entity_id: str, path: str) -> None:
        if entity_id in seen_ids:
            raise DocumentFormatError(f"duplicate id {entity_id}", f"{path}.id")
        seen_ids.add(entity_id)

    for i, raw in enumerate(_need(payload, "states", list, "")):
        path = f"states[{i}]"
        state = State(
            id=_need_id(raw, "id", path),
            name=_need(raw, "name", str, path),
            description=_need(raw, "description", str, path),
            kind=_enum(raw, "kind", StateKind, path),
            achievement_value=_need(raw, "achievement_value", float, path),
            cost=_need(raw, "cost", float, path),
            parent_id=_need_id(raw, "parent_id", path, nullable=True),
            child_start_id=_need_id(raw, "child_start_id", path, nullable=True),
            child_end_id=_need_id(raw, "child_end_id", path, nullable=True),
            position=_point(raw, path),
        )
        if state.achievement_value < 0:
            raise DocumentFormatError("must be non-negative", f"{path}.achievement_value")
        if state.cost < 0:
            raise DocumentFormatError("must be non-negative", f"{path}.cost")
        claim(state.id, path)
        doc.states[state.id] = state

    for i, raw in enumerate(_need(payload, "transitions", list, "")):
        path = f"transitions[{i}]"
        transition = Transition(
            id=_need_id(raw, "id", path),
            name=_need(raw, "name", str, path),
            description=_need(raw, "description", str, path),
            kind=_enum(raw, "kind", TransitionKind, path),
            parent_id=_need_id(raw, "parent_id", path, nullable=True),
            position=_point(raw, path),
        )
        claim(transition.id, path)
        doc.transitions[transition.id] = transition

    for i, raw in enumerate(_need(payload, "arcs", list, "")):
        path = f"arcs[{i}]"
        arc = Arc(
            id=_need_id(raw, "id", path),
            name=_need(raw, "name", str, path),
            description=_need(raw, "description", str, path),
            source=_entity_ref(raw, "source", path),
            target=_entity_ref(raw, "target", path),
            guard=_need(raw, "guard", str, path, nullable=True),
            weight=_need(raw, "weight", float, path),
            priority=_need(raw, "priority", int, path),
        )
        if not arc.weight > 0:
            raise DocumentFormatError("weight must be positive", f"{path}.weight")
        if arc.priority < 0:
            raise DocumentFormatError("priority must be non-negative", f"{path}.priority")
        claim(arc.id, path)
        doc.arcs[arc.id] = arc

    for i, raw in enumerate(_need(payload, "functions", list, "")):
        path = f"functions[{i}]"
        fn = FunctionDef(
            id=_need_id(raw, "id", path),
            name=_need(raw, "name", str, path),
            description=_need(raw, "description", str, path),
            binding_key=_need(raw, "binding_key", str, path),
        )
        if not fn.name.strip():
            raise DocumentFormatError("name must be non-empty", f"{path}.name")
        claim(fn.id, path)
        doc.functions[fn.id] = fn

    for i, raw in enumerate(_need(payload, "tasks", list, "")):
        path = f"tasks[{i}]"
        task = TaskDef(
            id=_need_id(raw, "id", path),
            name=_need(raw, "name", str, path),
            description=_need(raw, "description", str, path),
        )
        if not task.name.strip():
            raise DocumentFormatError("name must be non-empty", f"{path}.name")
        claim(task.id, path)
        doc.tasks[task.id] = task

    for i, raw in enumerate(_need(payload, "associations", list, "")):
        path = f"associations[{i}]"
        assoc = Association(
            id=_need_id(raw, "id", path),
            kind=_enum(raw, "kind", AssociationKind, path),
            owner_id=_need_id(raw, "owner_id", path),
            member_id=_need_id(raw, "member_id", path),
            order_index=_need(raw, "order_index", int, path),
        )
        if assoc.order_index < 0:
            raise DocumentFormatError("order_index must be non-negative", f"{path}.order_index")
        claim(assoc.id, path)
        doc._assoc_list(assoc.kind).append(assoc)

    _check_cross_references(doc)
    return doc


def _check_cross_references(doc: GoalNetDocument) -> None:
    for label, sid in (("net.root_state_id", doc.root_state_id),
                       ("net.start_state_id", doc.start_state_id),
                       ("net.end_state_id", doc.end_state_id)):
        if sid is not None and sid not in doc.states:
            raise DocumentFormatError("unresolved state reference", label)

    for i, state in enumerate(sorted(doc.states.values(), key=lambda s: s.id)):
        path = f"states[{i}]"
        if state.parent_id is not None:
            parent = doc.states.get(state.parent_id)
            if parent is None:
                raise DocumentFormatError("unresolved parent", f"{path}.parent_id")
            if parent.kind is not StateKind.COMPOSITE:
                raise DocumentFormatError("parent is not composite", f"{path}.parent_id")
        for key, child_id in (("child_start_id", state.child_start_id),
                              ("child_end_id", state.child_end_id)):
            if child_id is None:
                continue
            if state.kind is not StateKind.COMPOSITE:
                raise DocumentFormatError("atomic states have no boundaries", f"{path}.{key}")
            child = doc.states.get(child_id)
            if child is None or child.parent_id != state.id:
                raise DocumentFormatError("boundary is not a direct child", f"{path}.{key}")

    # Parent chains must terminate (forest, no cycles).
    for i, state in enumerate(sorted(doc.states.values(), key=lambda s: s.id)):
        seen = set()
        current = state.parent_id
        while current is not None:
            if current in seen:
                raise DocumentFormatError("parent cycle", f"states[{i}].parent_id")
            seen.add(current)
            current = doc.states[current].parent_id

    for i, transition in enumerate(sorted(doc.transitions.values(), key=lambda t: t.id)):
        if transition.parent_id is not None:
            parent = doc.states.get(transition.parent_id)
            if parent is None:
                raise DocumentFormatError("unresolved parent", f"transitions[{i}].parent_id")
            if parent.kind is not StateKind.COMPOSITE:
                raise DocumentFormatError("parent is not composite", f"transitions[{i}].parent_id")

    seen_pairs = set()
    for i, arc in enumerate(sorted(doc.arcs.values(), key=lambda a: a.id)):
        path = f"arcs[{i}]"
        if {arc.source.kind, arc.target.kind} != {EntityKind.STATE, EntityKind.TRANSITION}:
            raise DocumentFormatError("arc endpoints must be one state and one transition", path)
        endpoints = []
        for key, ref in (("source", arc.source), ("target", arc.target)):
            pool = doc.states if ref.kind is EntityKind.STATE else doc.transitions
            entity = pool.get(ref.id)
            if entity is None:
                raise DocumentFormatError("unresolved endpoint", f"{path}.{key}.id")
            endpoints.append(entity)
        if endpoints[0].parent_id != endpoints[1].parent_id:
            raise DocumentFormatError("arc endpoints are in different scopes", path)
        pair = (arc.source.id, arc.target.id)
        if pair in seen_pairs:
            raise DocumentFormatError("duplicate arc", path)
        seen_pairs.add(pair)

    from .model import _ASSOC_ENDPOINTS  # shared endpoint-kind table
    orders: dict[tuple[AssociationKind, str], list[int]] = {}
    seen_assoc = set()
    for i, assoc in enumerate(sorted(doc.all_associations(), key=lambda a: a.id)):
        path = f"associations[{i}]"
        owner_kind, member_kind = _ASSOC_ENDPOINTS[assoc.kind]
        pools = {EntityKind.STATE: doc.states, EntityKind.TRANSITION: doc.transitions,
                 EntityKind.FUNCTION: doc.functions, EntityKind.TASK: doc.tasks}
        if assoc.owner_id not in pools[owner_kind]:
            raise DocumentFormatError(f"owner must be a {owner_kind.value}", f"{path}.owner_id")
        if assoc.member_id not in pools[member_kind]:
            raise DocumentFormatError(f"member must be a {member_kind.value}", f"{path}.member_id")
        key = (assoc.kind, assoc.owner_id, assoc.member_id)
        if key in seen_assoc:
            raise DocumentFormatError("duplicate association pair", path)
        seen_assoc.add(key)
        orders.setdefault((assoc.kind, assoc.owner_id), []).append(assoc.order_index)

    for (kind, owner_id), indexes in orders.items():
        if sorted(indexes) != list(range(len(indexes))):
            raise DocumentFormatError(
                f"order_index values for owner {owner_id} are not contiguous",
                "associations")
