"""User-behaviour action log and the 5-point feedback questionnaire.

Each log entry records object type, object id, user id, action type, and a
UTC-millisecond timestamp. Only the tracked (object, action) pairs are
accepted: nets are opened/closed/edited, states and transitions can also
be created/moved/deleted, everything else is created/edited/deleted. The
log and feedback tables are append-only.

Questionnaire questions live in the store and are loaded at runtime, so
they can change without a release or deployment.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .errors import ModelError, NotFoundError
from .ids import new_uuid

if TYPE_CHECKING:  # pragma: no cover
    from .persistence import Store


class ObjectType(str, Enum):
    GOAL_NET = "goal_net"
    STATE = "state"
    TRANSITION = "transition"
    ARC = "arc"
    FUNCTION = "function"
    TASK = "task"
    ASSOC_STATE_FUNCTION = "assoc_state_function"
    ASSOC_TRANSITION_TASK = "assoc_transition_task"
    ASSOC_TASK_FUNCTION = "assoc_task_function"


class ActionType(str, Enum):
    OPEN = "open"
    CLOSE = "close"
    EDIT = "edit"
    CREATE = "create"
    MOVE = "move"
    DELETE = "delete"


ALLOWED_ACTIONS: dict[ObjectType, frozenset[ActionType]] = {
    ObjectType.GOAL_NET: frozenset({ActionType.OPEN, ActionType.CLOSE, ActionType.EDIT}),
    ObjectType.STATE: frozenset({ActionType.CREATE, ActionType.EDIT,
                                 ActionType.MOVE, ActionType.DELETE}),
    ObjectType.TRANSITION: frozenset({ActionType.CREATE, ActionType.EDIT,
                                      ActionType.MOVE, ActionType.DELETE}),
}
for _other in (ObjectType.ARC, ObjectType.FUNCTION, ObjectType.TASK,
               ObjectType.ASSOC_STATE_FUNCTION, ObjectType.ASSOC_TRANSITION_TASK,
               ObjectType.ASSOC_TASK_FUNCTION):
    ALLOWED_ACTIONS[_other] = frozenset({ActionType.CREATE, ActionType.EDIT,
                                         ActionType.DELETE})


def now_ms() -> int:
    return int(time.time() * 1000)


@dataclass(frozen=True)
class ActionLogEntry:
    object_type: ObjectType
    object_id: str
    user_id: str
    action_type: ActionType
    timestamp: int = field(default_factory=now_ms)
    gnet_id: str | None = None  # net context, for per-net log queries


def pair_allowed(object_type: ObjectType, action_type: ActionType) -> bool:
    return action_type in ALLOWED_ACTIONS[object_type]


def record_action(store: Store, entry: ActionLogEntry) -> None:
    """Append one entry. A disallowed (object, action) pair is a caller bug."""
    if not pair_allowed(entry.object_type, entry.action_type):
        raise ModelError(
            f"action {entry.action_type.value!r} is not tracked for "
            f"{entry.object_type.value!r} objects")
    if store.one("SELECT login FROM user WHERE login = ?", (entry.user_id,)) is None:
        raise NotFoundError(f"unknown user {entry.user_id!r}")
    with store.write() as conn:
        conn.execute(
            "INSERT INTO action_log(id, gnet_id, object_type, object_id, "
            "user_id, action_type, timestamp) VALUES(?,?,?,?,?,?,?)",
            (new_uuid(), entry.gnet_id, entry.object_type.value, entry.object_id,
             entry.user_id, entry.action_type.value, entry.timestamp))


def query_log(store: Store, user: str | None = None, net: str | None = None,
              since: int | None = None, until: int | None = None) -> list[ActionLogEntry]:
    """Entries matching every given filter, ordered by timestamp then insertion."""
    clauses, args = [], []
    if user is not None:
        clauses.append("user_id = ?")
        args.append(user)
    if net is not None:
        clauses.append("(gnet_id = ? OR object_id = ?)")
        args.extend([net, net])
    if since is not None:
        clauses.append("timestamp >= ?")
        args.append(since)
    if until is not None:
        clauses.append("timestamp <= ?")
        args.append(until)
    where = f"WHERE {' AND '.join(clauses)}" if clauses else ""
    rows = store.query(
        f"SELECT * FROM action_log {where} ORDER BY timestamp, seq",  # noqa: S608
        tuple(args))
    return [ActionLogEntry(
        object_type=ObjectType(r["object_type"]), object_id=r["object_id"],
        user_id=r["user_id"], action_type=ActionType(r["action_type"]),
        timestamp=r["timestamp"], gnet_id=r["gnet_id"]) for r in rows]


# -- feedback questionnaire -----------------------------------------------------

@dataclass(frozen=True)
class FeedbackQuestion:
    id: str
    text: str
    active: bool


def add_question(store: Store, text: str, active: bool = True) -> str:
    if not text.strip():
        raise ModelError("question text must be non-empty")
    question_id = new_uuid()
    with store.write() as conn:
        conn.execute("INSERT INTO question VALUES(?,?,?)",
                     (question_id, text, 1 if active else 0))
    return question_id


def set_question_active(store: Store, question_id: str, active: bool) -> None:
    if store.one("SELECT id FROM question WHERE id = ?", (question_id,)) is None:
        raise NotFoundError(f"unknown question {question_id}")
    with store.write() as conn:
        conn.execute("UPDATE question SET active = ? WHERE id = ?",
                     (1 if active else 0, question_id))


def list_active_questions(store: Store) -> list[FeedbackQuestion]:
    rows = store.query("SELECT * FROM question WHERE active = 1 ORDER BY text, id")
    return [FeedbackQuestion(r["id"], r["text"], bool(r["active"])) for r in rows]


def submit_feedback(store: Store, user: str, question_id: str, score: int,
                    timestamp: int | None = None) -> None:
    """Record one 1..5 response to an active question."""
    if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
        raise ModelError(f"score must be an integer between 1 and 5, got {score!r}")
    if store.one("SELECT login FROM user WHERE login = ?", (user,)) is None:
        raise NotFoundError(f"unknown user {user!r}")
    row = store.one("SELECT active FROM question WHERE id = ?", (question_id,))
    if row is None:
        raise NotFoundError(f"unknown question {question_id}")
    if not row["active"]:
        raise ModelError("question is not active")
    with store.write() as conn:
        conn.execute("INSERT INTO feedback_log VALUES(?,?,?,?,?)",
                     (new_uuid(), question_id, user, score,
                      timestamp if timestamp is not None else now_ms()))


def mean_score(store: Store, question_id: str) -> float | None:
    rows = store.query("SELECT score FROM feedback_log WHERE question_id = ?",
                       (question_id,))
    if not rows:
        return None
    return sum(r["score"] for r in rows) / len(rows)
