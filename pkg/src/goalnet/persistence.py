"""Durable store: a single-file embedded database plus save/load/list.

The store is one sqlite file whose tables mirror the document model (nets,
states, transitions, arcs, functions under ``method``, tasks under
``tasklist``, three association tables) plus the supporting tables for
users, access grants, action logging, the feedback questionnaire, and API
tokens. Every primary key is a UUID except ``user``, which is keyed by the
login string so people can type it.

Writes are serialized store-wide and transactional: a rejected save leaves
every table byte-identical. Concurrent saves are resolved optimistically
through the per-net version counter.
"""
from __future__ import annotations

import random
import sqlite3
import threading
from contextlib import contextmanager
from dataclasses import dataclass

from . import collab
from .document_io import export_document
from .errors import NotFoundError, StoreError, VersionConflictError
from .ids import new_uuid
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

_SCHEMA = """
CREATE TABLE IF NOT EXISTS gnet(
    id TEXT PRIMARY KEY, name TEXT NOT NULL, description TEXT NOT NULL,
    root_state_id TEXT, start_state_id TEXT, end_state_id TEXT,
    created_by TEXT NOT NULL, version INTEGER NOT NULL, compiler_path TEXT);
CREATE TABLE IF NOT EXISTS state(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, name TEXT, description TEXT,
    kind TEXT, achievement_value REAL, cost REAL, parent_id TEXT,
    child_start_id TEXT, child_end_id TEXT, x REAL, y REAL);
CREATE TABLE IF NOT EXISTS transition(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, name TEXT, description TEXT,
    kind TEXT, parent_id TEXT, x REAL, y REAL);
CREATE TABLE IF NOT EXISTS arc(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, name TEXT, description TEXT,
    source_kind TEXT, source_id TEXT, target_kind TEXT, target_id TEXT,
    guard TEXT, weight REAL, priority INTEGER);
CREATE TABLE IF NOT EXISTS method(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, name TEXT, description TEXT,
    binding_key TEXT);
CREATE TABLE IF NOT EXISTS tasklist(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, name TEXT, description TEXT);
CREATE TABLE IF NOT EXISTS state_method(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, owner_id TEXT, member_id TEXT,
    order_index INTEGER);
CREATE TABLE IF NOT EXISTS transition_tasklist(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, owner_id TEXT, member_id TEXT,
    order_index INTEGER);
CREATE TABLE IF NOT EXISTS tasklist_method(
    id TEXT PRIMARY KEY, gnet_id TEXT NOT NULL, owner_id TEXT, member_id TEXT,
    order_index INTEGER);
CREATE TABLE IF NOT EXISTS user(
    login TEXT PRIMARY KEY, display_name TEXT, age_bracket TEXT,
    education_level TEXT);
CREATE TABLE IF NOT EXISTS user_gnet(
    user_id TEXT NOT NULL, gnet_id TEXT NOT NULL, level TEXT NOT NULL,
    PRIMARY KEY(user_id, gnet_id));
CREATE TABLE IF NOT EXISTS action_log(
    seq INTEGER PRIMARY KEY AUTOINCREMENT, id TEXT NOT NULL,
    gnet_id TEXT, object_type TEXT, object_id TEXT, user_id TEXT,
    action_type TEXT, timestamp INTEGER);
CREATE TABLE IF NOT EXISTS question(
    id TEXT PRIMARY KEY, text TEXT NOT NULL, active INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS feedback_log(
    id TEXT PRIMARY KEY, question_id TEXT, user_id TEXT, score INTEGER,
    timestamp INTEGER);
CREATE TABLE IF NOT EXISTS token(
    token TEXT PRIMARY KEY, user_id TEXT NOT NULL);
"""

TABLES = ("gnet", "state", "transition", "arc", "method", "tasklist",
          "state_method", "transition_tasklist", "tasklist_method",
          "user", "user_gnet", "action_log", "question", "feedback_log",
          "token")

_ASSOC_TABLE = {
    AssociationKind.STATE_FUNCTION: "state_method",
    AssociationKind.TRANSITION_TASK: "transition_tasklist",
    AssociationKind.TASK_FUNCTION: "tasklist_method",
}


class Store:
    """Handle to one store file. Shareable across threads; writes serialize."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._lock:
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    @classmethod
    def open(cls, path: str) -> "Store":
        return cls(path)

    @classmethod
    def in_memory(cls) -> "Store":
        return cls(":memory:")

    def close(self) -> None:
        self._conn.close()

    @contextmanager
    def write(self):
        """Serialized, transactional write scope."""
        with self._lock:
            try:
                yield self._conn
                self._conn.commit()
            except BaseException:
                self._conn.rollback()
                raise

    def query(self, sql: str, args: tuple = ()) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(sql, args).fetchall()

    def one(self, sql: str, args: tuple = ()) -> sqlite3.Row | None:
        rows = self.query(sql, args)
        return rows[0] if rows else None

    def dump_rows(self) -> dict[str, list[tuple]]:
        """Every table as ordered row tuples; used for atomicity checks and merge."""
        out = {}
        for table in TABLES:
            cur = self.query(f"SELECT * FROM {table}")  # noqa: S608 - fixed table names
            out[table] = sorted(tuple(r) for r in cur)
        return out


# -- save / load --------------------------------------------------------------

def _wipe_net_rows(conn: sqlite3.Connection, gnet_id: str) -> None:
    for table in ("state", "transition", "arc", "method", "tasklist",
                  "state_method", "transition_tasklist", "tasklist_method"):
        conn.execute(f"DELETE FROM {table} WHERE gnet_id = ?", (gnet_id,))  # noqa: S608


def insert_document_rows(conn: sqlite3.Connection, doc: GoalNetDocument) -> None:
    """Insert every entity row of a document; the gnet row is the caller's job."""
    for s in doc.states.values():
        conn.execute(
            "INSERT INTO state VALUES(?,?,?,?,?,?,?,?,?,?,?,?)",
            (s.id, doc.id, s.name, s.description, s.kind.value,
             s.achievement_value, s.cost, s.parent_id,
             s.child_start_id, s.child_end_id, s.position.x, s.position.y))
    for t in doc.transitions.values():
        conn.execute(
            "INSERT INTO transition VALUES(?,?,?,?,?,?,?,?)",
            (t.id, doc.id, t.name, t.description, t.kind.value,
             t.parent_id, t.position.x, t.position.y))
    for a in doc.arcs.values():
        conn.execute(
            "INSERT INTO arc VALUES(?,?,?,?,?,?,?,?,?,?,?)",
            (a.id, doc.id, a.name, a.description,
             a.source.kind.value, a.source.id, a.target.kind.value,
             a.target.id, a.guard, a.weight, a.priority))
    for f in doc.functions.values():
        conn.execute("INSERT INTO method VALUES(?,?,?,?,?)",
                     (f.id, doc.id, f.name, f.description, f.binding_key))
    for task in doc.tasks.values():
        conn.execute("INSERT INTO tasklist VALUES(?,?,?,?)",
                     (task.id, doc.id, task.name, task.description))
    for assoc in doc.all_associations():
        conn.execute(
            f"INSERT INTO {_ASSOC_TABLE[assoc.kind]} VALUES(?,?,?,?,?)",  # noqa: S608
            (assoc.id, doc.id, assoc.owner_id, assoc.member_id,
             assoc.order_index))


def save(store: Store, doc: GoalNetDocument, actor: str) -> int:
    """Persist the document; returns (and stamps) the new version.

    Requires Write access and ``doc.version`` equal to the stored version.
    """
    row = store.one("SELECT version FROM gnet WHERE id = ?", (doc.id,))
    if row is None:
        raise NotFoundError(f"goal net {doc.id} is not registered in this store")
    if not collab.check_access(store, actor, doc.id, collab.AccessLevel.WRITE):
        raise collab.access_denied(actor, "write", doc.id)
    if row["version"] != doc.version:
        raise VersionConflictError(
            f"stored version is {row['version']} but document has {doc.version}; "
            "reload and retry")

    new_version = doc.version + 1
    with store.write() as conn:
        conn.execute(
            "UPDATE gnet SET name=?, description=?, root_state_id=?, "
            "start_state_id=?, end_state_id=?, created_by=?, version=? WHERE id=?",
            (doc.name, doc.description, doc.root_state_id, doc.start_state_id,
             doc.end_state_id, doc.created_by, new_version, doc.id))
        _wipe_net_rows(conn, doc.id)
        insert_document_rows(conn, doc)
    doc.version = new_version
    return new_version


def load(store: Store, gnet_id: str) -> GoalNetDocument:
    row = store.one("SELECT * FROM gnet WHERE id = ?", (gnet_id,))
    if row is None:
        raise NotFoundError(f"unknown goal net {gnet_id}")
    doc = GoalNetDocument(
        id=row["id"], name=row["name"], description=row["description"],
        created_by=row["created_by"], version=row["version"],
        root_state_id=row["root_state_id"], start_state_id=row["start_state_id"],
        end_state_id=row["end_state_id"],
    )
    for r in store.query("SELECT * FROM state WHERE gnet_id = ? ORDER BY id", (gnet_id,)):
        doc.states[r["id"]] = State(
            id=r["id"], name=r["name"], description=r["description"],
            kind=StateKind(r["kind"]), achievement_value=r["achievement_value"],
            cost=r["cost"], parent_id=r["parent_id"],
            child_start_id=r["child_start_id"], child_end_id=r["child_end_id"],
            position=Point(r["x"], r["y"]))
    for r in store.query("SELECT * FROM transition WHERE gnet_id = ? ORDER BY id", (gnet_id,)):
        doc.transitions[r["id"]] = Transition(
            id=r["id"], name=r["name"], description=r["description"],
            kind=TransitionKind(r["kind"]), parent_id=r["parent_id"],
            position=Point(r["x"], r["y"]))
    for r in store.query("SELECT * FROM arc WHERE gnet_id = ? ORDER BY id", (gnet_id,)):
        doc.arcs[r["id"]] = Arc(
            id=r["id"], name=r["name"], description=r["description"],
            source=EntityRef(EntityKind(r["source_kind"]), r["source_id"]),
            target=EntityRef(EntityKind(r["target_kind"]), r["target_id"]),
            guard=r["guard"], weight=r["weight"], priority=r["priority"])
    for r in store.query("SELECT * FROM method WHERE gnet_id = ? ORDER BY id", (gnet_id,)):
        doc.functions[r["id"]] = FunctionDef(
            id=r["id"], name=r["name"], description=r["description"],
            binding_key=r["binding_key"])
    for r in store.query("SELECT * FROM tasklist WHERE gnet_id = ? ORDER BY id", (gnet_id,)):
        doc.tasks[r["id"]] = TaskDef(id=r["id"], name=r["name"],
                                     description=r["description"])
    for kind, table in _ASSOC_TABLE.items():
        for r in store.query(
                f"SELECT * FROM {table} WHERE gnet_id = ? ORDER BY id", (gnet_id,)):  # noqa: S608
            doc._assoc_list(kind).append(Association(
                id=r["id"], kind=kind, owner_id=r["owner_id"],
                member_id=r["member_id"], order_index=r["order_index"]))
    return doc


@dataclass(frozen=True)
class NetSummary:
    id: str
    name: str
    description: str
    version: int
    level: str


def list_nets(store: Store, user: str) -> list[NetSummary]:
    """Nets the user can open (has any grant on), name-ordered."""
    rows = store.query(
        "SELECT g.id, g.name, g.description, g.version, ug.level "
        "FROM gnet g JOIN user_gnet ug ON ug.gnet_id = g.id "
        "WHERE ug.user_id = ? ORDER BY g.name, g.id", (user,))
    return [NetSummary(r["id"], r["name"], r["description"], r["version"],
                       r["level"]) for r in rows]


def set_compiler_path(store: Store, gnet_id: str, path: str | None) -> None:
    if store.one("SELECT id FROM gnet WHERE id = ?", (gnet_id,)) is None:
        raise NotFoundError(f"unknown goal net {gnet_id}")
    with store.write() as conn:
        conn.execute("UPDATE gnet SET compiler_path = ? WHERE id = ?",
                     (path, gnet_id))


def get_compiler_path(store: Store, gnet_id: str) -> str | None:
    row = store.one("SELECT compiler_path FROM gnet WHERE id = ?", (gnet_id,))
    if row is None:
        raise NotFoundError(f"unknown goal net {gnet_id}")
    return row["compiler_path"]


# -- dump / restore / merge ----------------------------------------------------

def dump_documents(store: Store) -> dict[str, bytes]:
    """Every net in the store as canonical document bytes, keyed by id."""
    out = {}
    for row in store.query("SELECT id FROM gnet ORDER BY id"):
        out[row["id"]] = export_document(load(store, row["id"]))
    return out


def restore_document(store: Store, data: bytes) -> str:
    """Adopt a document file into the store (registering its creator if new)."""
    from .document_io import import_document

    doc = import_document(data)
    if store.one("SELECT login FROM user WHERE login = ?", (doc.created_by,)) is None:
        collab.register_user(store, doc.created_by)
    collab.adopt_net(store, doc, doc.created_by)
    return doc.id


@dataclass
class MergeReport:
    user_conflicts: list[str]
    duplicate_ids: list[str]
    merged_nets: int


def merge_stores(dst: Store, src: Store) -> MergeReport:
    """Copy all rows from ``src`` into ``dst``.

    UUID-keyed rows never collide between independently grown stores; rows
    whose key already exists are kept as-is in ``dst`` and reported. User
    logins are the designed exception: a shared login is reported as a
    conflict for manual resolution, and ``dst``'s row wins.
    """
    report = MergeReport(user_conflicts=[], duplicate_ids=[], merged_nets=0)
    src_rows = {}
    for table in TABLES:
        cols = [c[1] for c in src.query(f"PRAGMA table_info({table})")]
        src_rows[table] = (cols, src.query(f"SELECT * FROM {table}"))  # noqa: S608

    with dst.write() as conn:
        for table in TABLES:
            cols, rows = src_rows[table]
            key = {"user": "login", "user_gnet": None, "action_log": None,
                   "token": "token"}.get(table, "id")
            for row in rows:
                values = tuple(row)
                if table == "user":
                    exists = conn.execute("SELECT 1 FROM user WHERE login = ?",
                                          (row["login"],)).fetchone()
                    if exists:
                        report.user_conflicts.append(row["login"])
                        continue
                elif key is not None:
                    exists = conn.execute(
                        f"SELECT 1 FROM {table} WHERE {key} = ?",  # noqa: S608
                        (row[key],)).fetchone()
                    if exists:
                        report.duplicate_ids.append(str(row[key]))
                        continue
                if table == "action_log":
                    # seq is store-local; let the destination renumber.
                    cols_no_seq = [c for c in cols if c != "seq"]
                    values = tuple(row[c] for c in cols_no_seq)
                    placeholders = ",".join("?" for _ in cols_no_seq)
                    conn.execute(
                        f"INSERT INTO action_log({','.join(cols_no_seq)}) "  # noqa: S608
                        f"VALUES({placeholders})", values)
                    continue
                if table == "user_gnet":
                    exists = conn.execute(
                        "SELECT 1 FROM user_gnet WHERE user_id = ? AND gnet_id = ?",
                        (row["user_id"], row["gnet_id"])).fetchone()
                    if exists:
                        continue
                placeholders = ",".join("?" for _ in cols)
                conn.execute(f"INSERT INTO {table} VALUES({placeholders})", values)  # noqa: S608
                if table == "gnet":
                    report.merged_nets += 1
    return report
