"""Access control and design reuse.

Three totally ordered access levels: Read lets a user open a net, edit it
locally, and export it; Write additionally saves to the store and clones
tasks/functions; Admin additionally manages other users' grants. The
enforcement point for "edit without saving" is the save path, not editing.

Cloning always deep-copies: new UUIDs, no shared rows, so editing a clone
never touches the original.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import AccessDeniedError, ModelError, NotFoundError
from .ids import new_uuid
from .model import GoalNetDocument, create_goal_net

if TYPE_CHECKING:  # pragma: no cover
    from .persistence import Store


class AccessLevel(enum.IntEnum):
    READ = 1
    WRITE = 2
    ADMIN = 3

    @property
    def wire(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "AccessLevel":
        try:
            return cls[text.upper()]
        except KeyError:
            raise ModelError(f"unknown access level {text!r}") from None


@dataclass(frozen=True)
class AccessGrant:
    user_id: str
    gnet_id: str
    level: AccessLevel


def access_denied(actor: str, action: str, gnet_id: str) -> AccessDeniedError:
    return AccessDeniedError(f"user {actor} may not {action} goal net {gnet_id}")


def register_user(store: Store, login: str, display_name: str = "",
                  age_bracket: str = "", education_level: str = "") -> None:
    if not login.strip():
        raise ModelError("login must be non-empty")
    if store.one("SELECT login FROM user WHERE login = ?", (login,)) is not None:
        raise ModelError(f"login {login!r} is already registered")
    with store.write() as conn:
        conn.execute("INSERT INTO user VALUES(?,?,?,?)",
                     (login, display_name, age_bracket, education_level))


def user_exists(store: Store, login: str) -> bool:
    return store.one("SELECT login FROM user WHERE login = ?", (login,)) is not None


def _require_user(store: Store, login: str) -> None:
    if not user_exists(store, login):
        raise NotFoundError(f"unknown user {login!r}")


def _require_net(store: Store, gnet_id: str) -> None:
    if store.one("SELECT id FROM gnet WHERE id = ?", (gnet_id,)) is None:
        raise NotFoundError(f"unknown goal net {gnet_id}")


def grant_of(store: Store, user: str, gnet_id: str) -> AccessGrant | None:
    row = store.one("SELECT level FROM user_gnet WHERE user_id = ? AND gnet_id = ?",
                    (user, gnet_id))
    if row is None:
        return None
    return AccessGrant(user, gnet_id, AccessLevel.parse(row["level"]))


def check_access(store: Store, user: str, gnet_id: str,
                 required: AccessLevel) -> bool:
    """True iff the user holds a grant at or above ``required``. Never raises."""
    grant = grant_of(store, user, gnet_id)
    return grant is not None and grant.level >= required


def create_net_with_owner(store: Store, name: str, creator: str,
                          description: str = "") -> tuple[GoalNetDocument, AccessGrant]:
    """Create a net row plus an Admin grant for its creator, atomically."""
    _require_user(store, creator)
    doc = create_goal_net(name, description, creator)
    grant = AccessGrant(creator, doc.id, AccessLevel.ADMIN)
    with store.write() as conn:
        conn.execute(
            "INSERT INTO gnet VALUES(?,?,?,?,?,?,?,?,?)",
            (doc.id, doc.name, doc.description, None, None, None,
             creator, 0, None))
        conn.execute("INSERT INTO user_gnet VALUES(?,?,?)",
                     (creator, doc.id, grant.level.wire))
    return doc, grant


def adopt_net(store: Store, doc: GoalNetDocument, creator: str) -> AccessGrant:
    """Register an existing in-memory document (e.g. an import) in the store.

    The document is stored with its content and version as-is; the creator
    receives the Admin grant.
    """
    from .persistence import insert_document_rows  # deferred: import cycle

    _require_user(store, creator)
    if store.one("SELECT id FROM gnet WHERE id = ?", (doc.id,)) is not None:
        raise ModelError(f"goal net {doc.id} already exists in this store")
    grant = AccessGrant(creator, doc.id, AccessLevel.ADMIN)
    with store.write() as conn:
        conn.execute(
            "INSERT INTO gnet VALUES(?,?,?,?,?,?,?,?,?)",
            (doc.id, doc.name, doc.description, doc.root_state_id,
             doc.start_state_id, doc.end_state_id, doc.created_by,
             doc.version, None))
        conn.execute("INSERT INTO user_gnet VALUES(?,?,?)",
                     (creator, doc.id, grant.level.wire))
        insert_document_rows(conn, doc)
    return grant


def open_net(store: Store, user: str, gnet_id: str) -> GoalNetDocument:
    """Load a net for a user; requires at least Read access."""
    from .persistence import load

    _require_net(store, gnet_id)
    if not check_access(store, user, gnet_id, AccessLevel.READ):
        raise access_denied(user, "open", gnet_id)
    return load(store, gnet_id)


def _admin_count(store: Store, gnet_id: str) -> int:
    rows = store.query("SELECT user_id FROM user_gnet WHERE gnet_id = ? AND level = ?",
                       (gnet_id, AccessLevel.ADMIN.wire))
    return len(rows)


def grant_access(store: Store, actor: str, target_user: str, gnet_id: str,
                 level: AccessLevel) -> AccessGrant:
    _require_net(store, gnet_id)
    if not check_access(store, actor, gnet_id, AccessLevel.ADMIN):
        raise access_denied(actor, "manage access on", gnet_id)
    _require_user(store, target_user)
    existing = grant_of(store, target_user, gnet_id)
    if (existing is not None and existing.level is AccessLevel.ADMIN
            and level is not AccessLevel.ADMIN
            and _admin_count(store, gnet_id) == 1):
        raise ModelError("cannot demote the last admin of a goal net")
    with store.write() as conn:
        conn.execute(
            "INSERT INTO user_gnet VALUES(?,?,?) "
            "ON CONFLICT(user_id, gnet_id) DO UPDATE SET level = excluded.level",
            (target_user, gnet_id, level.wire))
    return AccessGrant(target_user, gnet_id, level)


def revoke_access(store: Store, actor: str, target_user: str, gnet_id: str) -> None:
    _require_net(store, gnet_id)
    if not check_access(store, actor, gnet_id, AccessLevel.ADMIN):
        raise access_denied(actor, "manage access on", gnet_id)
    existing = grant_of(store, target_user, gnet_id)
    if existing is None:
        raise NotFoundError(f"user {target_user!r} has no grant on {gnet_id}")
    if existing.level is AccessLevel.ADMIN and _admin_count(store, gnet_id) == 1:
        raise ModelError("cannot revoke the last admin of a goal net")
    with store.write() as conn:
        conn.execute("DELETE FROM user_gnet WHERE user_id = ? AND gnet_id = ?",
                     (target_user, gnet_id))


# -- clone ---------------------------------------------------------------------

def _require_clone_access(store: Store, actor: str, src_gnet: str,
                          dst_gnet: str) -> None:
    for gnet_id in (src_gnet, dst_gnet):
        _require_net(store, gnet_id)
    for gnet_id in (src_gnet, dst_gnet):
        if not check_access(store, actor, gnet_id, AccessLevel.WRITE):
            raise access_denied(actor, "clone into/from", gnet_id)


def clone_function(store: Store, actor: str, function_id: str,
                   src_gnet: str, dst_gnet: str) -> str:
    """Copy one function definition; associations are never copied."""
    _require_clone_access(store, actor, src_gnet, dst_gnet)
    row = store.one("SELECT * FROM method WHERE id = ? AND gnet_id = ?",
                    (function_id, src_gnet))
    if row is None:
        raise NotFoundError(f"unknown function {function_id} in {src_gnet}")
    new_id = new_uuid()
    with store.write() as conn:
        conn.execute("INSERT INTO method VALUES(?,?,?,?,?)",
                     (new_id, dst_gnet, row["name"], row["description"],
                      row["binding_key"]))
        conn.execute("UPDATE gnet SET version = version + 1 WHERE id = ?",
                     (dst_gnet,))
    return new_id


def clone_task(store: Store, actor: str, task_id: str,
               src_gnet: str, dst_gnet: str) -> dict[str, str]:
    """Copy a task, its functions, and their associations; returns old->new ids."""
    _require_clone_access(store, actor, src_gnet, dst_gnet)
    task = store.one("SELECT * FROM tasklist WHERE id = ? AND gnet_id = ?",
                     (task_id, src_gnet))
    if task is None:
        raise NotFoundError(f"unknown task {task_id} in {src_gnet}")
    assoc_rows = store.query(
        "SELECT * FROM tasklist_method WHERE gnet_id = ? AND owner_id = ? "
        "ORDER BY order_index", (src_gnet, task_id))

    mapping = {task_id: new_uuid()}
    with store.write() as conn:
        conn.execute("INSERT INTO tasklist VALUES(?,?,?,?)",
                     (mapping[task_id], dst_gnet, task["name"], task["description"]))
        for row in assoc_rows:
            fn = store.one("SELECT * FROM method WHERE id = ?", (row["member_id"],))
            new_fn = new_uuid()
            mapping[fn["id"]] = new_fn
            conn.execute("INSERT INTO method VALUES(?,?,?,?,?)",
                         (new_fn, dst_gnet, fn["name"], fn["description"],
                          fn["binding_key"]))
            new_assoc = new_uuid()
            mapping[row["id"]] = new_assoc
            conn.execute("INSERT INTO tasklist_method VALUES(?,?,?,?,?)",
                         (new_assoc, dst_gnet, mapping[task_id], new_fn,
                          row["order_index"]))
        conn.execute("UPDATE gnet SET version = version + 1 WHERE id = ?",
                     (dst_gnet,))
    return mapping
