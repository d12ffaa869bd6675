"""HTTP/JSON facade over the store: documents, validation, runs, access,
clone, telemetry, and feedback.

Authentication is a static bearer-token registry in the store (``token``
table); comparison is constant-time. Every route delegates its access
decision to the collaboration layer, and every state-mutating route
records an action-log entry before returning success.
"""
from __future__ import annotations

import hmac
import logging
from dataclasses import dataclass

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import collab, telemetry
from .document_io import document_obj, export_document, import_document
from .errors import (
    AccessDeniedError,
    AuthError,
    ConfigError,
    DocumentFormatError,
    GoalNetError,
    GuardParseError,
    InterpreterError,
    ModelError,
    NotFoundError,
    StoreError,
    VersionConflictError,
)
from .persistence import Store, list_nets, save, set_compiler_path
from .runner import RunConfig, run_external
from .svg import export_svg
from .validation import validate

log = logging.getLogger(__name__)

_STATUS = (
    (AuthError, 401, "invalid_token"),
    (AccessDeniedError, 403, "access_denied"),
    (NotFoundError, 404, "not_found"),
    (VersionConflictError, 409, "version_conflict"),
    (DocumentFormatError, 422, "invalid_document"),
    (GuardParseError, 422, "invalid_guard"),
    (ConfigError, 422, "compiler_not_specified"),
    (InterpreterError, 422, "interpreter_error"),
    (ModelError, 422, "invariant_violation"),
    (StoreError, 409, "store_error"),
)


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str


def add_token(store: Store, token: str, user_id: str) -> None:
    if not token:
        raise ModelError("token must be non-empty")
    if not collab.user_exists(store, user_id):
        raise NotFoundError(f"unknown user {user_id!r}")
    with store.write() as conn:
        conn.execute(
            "INSERT INTO token VALUES(?,?) "
            "ON CONFLICT(token) DO UPDATE SET user_id = excluded.user_id",
            (token, user_id))


def revoke_token(store: Store, token: str) -> None:
    with store.write() as conn:
        conn.execute("DELETE FROM token WHERE token = ?", (token,))


def authenticate(store: Store, token: str) -> Session:
    """Resolve a bearer token to a session; comparison is constant-time."""
    matched_user = None
    for row in store.query("SELECT token, user_id FROM token"):
        if hmac.compare_digest(row["token"].encode(), token.encode()):
            matched_user = row["user_id"]
    if matched_user is None:
        raise AuthError("unknown or missing token")
    return Session(token=token, user_id=matched_user)


def _record(store: Store, entry: telemetry.ActionLogEntry) -> None:
    # Logging must never fail the logged operation.
    try:
        telemetry.record_action(store, entry)
    except GoalNetError as exc:  # pragma: no cover - defensive
        log.warning("action log entry dropped: %s", exc)


def create_app(store: Store, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="goalnet", docs_url=None, redoc_url=None)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=cors_origins,
            allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(GoalNetError)
    async def handle_domain_error(_request: Request, exc: GoalNetError):
        for err_type, status, code in _STATUS:
            if isinstance(exc, err_type):
                body = {"code": code, "message": str(exc)}
                if isinstance(exc, DocumentFormatError) and exc.path:
                    body["path"] = exc.path
                return JSONResponse(status_code=status, content=body)
        return JSONResponse(status_code=500,
                            content={"code": "internal", "message": str(exc)})

    def session(request: Request) -> Session:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise AuthError("missing bearer token")
        return authenticate(store, header[7:].strip())

    def require(user: str, gnet_id: str, level: collab.AccessLevel, action: str) -> None:
        if store.one("SELECT id FROM gnet WHERE id = ?", (gnet_id,)) is None:
            raise NotFoundError(f"unknown goal net {gnet_id}")
        if not collab.check_access(store, user, gnet_id, level):
            raise collab.access_denied(user, action, gnet_id)

    # -- documents -------------------------------------------------------

    @app.post("/goalnets", status_code=201)
    async def create_net(request: Request, sess: Session = Depends(session)):
        body = await request.json()
        name = body.get("name", "")
        description = body.get("description", "")
        doc, _grant = collab.create_net_with_owner(
            store, name, sess.user_id, description=description)
        _record(store, telemetry.ActionLogEntry(
            telemetry.ObjectType.GOAL_NET, doc.id, sess.user_id,
            telemetry.ActionType.EDIT, gnet_id=doc.id))
        return document_obj(doc)

    @app.get("/goalnets")
    def list_goalnets(sess: Session = Depends(session)):
        return [{"id": n.id, "name": n.name, "description": n.description,
                 "version": n.version, "level": n.level}
                for n in list_nets(store, sess.user_id)]

    @app.get("/goalnets/{gnet_id}")
    def get_goalnet(gnet_id: str, sess: Session = Depends(session)):
        doc = collab.open_net(store, sess.user_id, gnet_id)
        return Response(content=export_document(doc), media_type="application/json",
                        headers={"ETag": str(doc.version)})

    @app.put("/goalnets/{gnet_id}")
    async def put_goalnet(gnet_id: str, request: Request,
                          sess: Session = Depends(session)):
        doc = import_document(await request.body())
        if doc.id != gnet_id:
            raise ModelError("document id does not match the URL")
        if_match = request.headers.get("if-match")
        if if_match is not None:
            try:
                doc.version = int(if_match)
            except ValueError:
                raise ModelError("If-Match must be an integer version") from None
        new_version = save(store, doc, sess.user_id)
        _record(store, telemetry.ActionLogEntry(
            telemetry.ObjectType.GOAL_NET, gnet_id, sess.user_id,
            telemetry.ActionType.EDIT, gnet_id=gnet_id))
        return {"version": new_version}

    # -- validation and runs ----------------------------------------------

    @app.post("/goalnets/{gnet_id}/validate")
    def validate_goalnet(gnet_id: str, sess: Session = Depends(session)):
        doc = collab.open_net(store, sess.user_id, gnet_id)
        return validate(doc).to_json_obj(doc)

    @app.post("/goalnets/{gnet_id}/run")
    async def run_goalnet(gnet_id: str, request: Request,
                          sess: Session = Depends(session)):
        require(sess.user_id, gnet_id, collab.AccessLevel.READ, "run")
        raw = await request.body()
        body = {} if not raw else (await request.json())
        config = RunConfig(
            compiler_path=body.get("compiler_path"),
            seed=int(body.get("seed", 0)),
            max_steps=int(body.get("max_steps", 10_000)),
            blackboard=body.get("blackboard", {}))
        if body.get("persist_compiler_path") and config.compiler_path:
            set_compiler_path(store, gnet_id, config.compiler_path)
        report = run_external(store, gnet_id, config)
        doc = collab.open_net(store, sess.user_id, gnet_id)
        return {
            "launched": report.launched,
            "compiler_path": report.compiler_path,
            "exit_code": report.exit_code,
            "errors": [d.to_json_obj(doc) for d in report.errors],
        }

    # -- collaboration -----------------------------------------------------

    @app.post("/goalnets/{gnet_id}/access")
    async def change_access(gnet_id: str, request: Request,
                            sess: Session = Depends(session)):
        body = await request.json()
        target = body.get("user", "")
        if body.get("revoke"):
            collab.revoke_access(store, sess.user_id, target, gnet_id)
            result = {"user": target, "level": None}
        else:
            level = collab.AccessLevel.parse(body.get("level", ""))
            grant = collab.grant_access(store, sess.user_id, target, gnet_id, level)
            result = {"user": grant.user_id, "level": grant.level.wire}
        _record(store, telemetry.ActionLogEntry(
            telemetry.ObjectType.GOAL_NET, gnet_id, sess.user_id,
            telemetry.ActionType.EDIT, gnet_id=gnet_id))
        return result

    @app.post("/clone")
    async def clone(request: Request, sess: Session = Depends(session)):
        body = await request.json()
        kind = body.get("kind", "")
        src, dst = body.get("source_net", ""), body.get("target_net", "")
        entity_id = body.get("id", "")
        if kind == "function":
            new_id = collab.clone_function(store, sess.user_id, entity_id, src, dst)
            mapping = {entity_id: new_id}
            obj_type = telemetry.ObjectType.FUNCTION
        elif kind == "task":
            mapping = collab.clone_task(store, sess.user_id, entity_id, src, dst)
            new_id = mapping[entity_id]
            obj_type = telemetry.ObjectType.TASK
        else:
            raise ModelError(f"clone kind must be 'function' or 'task', got {kind!r}")
        _record(store, telemetry.ActionLogEntry(
            obj_type, new_id, sess.user_id, telemetry.ActionType.CREATE,
            gnet_id=dst))
        return {"mapping": mapping}

    # -- exports ------------------------------------------------------------

    @app.get("/goalnets/{gnet_id}/export.svg")
    def get_svg(gnet_id: str, sess: Session = Depends(session)):
        doc = collab.open_net(store, sess.user_id, gnet_id)
        return Response(content=export_svg(doc), media_type="image/svg+xml")

    @app.get("/goalnets/{gnet_id}/export.gnet.json")
    def get_document_file(gnet_id: str, sess: Session = Depends(session)):
        doc = collab.open_net(store, sess.user_id, gnet_id)
        return Response(content=export_document(doc), media_type="application/json")

    # -- telemetry and feedback ------------------------------------------------

    @app.post("/actions", status_code=204)
    async def post_action(request: Request, sess: Session = Depends(session)):
        body = await request.json()
        entry = telemetry.ActionLogEntry(
            object_type=telemetry.ObjectType(body["object_type"]),
            object_id=body["object_id"],
            user_id=sess.user_id,
            action_type=telemetry.ActionType(body["action_type"]),
            timestamp=int(body.get("timestamp", telemetry.now_ms())),
            gnet_id=body.get("gnet_id"))
        try:
            telemetry.record_action(store, entry)
        except (ValueError, KeyError) as exc:
            raise ModelError(str(exc)) from exc
        return Response(status_code=204)

    @app.get("/questions")
    def get_questions(_sess: Session = Depends(session)):
        return [{"id": q.id, "text": q.text}
                for q in telemetry.list_active_questions(store)]

    @app.post("/feedback", status_code=204)
    async def post_feedback(request: Request, sess: Session = Depends(session)):
        body = await request.json()
        score = body.get("score")
        if not isinstance(score, int) or isinstance(score, bool):
            raise ModelError("score must be an integer between 1 and 5")
        telemetry.submit_feedback(store, sess.user_id,
                                  body.get("question_id", ""), score)
        return Response(status_code=204)

    @app.exception_handler(ValueError)
    async def handle_value_error(_request: Request, exc: ValueError):
        return JSONResponse(status_code=422,
                            content={"code": "invalid_value", "message": str(exc)})

    return app
