"""Command-line frontend.

Exit codes: 0 success, 1 validation errors present, 2 usage or
configuration error, 3 access denied, 4 store or conflict error.
Diagnostics go to stderr, data to stdout.
"""
from __future__ import annotations

import json
import os
import sys

import click

from . import collab, telemetry
from .document_io import export_document, import_document
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
from .model import (
    AssociationKind,
    EntityKind,
    GoalNetDocument,
    Point,
    StateKind,
    TransitionKind,
)
from .persistence import Store, save, set_compiler_path
from .runner import RunConfig, interpret, run_external, FunctionRegistry
from .svg import export_svg
from .validation import Severity, validate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_ACCESS = 3
EXIT_STORE = 4


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)


class _Ctx:
    def __init__(self, store_path: str | None, actor: str | None):
        self.store_path = store_path
        self.actor = actor
        self._store: Store | None = None

    def store(self, must_exist: bool = True) -> Store:
        if self.store_path is None:
            raise ConfigError("no store given; pass --store or set GOALNET_STORE")
        if (must_exist and self.store_path != ":memory:"
                and not os.path.exists(self.store_path)):
            raise ConfigError(f"store {self.store_path!r} does not exist; run 'goalnet init'")
        if self._store is None:
            self._store = Store.open(self.store_path)
        return self._store

    def user(self) -> str:
        if self.actor is None:
            raise ConfigError("no acting user; pass --as or set GOALNET_USER")
        return self.actor


@click.group()
@click.option("--store", "store_path", envvar="GOALNET_STORE", default=None,
              help="Path of the store file (env GOALNET_STORE).")
@click.option("--as", "actor", envvar="GOALNET_USER", default=None,
              help="Acting user login (env GOALNET_USER).")
@click.pass_context
def cli(ctx: click.Context, store_path: str | None, actor: str | None) -> None:
    """Design, validate, share, and run Goal Net models."""
    ctx.obj = _Ctx(store_path, actor)


@cli.command()
@click.pass_obj
def init(obj: _Ctx) -> int:
    """Create an empty store file."""
    store = obj.store(must_exist=False)
    store.query("SELECT 1 FROM gnet LIMIT 1")
    click.echo(obj.store_path)
    return EXIT_OK


@cli.command()
@click.argument("name")
@click.option("--description", default="")
@click.pass_obj
def new(obj: _Ctx, name: str, description: str) -> int:
    """Create a goal net owned by the acting user; prints its id."""
    store, actor = obj.store(), obj.user()
    doc, _grant = collab.create_net_with_owner(store, name, actor,
                                               description=description)
    telemetry.record_action(store, telemetry.ActionLogEntry(
        telemetry.ObjectType.GOAL_NET, doc.id, actor,
        telemetry.ActionType.EDIT, gnet_id=doc.id))
    click.echo(doc.id)
    return EXIT_OK


# -- batch edit ----------------------------------------------------------------

_OBJECT_TYPE = {
    EntityKind.GOAL_NET: telemetry.ObjectType.GOAL_NET,
    EntityKind.STATE: telemetry.ObjectType.STATE,
    EntityKind.TRANSITION: telemetry.ObjectType.TRANSITION,
    EntityKind.ARC: telemetry.ObjectType.ARC,
    EntityKind.FUNCTION: telemetry.ObjectType.FUNCTION,
    EntityKind.TASK: telemetry.ObjectType.TASK,
}

_ASSOC_OBJECT_TYPE = {
    AssociationKind.STATE_FUNCTION: telemetry.ObjectType.ASSOC_STATE_FUNCTION,
    AssociationKind.TRANSITION_TASK: telemetry.ObjectType.ASSOC_TRANSITION_TASK,
    AssociationKind.TASK_FUNCTION: telemetry.ObjectType.ASSOC_TASK_FUNCTION,
}


def apply_edit_op(doc: GoalNetDocument, op: dict, labels: dict[str, str],
                  ) -> tuple[telemetry.ObjectType, str, telemetry.ActionType]:
    """Apply one script operation; returns what to log for it."""

    def resolve(value):
        if value is None:
            return None
        if isinstance(value, str) and value.startswith("@"):
            label = value[1:]
            if label not in labels:
                raise ModelError(f"unknown label {value!r}")
            return labels[label]
        return value

    def bind(entity_id: str) -> str:
        if "as" in op:
            labels[op["as"]] = entity_id
        return entity_id

    name = op.get("op")
    if name == "add_state":
        new_id = bind(doc.add_state(resolve(op.get("parent")), op["name"],
                                    StateKind(op.get("kind", "atomic")),
                                    Point(op.get("x", 0), op.get("y", 0))))
        return telemetry.ObjectType.STATE, new_id, telemetry.ActionType.CREATE
    if name == "add_transition":
        new_id = bind(doc.add_transition(resolve(op.get("parent")), op["name"],
                                         TransitionKind(op.get("kind", "direct")),
                                         Point(op.get("x", 0), op.get("y", 0))))
        return telemetry.ObjectType.TRANSITION, new_id, telemetry.ActionType.CREATE
    if name == "add_arc":
        new_id = bind(doc.add_arc(doc.ref(resolve(op["source"])),
                                  doc.ref(resolve(op["target"]))))
        return telemetry.ObjectType.ARC, new_id, telemetry.ActionType.CREATE
    if name == "convert_state_kind":
        state_id = resolve(op["state"])
        doc.convert_state_kind(state_id, StateKind(op["kind"]),
                               cascade=bool(op.get("cascade", False)))
        return telemetry.ObjectType.STATE, state_id, telemetry.ActionType.EDIT
    if name == "set_net_properties":
        doc.set_net_properties(resolve(op.get("root")), resolve(op.get("start")),
                               resolve(op.get("end")))
        return telemetry.ObjectType.GOAL_NET, doc.id, telemetry.ActionType.EDIT
    if name == "set_composite_boundaries":
        composite = resolve(op["composite"])
        doc.set_composite_boundaries(composite, resolve(op.get("start")),
                                     resolve(op.get("end")))
        return telemetry.ObjectType.STATE, composite, telemetry.ActionType.EDIT
    if name == "remove_entities":
        ids = sorted(resolve(v) for v in op["ids"])
        if not ids:
            doc.remove_entities(set())
            return telemetry.ObjectType.GOAL_NET, doc.id, telemetry.ActionType.EDIT
        first_kind = doc.kind_of(ids[0])
        object_type = (_ASSOC_OBJECT_TYPE[next(a for a in doc.all_associations()
                                               if a.id == ids[0]).kind]
                       if first_kind is EntityKind.ASSOCIATION
                       else _OBJECT_TYPE[first_kind])
        doc.remove_entities(set(ids))
        return object_type, ids[0], telemetry.ActionType.DELETE
    if name == "move_entities":
        ids = sorted(resolve(v) for v in op["ids"])
        doc.move_entities(set(ids), Point(op.get("dx", 0), op.get("dy", 0)))
        return (_OBJECT_TYPE[doc.kind_of(ids[0])], ids[0],
                telemetry.ActionType.MOVE)
    if name == "add_function":
        new_id = bind(doc.add_function(op["name"], op.get("description", ""),
                                       op.get("binding_key", "")))
        return telemetry.ObjectType.FUNCTION, new_id, telemetry.ActionType.CREATE
    if name == "add_task":
        new_id = bind(doc.add_task(op["name"], op.get("description", "")))
        return telemetry.ObjectType.TASK, new_id, telemetry.ActionType.CREATE
    if name == "associate":
        kind = AssociationKind(op["kind"])
        new_id = bind(doc.associate(kind, resolve(op["owner"]),
                                    resolve(op["member"])))
        return _ASSOC_OBJECT_TYPE[kind], new_id, telemetry.ActionType.CREATE
    if name == "dissociate":
        assoc_id = resolve(op["association"])
        assoc = next((a for a in doc.all_associations() if a.id == assoc_id), None)
        if assoc is None:
            raise NotFoundError(f"unknown association {assoc_id}")
        doc.dissociate(assoc_id)
        return _ASSOC_OBJECT_TYPE[assoc.kind], assoc_id, telemetry.ActionType.DELETE
    if name == "update_properties":
        entity_id = resolve(op["entity"])
        doc.update_properties(entity_id, **op.get("set", {}))
        kind = doc.kind_of(entity_id)
        object_type = (_ASSOC_OBJECT_TYPE[next(a for a in doc.all_associations()
                                               if a.id == entity_id).kind]
                       if kind is EntityKind.ASSOCIATION else _OBJECT_TYPE[kind])
        return object_type, entity_id, telemetry.ActionType.EDIT
    raise ModelError(f"unknown edit operation {name!r}")


@cli.command()
@click.option("--net", "gnet_id", required=True)
@click.option("--dry-run", is_flag=True, help="Apply the script without saving.")
@click.argument("script", type=click.File("r"))
@click.pass_obj
def edit(obj: _Ctx, gnet_id: str, dry_run: bool, script) -> int:
    """Apply a JSON batch script of editing operations, then save."""
    store, actor = obj.store(), obj.user()
    ops = json.load(script)
    if not isinstance(ops, list):
        raise ModelError("edit script must be a JSON array of operations")
    doc = collab.open_net(store, actor, gnet_id)
    labels: dict[str, str] = {}
    log_entries = []
    for op in ops:
        object_type, object_id, action = apply_edit_op(doc, op, labels)
        log_entries.append(telemetry.ActionLogEntry(
            object_type, object_id, actor, action, gnet_id=gnet_id))
    if dry_run:
        click.echo(json.dumps({"applied": len(ops), "saved": False}))
        return EXIT_OK
    version = save(store, doc, actor)
    for entry in log_entries:
        telemetry.record_action(store, entry)
    click.echo(json.dumps({"applied": len(ops), "saved": True, "version": version}))
    return EXIT_OK


# -- validation and runs ----------------------------------------------------------

def _print_problems(doc, diagnostics) -> None:
    rows = [(doc.entity_name(d.subject.id) or d.subject.id, d.message)
            for d in diagnostics]
    width = max([len("Object")] + [len(r[0]) for r in rows])
    click.echo(f"{'Object'.ljust(width)}  Message")
    for obj_name, message in rows:
        click.echo(f"{obj_name.ljust(width)}  {message}")


@cli.command("validate")
@click.option("--net", "gnet_id", required=True)
@click.option("--warnings", "show_warnings", is_flag=True,
              help="Include warnings in the problem table.")
@click.pass_obj
def validate_cmd(obj: _Ctx, gnet_id: str, show_warnings: bool) -> int:
    """Run model validation; exits 1 when the net has errors."""
    store, actor = obj.store(), obj.user()
    doc = collab.open_net(store, actor, gnet_id)
    report = validate(doc)
    shown = [d for d in report.diagnostics
             if show_warnings or d.severity is Severity.ERROR]
    _print_problems(doc, shown)
    click.echo(f"{report.error_count} errors, {report.warning_count} warnings",
               err=True)
    return EXIT_VALIDATION if report.error_count else EXIT_OK


@cli.command()
@click.option("--net", "gnet_id", required=True)
@click.option("--compiler", "compiler_path", default=None,
              help="Set and persist the external compiler path for this net.")
@click.option("--interpret", "use_interpreter", is_flag=True,
              help="Run the bundled reference interpreter instead.")
@click.option("--seed", default=0, show_default=True)
@click.option("--max-steps", default=10_000, show_default=True)
@click.option("--blackboard", "blackboard_json", default="{}",
              help="Initial blackboard as a JSON object.")
@click.pass_obj
def run(obj: _Ctx, gnet_id: str, compiler_path: str | None,
        use_interpreter: bool, seed: int, max_steps: int,
        blackboard_json: str) -> int:
    """Validate the net, then launch the external compiler (or interpreter)."""
    store, actor = obj.store(), obj.user()
    doc = collab.open_net(store, actor, gnet_id)
    config = RunConfig(compiler_path=compiler_path, seed=seed,
                       max_steps=max_steps,
                       blackboard=json.loads(blackboard_json))
    if use_interpreter:
        trace = interpret(doc, FunctionRegistry(), config)
        sys.stdout.buffer.write(trace.to_jsonl())
        return EXIT_OK
    if compiler_path:
        set_compiler_path(store, gnet_id, compiler_path)
    report = run_external(store, gnet_id, config)
    if not report.launched:
        _print_problems(doc, report.errors)
        click.echo(f"{len(report.errors)} errors; external compiler not launched",
                   err=True)
        return EXIT_VALIDATION
    click.echo(f"compiler exited with status {report.exit_code}", err=True)
    return EXIT_OK if report.exit_code == 0 else EXIT_STORE


@cli.command()
@click.option("--net", "gnet_id", required=True)
@click.option("--format", "fmt", type=click.Choice(["svg", "gnet.json"]),
              required=True)
@click.option("--out", "out_path", default=None,
              help="Output file (stdout if omitted).")
@click.pass_obj
def export(obj: _Ctx, gnet_id: str, fmt: str, out_path: str | None) -> int:
    """Export a net as an SVG drawing or a canonical document file."""
    store, actor = obj.store(), obj.user()
    doc = collab.open_net(store, actor, gnet_id)
    data = export_svg(doc) if fmt == "svg" else export_document(doc)
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


@cli.command("import")
@click.argument("source", type=click.File("rb"))
@click.pass_obj
def import_cmd(obj: _Ctx, source) -> int:
    """Adopt a .gnet.json document file into the store; prints its id."""
    store, actor = obj.store(), obj.user()
    doc = import_document(source.read())
    collab.adopt_net(store, doc, actor)
    click.echo(doc.id)
    return EXIT_OK


# -- collaboration ------------------------------------------------------------------

@cli.group()
def clone() -> None:
    """Clone a function or task between nets (Write access on both)."""


@clone.command("function")
@click.option("--id", "function_id", required=True)
@click.option("--from", "src", required=True)
@click.option("--to", "dst", required=True)
@click.pass_obj
def clone_function_cmd(obj: _Ctx, function_id: str, src: str, dst: str) -> int:
    store, actor = obj.store(), obj.user()
    new_id = collab.clone_function(store, actor, function_id, src, dst)
    click.echo(new_id)
    return EXIT_OK


@clone.command("task")
@click.option("--id", "task_id", required=True)
@click.option("--from", "src", required=True)
@click.option("--to", "dst", required=True)
@click.pass_obj
def clone_task_cmd(obj: _Ctx, task_id: str, src: str, dst: str) -> int:
    store, actor = obj.store(), obj.user()
    mapping = collab.clone_task(store, actor, task_id, src, dst)
    click.echo(json.dumps(mapping, sort_keys=True))
    return EXIT_OK


@cli.group()
def share() -> None:
    """Manage access grants on a net (Admin only)."""


@share.command("grant")
@click.option("--net", "gnet_id", required=True)
@click.option("--user", "target", required=True)
@click.option("--level", type=click.Choice(["read", "write", "admin"]),
              required=True)
@click.pass_obj
def share_grant(obj: _Ctx, gnet_id: str, target: str, level: str) -> int:
    store, actor = obj.store(), obj.user()
    grant = collab.grant_access(store, actor, target, gnet_id,
                                collab.AccessLevel.parse(level))
    click.echo(f"{grant.user_id} {grant.level.wire} {grant.gnet_id}")
    return EXIT_OK


@share.command("revoke")
@click.option("--net", "gnet_id", required=True)
@click.option("--user", "target", required=True)
@click.pass_obj
def share_revoke(obj: _Ctx, gnet_id: str, target: str) -> int:
    store, actor = obj.store(), obj.user()
    collab.revoke_access(store, actor, target, gnet_id)
    return EXIT_OK


@cli.group()
def users() -> None:
    """Manage registered users."""


@users.command("add")
@click.argument("login")
@click.option("--name", "display_name", default="")
@click.option("--age-bracket", default="")
@click.option("--education", "education_level", default="")
@click.pass_obj
def users_add(obj: _Ctx, login: str, display_name: str, age_bracket: str,
              education_level: str) -> int:
    collab.register_user(obj.store(), login, display_name, age_bracket,
                         education_level)
    click.echo(login)
    return EXIT_OK


@users.command("set-token")
@click.argument("login")
@click.argument("token")
@click.pass_obj
def users_set_token(obj: _Ctx, login: str, token: str) -> int:
    from .service import add_token

    add_token(obj.store(), token, login)
    return EXIT_OK


# -- telemetry -----------------------------------------------------------------------

@cli.group("log")
def log_group() -> None:
    """Inspect the user-behaviour action log."""


@log_group.command("export")
@click.option("--user", default=None)
@click.option("--net", default=None)
@click.option("--since", type=int, default=None, help="UTC milliseconds.")
@click.option("--until", type=int, default=None, help="UTC milliseconds.")
@click.pass_obj
def log_export(obj: _Ctx, user: str | None, net: str | None,
               since: int | None, until: int | None) -> int:
    """Write matching log entries as one JSON object per line."""
    entries = telemetry.query_log(obj.store(), user=user, net=net,
                                  since=since, until=until)
    for entry in entries:
        click.echo(json.dumps({
            "object_type": entry.object_type.value,
            "object_id": entry.object_id,
            "user_id": entry.user_id,
            "action_type": entry.action_type.value,
            "timestamp": entry.timestamp,
            "gnet_id": entry.gnet_id,
        }, sort_keys=True))
    return EXIT_OK


@cli.group()
def feedback() -> None:
    """The built-in 5-point feedback questionnaire."""


@feedback.command("questions")
@click.pass_obj
def feedback_questions(obj: _Ctx) -> int:
    for question in telemetry.list_active_questions(obj.store()):
        click.echo(json.dumps({"id": question.id, "text": question.text},
                              sort_keys=True))
    return EXIT_OK


@feedback.command("submit")
@click.option("--question", "question_id", required=True)
@click.option("--score", type=int, required=True)
@click.pass_obj
def feedback_submit(obj: _Ctx, question_id: str, score: int) -> int:
    store, actor = obj.store(), obj.user()
    telemetry.submit_feedback(store, actor, question_id, score)
    return EXIT_OK


@feedback.command("add")
@click.option("--text", required=True)
@click.pass_obj
def feedback_add(obj: _Ctx, text: str) -> int:
    click.echo(telemetry.add_question(obj.store(), text))
    return EXIT_OK


@cli.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin for the designer UI (repeatable).")
@click.pass_obj
def serve(obj: _Ctx, listen: str, cors_origins: tuple[str, ...]) -> int:
    """Serve the HTTP API."""
    import uvicorn

    from .service import create_app

    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"--listen must be addr:port, got {listen!r}")
    app = create_app(obj.store(), cors_origins=list(cors_origins) or None)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.UsageError as exc:
        _fail(exc.format_message())
        return EXIT_USAGE
    except click.ClickException as exc:
        _fail(exc.format_message())
        return EXIT_USAGE
    except click.Abort:
        _fail("aborted")
        return EXIT_USAGE
    except (AccessDeniedError, AuthError) as exc:
        _fail(str(exc))
        return EXIT_ACCESS
    except (VersionConflictError, StoreError, NotFoundError, InterpreterError) as exc:
        _fail(str(exc))
        return EXIT_STORE
    except (ConfigError, ModelError, DocumentFormatError, GuardParseError,
            GoalNetError) as exc:
        _fail(str(exc))
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        _fail(f"bad JSON input: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
