"""Acceptance suite: one test per release criterion, with its tolerance.

Run with ``pytest tests/test_acceptance.py -v`` for one pass/fail line per
criterion (each test also prints an explicit PASS line).
"""
from __future__ import annotations

import hashlib
import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from goalnet import collab, sample_nets, telemetry
from goalnet.cli import main as cli_main
from goalnet.document_io import export_document, import_document
from goalnet.errors import AccessDeniedError, ConfigError, ModelError
from goalnet.guards import parse_guard, format_guard, eval_guard, Or, And, Ident
from goalnet.model import AssociationKind, Point, StateKind, TransitionKind, create_goal_net
from goalnet.persistence import Store, load, save
from goalnet.runner import FinishReason, FunctionRegistry, RunConfig, interpret, run_external
from goalnet.validation import Rule, Severity, validate, validate_for_run

from docgen import random_document
from oracle import oracle_diagnostics, report_multiset

import test_guards as guard_helpers


def ok(name: str) -> None:
    print(f"PASS: {name}")


FIG_4_7_ROWS = [
    "This Goal Net has no root state.",
    "This Goal Net has no start state.",
    "This Goal Net has no end state.",
    "State SDLC is not connected to any transition and it's not the root state.",
]


def test_fig_4_7_golden():
    """Pre-fix SDLC fixture validates to exactly the four problem rows."""
    doc = sample_nets.sdlc_document(with_properties=False)
    started = time.perf_counter()
    report = validate(doc)
    elapsed = time.perf_counter() - started
    errors = [d for d in report.diagnostics if d.severity is Severity.ERROR]
    assert [d.message for d in errors] == FIG_4_7_ROWS
    assert report.error_count == 4
    assert elapsed < 1.0
    ok(f"Fig 4.7 golden test (4 rows character-identical, {elapsed * 1000:.1f} ms)")


def test_fix_flow():
    """Setting net properties on the completed topology removes all errors."""
    doc = sample_nets.sdlc_document(with_properties=False)
    names = {s.name: s.id for s in doc.states.values()}
    doc.set_net_properties(names["SDLC"], names["Start"], names["End"])
    assert validate_for_run(doc) == []
    ok("Fix-flow test (validate_for_run returns 0 errors)")


def test_empty_net():
    doc = create_goal_net("Empty", "", "u")
    report = validate(doc)
    assert report.error_count == 3
    assert report.warning_count == 0
    assert all(d.rule is Rule.E1 for d in report.diagnostics)
    ok("Empty-net test (exactly 3 errors, 0 warnings)")


def test_oracle_equivalence():
    """Rule engine equals the brute-force checker on 1,000 random documents."""
    rng = random.Random(0xACCE97)
    started = time.perf_counter()
    for i in range(1000):
        doc = random_document(rng)
        assert len(doc.states) <= 12 and len(doc.transitions) <= 8
        assert len(doc.arcs) <= 20
        engine = report_multiset(validate(doc))
        oracle = sorted(oracle_diagnostics(doc))
        assert engine == oracle, f"mismatch on document {i}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    ok(f"Oracle equivalence (1,000 documents, {elapsed:.2f} s)")


def test_access_grid():
    """All 18 (level, action) cells match the access table."""
    expected = {
        "read": {"open": True, "local-edit": True, "export": True,
                 "save": False, "clone": False, "grant": False},
        "write": {"open": True, "local-edit": True, "export": True,
                  "save": True, "clone": True, "grant": False},
        "admin": {"open": True, "local-edit": True, "export": True,
                  "save": True, "clone": True, "grant": True},
    }
    cells = 0
    for level_name, actions in expected.items():
        store = Store.in_memory()
        for login in ("owner", "subject", "third"):
            collab.register_user(store, login)
        doc = sample_nets.sdlc_document(creator="owner")
        collab.adopt_net(store, doc, "owner")
        target, _ = collab.create_net_with_owner(store, "Target", "owner")
        collab.grant_access(store, "owner", "subject", target.id,
                            collab.AccessLevel.WRITE)
        collab.grant_access(store, "owner", "subject", doc.id,
                            collab.AccessLevel.parse(level_name))
        fn_id = next(iter(doc.functions))

        def attempt(action: str) -> bool:
            try:
                if action == "open":
                    collab.open_net(store, "subject", doc.id)
                elif action == "local-edit":
                    local = collab.open_net(store, "subject", doc.id)
                    local.add_task("Local Task", "")
                elif action == "export":
                    export_document(collab.open_net(store, "subject", doc.id))
                elif action == "save":
                    fresh = load(store, doc.id)
                    fresh.add_task(f"Task {level_name}", "")
                    save(store, fresh, "subject")
                elif action == "clone":
                    collab.clone_function(store, "subject", fn_id, doc.id, target.id)
                elif action == "grant":
                    collab.grant_access(store, "subject", "third", doc.id,
                                        collab.AccessLevel.READ)
                return True
            except AccessDeniedError:
                return False

        for action, allowed in actions.items():
            assert attempt(action) == allowed, (level_name, action)
            cells += 1
        store.close()
    assert cells == 18
    ok("Access grid (18/18 cells match)")


def test_clone_isolation():
    """Cloning a task creates 1+2k fresh rows and never touches the source."""
    store = Store.in_memory()
    collab.register_user(store, "lisiyao")
    src = sample_nets.sdlc_document()
    collab.adopt_net(store, src, "lisiyao")
    dst, _ = collab.create_net_with_owner(store, "Agile SDLC", "lisiyao")
    task_id = next(t.id for t in src.tasks.values() if t.name == "Do Design")
    k = len(src.associations_of(AssociationKind.TASK_FUNCTION, task_id))

    rows_before = store.dump_rows()
    source_before = export_document(load(store, src.id))
    mapping = collab.clone_task(store, "lisiyao", task_id, src.id, dst.id)
    rows_after = store.dump_rows()

    assert len(mapping) == 1 + 2 * k
    assert set(mapping).isdisjoint(mapping.values())
    new_rows = (len(rows_after["tasklist"]) - len(rows_before["tasklist"])
                + len(rows_after["method"]) - len(rows_before["method"])
                + len(rows_after["tasklist_method"]) - len(rows_before["tasklist_method"]))
    assert new_rows == 1 + 2 * k

    dst_doc = load(store, dst.id)
    for new_id in mapping.values():
        if dst_doc.kind_of(new_id).value in ("task", "function"):
            dst_doc.update_properties(new_id, name=f"Mutated {new_id[:8]}",
                                      description="rewritten")
    save(store, dst_doc, "lisiyao")
    assert export_document(load(store, src.id)) == source_before
    store.close()
    ok(f"Clone isolation (1+2k rows with k={k}; source export byte-identical)")


def test_round_trip():
    """export∘import∘export = export on 1,000 documents; byte-stable across runs."""
    rng = random.Random(0x0D0C)
    for _ in range(1000):
        doc = random_document(rng)
        first = export_document(doc)
        assert export_document(import_document(first)) == first

    script = (
        "import random, hashlib, sys\n"
        "sys.path.insert(0, {tests!r})\n"
        "from docgen import random_document\n"
        "from goalnet.document_io import export_document\n"
        "rng = random.Random(20240817)\n"
        "h = hashlib.sha256()\n"
        "for _ in range(1000):\n"
        "    h.update(export_document(random_document(rng)))\n"
        "print(h.hexdigest())\n"
    ).format(tests=str(Path(__file__).parent))
    digests = {
        subprocess.run([sys.executable, "-c", script], capture_output=True,
                       text=True, check=True).stdout.strip()
        for _ in range(2)
    }
    assert len(digests) == 1
    ok("Round-trip (1,000 documents; canonical export byte-stable across processes)")


def test_run_gate(tmp_path):
    store = Store.in_memory()
    store.path = str(tmp_path / "store.db")  # give the stub a printable path
    collab.register_user(store, "lisiyao")
    compiler = tmp_path / "compiler.sh"
    capture = tmp_path / "argv.txt"
    compiler.write_text(f'#!/bin/sh\necho "$@" > {capture}\nexit 0\n')
    compiler.chmod(0o755)

    broken = sample_nets.sdlc_document(with_properties=False, seed=21)
    collab.adopt_net(store, broken, "lisiyao")
    report = run_external(store, broken.id, RunConfig(compiler_path=str(compiler)))
    assert not report.launched and len(report.errors) >= 1
    assert not capture.exists()

    good = sample_nets.sdlc_document(seed=22)
    collab.adopt_net(store, good, "lisiyao")
    with pytest.raises(ConfigError) as err:
        run_external(store, good.id, RunConfig())
    assert "external compiler is not specified" in str(err.value)

    report = run_external(store, good.id, RunConfig(compiler_path=str(compiler)))
    assert report.launched and report.exit_code == 0
    argv = capture.read_text().split()
    assert "--goalnet" in argv and good.id in argv
    store.close()
    ok("Run gate (blocked on errors; argv carries --goalnet; unset-path message)")


def two_way_net():
    doc = create_goal_net("Branch", "", "u", rng=random.Random(77))
    root = doc.add_state(None, "Root", StateKind.COMPOSITE, Point(0, 0))
    start = doc.add_state(root, "Start", StateKind.ATOMIC, Point(0, 10))
    a = doc.add_state(root, "A", StateKind.ATOMIC, Point(40, 0))
    b = doc.add_state(root, "B", StateKind.ATOMIC, Point(40, 20))
    end = doc.add_state(root, "End", StateKind.ATOMIC, Point(80, 10))
    pick = doc.add_transition(root, "Pick", TransitionKind.PROBABILISTIC, Point(20, 10))
    join = doc.add_transition(root, "Join", TransitionKind.DIRECT, Point(60, 10))
    doc.add_arc(doc.ref(start), doc.ref(pick))
    arc_a = doc.add_arc(doc.ref(pick), doc.ref(a))
    arc_b = doc.add_arc(doc.ref(pick), doc.ref(b))
    doc.update_properties(arc_a, weight=0.7)
    doc.update_properties(arc_b, weight=0.3)
    doc.add_arc(doc.ref(a), doc.ref(join))
    doc.add_arc(doc.ref(b), doc.ref(join))
    doc.add_arc(doc.ref(join), doc.ref(end))
    doc.set_composite_boundaries(root, start, end)
    doc.set_net_properties(root, start, end)
    return doc, a


def test_interpreter_determinism_and_statistics():
    doc, branch_a = two_way_net()
    registry = FunctionRegistry()

    one = interpret(doc, registry, RunConfig(seed=2024))
    two = interpret(doc, registry, RunConfig(seed=2024))
    assert one.to_jsonl() == two.to_jsonl()

    max_steps = 50
    hits = 0
    n = 10_000
    for seed in range(n):
        trace = interpret(doc, registry, RunConfig(seed=seed, max_steps=max_steps))
        assert trace.finish_reason is FinishReason.REACHED_END
        assert len(trace.transitions_fired()) <= max_steps
        if branch_a in trace.states_entered():
            hits += 1
    frequency = hits / n
    assert abs(frequency - 0.7) <= 0.02
    ok(f"Interpreter determinism and statistics (branch-A frequency {frequency:.4f})")


def test_guard_language():
    # exhaustive truth tables over <=3 boolean identifiers
    rng = random.Random(0xBEEF)
    idents = ["a", "b", "c"]
    for _ in range(400):
        expr = guard_helpers.random_bool_expr(rng, idents, 4)
        for mask in range(8):
            env = {name: bool(mask >> i & 1) for i, name in enumerate(idents)}
            assert eval_guard(expr, env) == guard_helpers.python_oracle(expr, env)

    # 1,000 random trees round-trip structurally
    rng = random.Random(0xF00D)
    for _ in range(1000):
        expr = guard_helpers.random_typed_expr(rng, 6)
        assert parse_guard(format_guard(expr)) == expr

    assert parse_guard("a || b && c") == Or(Ident("a"), And(Ident("b"), Ident("c")))
    ok("Guard language (truth tables, 1,000 round-trips, precedence)")


def test_case_study_fixtures():
    registry = FunctionRegistry()

    main_doc = sample_nets.ta_main_routine()
    assert validate(main_doc).error_count == 0
    # run under both branches: external event handling and intrinsic motivation
    for blackboard in ({"external_event": True, "satisfied": True},
                       sample_nets.TA_BLACKBOARD):
        trace = interpret(main_doc, registry,
                          RunConfig(seed=6, max_steps=200, blackboard=blackboard))
        assert trace.finish_reason is FinishReason.REACHED_END
        assert len(trace.transitions_fired()) <= 200

    affect = sample_nets.affect_subnet()
    assert validate(affect).error_count == 0
    trace = interpret(affect, registry,
                      RunConfig(seed=6, max_steps=200,
                                blackboard=sample_nets.AFFECT_BLACKBOARD))
    assert trace.finish_reason is FinishReason.REACHED_END
    assert len(trace.transitions_fired()) <= 200
    ok("Case-study fixtures (0 errors; both interpret to Finish(ReachedEnd))")


def test_telemetry_matrix(tmp_path, capsys):
    store_path = str(tmp_path / "telemetry.db")
    store = Store.open(store_path)
    collab.register_user(store, "lisiyao")
    doc, _ = collab.create_net_with_owner(store, "Session", "lisiyao")

    script = [
        {"op": "add_state", "parent": None, "name": "Root", "kind": "composite",
         "x": 0, "y": 0, "as": "root"},
        {"op": "add_state", "parent": "@root", "name": "Start", "kind": "atomic",
         "x": 0, "y": 10, "as": "start"},
        {"op": "add_state", "parent": "@root", "name": "Mid", "kind": "atomic",
         "x": 30, "y": 10, "as": "mid"},
        {"op": "add_state", "parent": "@root", "name": "End", "kind": "atomic",
         "x": 60, "y": 10, "as": "end"},
        {"op": "add_transition", "parent": "@root", "name": "Go", "kind": "direct",
         "x": 15, "y": 10, "as": "go"},
        {"op": "add_transition", "parent": "@root", "name": "Stop", "kind": "direct",
         "x": 45, "y": 10, "as": "stop"},
        {"op": "add_arc", "source": "@start", "target": "@go", "as": "a1"},
        {"op": "add_arc", "source": "@go", "target": "@mid"},
        {"op": "add_arc", "source": "@mid", "target": "@stop"},
        {"op": "add_arc", "source": "@stop", "target": "@end"},
        {"op": "set_composite_boundaries", "composite": "@root",
         "start": "@start", "end": "@end"},
        {"op": "set_net_properties", "root": "@root", "start": "@start",
         "end": "@end"},
        {"op": "add_task", "name": "March", "as": "task"},
        {"op": "add_function", "name": "Step", "binding_key": "step", "as": "fn"},
        {"op": "associate", "kind": "transition_task", "owner": "@go",
         "member": "@task", "as": "tt"},
        {"op": "associate", "kind": "task_function", "owner": "@task",
         "member": "@fn", "as": "tf"},
        {"op": "update_properties", "entity": "@a1", "set": {"priority": 1}},
        {"op": "move_entities", "ids": ["@start", "@mid"], "dx": 3, "dy": 0},
        {"op": "dissociate", "association": "@tf"},
        {"op": "remove_entities", "ids": ["@stop"]},
    ]
    assert len(script) == 20
    script_path = tmp_path / "session.json"
    script_path.write_text(json.dumps(script))
    code = cli_main(["--store", store_path, "--as", "lisiyao",
                     "edit", "--net", doc.id, str(script_path)])
    capsys.readouterr()
    assert code == 0

    entries = telemetry.query_log(store, net=doc.id)
    assert len(entries) == 20
    for entry in entries:
        assert telemetry.pair_allowed(entry.object_type, entry.action_type)

    with pytest.raises(ModelError):
        telemetry.record_action(store, telemetry.ActionLogEntry(
            telemetry.ObjectType.ARC, doc.id, "lisiyao",
            telemetry.ActionType.MOVE))
    question = telemetry.add_question(store, "Scale check?")
    for bad_score in (0, 6):
        with pytest.raises(ModelError):
            telemetry.submit_feedback(store, "lisiyao", question, bad_score)
    store.close()
    ok("Telemetry matrix (20 edits -> 20 legal rows; illegal pair and scores rejected)")
