from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goalnet.document_io import export_document
from goalnet.errors import ModelError, NotFoundError
from goalnet.model import (
    AssociationKind,
    EntityKind,
    EntityRef,
    Point,
    StateKind,
    TransitionKind,
    create_goal_net,
)

from docgen import random_document


def blank(name="Net"):
    return create_goal_net(name, "", "lisiyao")


# -- creation -------------------------------------------------------------

def test_create_goal_net():
    doc = blank("SDLC")
    assert doc.name == "SDLC"
    assert doc.created_by == "lisiyao"
    assert doc.version == 0
    assert doc.root_state_id is None and doc.start_state_id is None
    assert not doc.states and not doc.transitions


def test_create_goal_net_empty_name_rejected():
    with pytest.raises(ModelError):
        create_goal_net("", "x", "u")
    with pytest.raises(ModelError):
        create_goal_net("   ", "x", "u")


def test_distinct_documents_have_distinct_ids():
    assert blank("A").id != blank("A").id


# -- states, transitions, arcs ----------------------------------------------

def test_add_state_under_composite():
    doc = blank()
    sdlc = doc.add_state(None, "SDLC", StateKind.COMPOSITE, Point(100, 100))
    start = doc.add_state(sdlc, "Start", StateKind.ATOMIC, Point(10, 10))
    assert doc.states[start].parent_id == sdlc
    assert doc.states[start].achievement_value == 0.0
    assert doc.states[start].cost == 0.0


def test_add_state_parent_must_be_composite():
    doc = blank()
    atom = doc.add_state(None, "A", StateKind.ATOMIC, Point(0, 0))
    with pytest.raises(ModelError):
        doc.add_state(atom, "X", StateKind.ATOMIC, Point(0, 0))


def test_add_transition_parent_must_exist():
    doc = blank()
    with pytest.raises(NotFoundError):
        doc.add_transition("0" * 8, "T", TransitionKind.DIRECT, Point(0, 0))


def test_add_arc_bipartite():
    doc = blank()
    a = doc.add_state(None, "A", StateKind.ATOMIC, Point(0, 0))
    b = doc.add_state(None, "B", StateKind.ATOMIC, Point(1, 1))
    with pytest.raises(ModelError):
        doc.add_arc(doc.ref(a), doc.ref(b))
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(2, 2))
    u = doc.add_transition(None, "U", TransitionKind.DIRECT, Point(3, 3))
    with pytest.raises(ModelError):
        doc.add_arc(doc.ref(t), doc.ref(u))
    arc = doc.add_arc(doc.ref(a), doc.ref(t))
    assert doc.arcs[arc].guard is None
    assert doc.arcs[arc].weight == 1.0
    assert doc.arcs[arc].priority == 0


def test_add_arc_duplicate_rejected():
    doc = blank()
    a = doc.add_state(None, "A", StateKind.ATOMIC, Point(0, 0))
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(1, 1))
    doc.add_arc(doc.ref(t), doc.ref(a))
    with pytest.raises(ModelError):
        doc.add_arc(doc.ref(t), doc.ref(a))
    # enumeration oracle: exactly one arc exists after both calls
    assert len(doc.arcs) == 1


def test_add_arc_scope_must_match():
    doc = blank()
    comp = doc.add_state(None, "C", StateKind.COMPOSITE, Point(0, 0))
    inner = doc.add_state(comp, "I", StateKind.ATOMIC, Point(0, 0))
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(1, 1))
    with pytest.raises(ModelError):
        doc.add_arc(doc.ref(inner), doc.ref(t))


def test_self_loop_allowed():
    doc = blank()
    s = doc.add_state(None, "S", StateKind.ATOMIC, Point(0, 0))
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(1, 1))
    doc.add_arc(doc.ref(s), doc.ref(t))
    doc.add_arc(doc.ref(t), doc.ref(s))
    assert len(doc.arcs) == 2


# -- state kind conversion ----------------------------------------------------

def test_convert_atomic_to_composite():
    doc = blank()
    s = doc.add_state(None, "Design", StateKind.ATOMIC, Point(0, 0))
    doc.convert_state_kind(s, StateKind.COMPOSITE)
    assert doc.states[s].kind is StateKind.COMPOSITE
    assert doc.children_of(s) == []
    assert doc.states[s].child_start_id is None


def test_convert_composite_with_children_needs_cascade(sdlc):
    root = sdlc.root_state_id
    n_children = len(sdlc.children_of(root))
    with pytest.raises(ModelError) as err:
        sdlc.convert_state_kind(root, StateKind.ATOMIC, cascade=False)
    assert str(n_children) in str(err.value)


def test_convert_cascade_leaves_no_dangling_references(sdlc):
    root = sdlc.root_state_id
    sdlc.convert_state_kind(root, StateKind.ATOMIC, cascade=True)
    assert sdlc.states[root].kind is StateKind.ATOMIC
    referential_sweep(sdlc)
    assert len(sdlc.states) == 1
    assert not sdlc.arcs


def referential_sweep(doc):
    """Every id stored anywhere in the document must resolve."""
    for state in doc.states.values():
        if state.parent_id is not None:
            assert state.parent_id in doc.states
        for child in (state.child_start_id, state.child_end_id):
            assert child is None or child in doc.states
    for transition in doc.transitions.values():
        assert transition.parent_id is None or transition.parent_id in doc.states
    for arc in doc.arcs.values():
        for ref in (arc.source, arc.target):
            pool = doc.states if ref.kind is EntityKind.STATE else doc.transitions
            assert ref.id in pool
    for assoc in doc.all_associations():
        assert doc.kind_of(assoc.owner_id) is not None
        assert doc.kind_of(assoc.member_id) is not None
    for prop in (doc.root_state_id, doc.start_state_id, doc.end_state_id):
        assert prop is None or prop in doc.states


# -- net properties and boundaries ----------------------------------------------

def test_set_net_properties(sdlc_prefix):
    doc = sdlc_prefix
    root = next(s.id for s in doc.states.values() if s.name == "SDLC")
    start = next(s.id for s in doc.states.values() if s.name == "Start")
    end = next(s.id for s in doc.states.values() if s.name == "End")
    doc.set_net_properties(root, start, end)
    assert (doc.root_state_id, doc.start_state_id, doc.end_state_id) == (root, start, end)
    doc.set_net_properties(None, None, None)
    assert doc.root_state_id is None


def test_root_must_be_composite(sdlc_prefix):
    doc = sdlc_prefix
    start = next(s.id for s in doc.states.values() if s.name == "Start")
    with pytest.raises(ModelError):
        doc.set_net_properties(start, None, None)


def test_boundaries_must_be_direct_children():
    doc = blank()
    outer = doc.add_state(None, "Outer", StateKind.COMPOSITE, Point(0, 0))
    inner = doc.add_state(outer, "Inner", StateKind.COMPOSITE, Point(0, 0))
    grandchild = doc.add_state(inner, "G", StateKind.ATOMIC, Point(0, 0))
    child = doc.add_state(outer, "C", StateKind.ATOMIC, Point(0, 0))
    with pytest.raises(ModelError):
        doc.set_composite_boundaries(outer, grandchild, child)
    doc.set_composite_boundaries(outer, child, None)
    assert doc.states[outer].child_start_id == child
    doc.set_composite_boundaries(outer, None, None)
    assert doc.states[outer].child_start_id is None


# -- removal ----------------------------------------------------------------------

def test_remove_transition_takes_its_arcs(sdlc):
    design = next(t.id for t in sdlc.transitions.values()
                  if t.name == "Design Software")
    arcs_before = len(sdlc.arcs)
    touching = len(sdlc.arcs_of(design))
    report = sdlc.remove_entities({design})
    assert report.transitions == 1
    assert report.arcs == touching == 2
    assert len(sdlc.arcs) == arcs_before - touching
    assert len(sdlc.states) == 5  # states intact
    referential_sweep(sdlc)


def test_remove_empty_set_is_identity(sdlc):
    before = export_document(sdlc)
    report = sdlc.remove_entities(set())
    assert report.total == 0
    assert export_document(sdlc) == before


def test_remove_composite_cascades(sdlc):
    root = sdlc.root_state_id
    report = sdlc.remove_entities({root})
    assert report.states == 5
    assert report.transitions == 3
    assert report.arcs == 6
    referential_sweep(sdlc)
    assert sdlc.root_state_id is None  # property cleared, not dangling
    assert sdlc.start_state_id is None


def test_remove_unknown_id_rejects_all(sdlc):
    design = next(t.id for t in sdlc.transitions.values()
                  if t.name == "Design Software")
    before = export_document(sdlc)
    with pytest.raises(NotFoundError):
        sdlc.remove_entities({design, "not-an-id"})
    assert export_document(sdlc) == before


def test_remove_function_drops_associations(sdlc):
    fn = next(f.id for f in sdlc.functions.values() if f.name == "Draw UML")
    task = next(t.id for t in sdlc.tasks.values() if t.name == "Do Design")
    report = sdlc.remove_entities({fn})
    assert report.functions == 1 and report.associations == 1
    remaining = sdlc.associations_of(AssociationKind.TASK_FUNCTION, task)
    assert [a.order_index for a in remaining] == [0]


# -- movement -----------------------------------------------------------------------

def test_move_translates(sdlc):
    start = next(s for s in sdlc.states.values() if s.name == "Start")
    x0 = start.position.x
    sdlc.move_entities({start.id}, Point(5, 0))
    assert start.position.x == x0 + 5


def test_move_rejects_non_nodes(sdlc):
    arc_id = next(iter(sdlc.arcs))
    before = export_document(sdlc)
    with pytest.raises(ModelError):
        sdlc.move_entities({arc_id}, Point(1, 1))
    assert export_document(sdlc) == before


@given(dx=st.floats(-1e6, 1e6), dy=st.floats(-1e6, 1e6))
@settings(max_examples=30, deadline=None)
def test_move_preserves_pairwise_distances(dx, dy):
    doc = __import__("goalnet.sample_nets", fromlist=["sdlc_document"]).sdlc_document()
    nodes = sorted(list(doc.states) + list(doc.transitions))

    def distances():
        pos = {n: (doc.states[n].position if n in doc.states
                   else doc.transitions[n].position) for n in nodes}
        return [math.dist((pos[a].x, pos[a].y), (pos[b].x, pos[b].y))
                for a in nodes for b in nodes]

    before = distances()
    doc.move_entities(set(nodes), Point(dx, dy))
    after = distances()
    assert all(math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-6)
               for a, b in zip(before, after))


# -- functions, tasks, associations ---------------------------------------------------

def test_add_function_and_task():
    doc = blank()
    task = doc.add_task("Do Design", "")
    fn = doc.add_function("GenerateEmotion", "", "emotion.v1")
    assert doc.functions[fn].binding_key == "emotion.v1"
    assert doc.tasks[task].name == "Do Design"
    with pytest.raises(ModelError):
        doc.add_function("", "", "")
    with pytest.raises(ModelError):
        doc.add_task(" ", "")


def test_associate_kind_checking():
    doc = blank()
    s = doc.add_state(None, "S", StateKind.ATOMIC, Point(0, 0))
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(0, 0))
    task = doc.add_task("K", "")
    fn = doc.add_function("F", "", "")
    doc.associate(AssociationKind.TRANSITION_TASK, t, task)
    with pytest.raises(ModelError):
        doc.associate(AssociationKind.TRANSITION_TASK, s, task)
    with pytest.raises(ModelError):
        doc.associate(AssociationKind.STATE_FUNCTION, s, task)
    assoc = doc.associate(AssociationKind.STATE_FUNCTION, s, fn)
    assert any(a.id == assoc for a in doc.all_associations())


def test_associate_duplicate_rejected():
    doc = blank()
    t = doc.add_transition(None, "T", TransitionKind.DIRECT, Point(0, 0))
    task = doc.add_task("K", "")
    doc.associate(AssociationKind.TRANSITION_TASK, t, task)
    with pytest.raises(ModelError):
        doc.associate(AssociationKind.TRANSITION_TASK, t, task)


def test_dissociate_compacts_order():
    doc = blank()
    task = doc.add_task("K", "")
    fns = [doc.add_function(f"F{i}", "", "") for i in range(3)]
    ids = [doc.associate(AssociationKind.TASK_FUNCTION, task, fn) for fn in fns]
    doc.dissociate(ids[1])
    remaining = doc.associations_of(AssociationKind.TASK_FUNCTION, task)
    assert [a.order_index for a in remaining] == [0, 1]
    assert [a.member_id for a in remaining] == [fns[0], fns[2]]


@given(st.lists(st.sampled_from([0, 1, 2, 3, 4]), min_size=0, max_size=12))
@settings(max_examples=50, deadline=None)
def test_association_order_is_permutation(removals):
    doc = blank()
    task = doc.add_task("K", "")
    fns = [doc.add_function(f"F{i}", "", "") for i in range(5)]
    ids = [doc.associate(AssociationKind.TASK_FUNCTION, task, fn) for fn in fns]
    alive = set(ids)
    for index in removals:
        target = ids[index]
        if target in alive:
            doc.dissociate(target)
            alive.discard(target)
        rows = doc.associations_of(AssociationKind.TASK_FUNCTION, task)
        assert sorted(a.order_index for a in rows) == list(range(len(rows)))


# -- update_properties -----------------------------------------------------------------

def test_update_arc_guard_weight_priority(sdlc):
    arc_id = next(iter(sdlc.arcs))
    sdlc.update_properties(arc_id, guard="x < 3", weight=2.5, priority=1)
    arc = sdlc.arcs[arc_id]
    assert (arc.guard, arc.weight, arc.priority) == ("x < 3", 2.5, 1)
    with pytest.raises(Exception):
        sdlc.update_properties(arc_id, guard="a &&")
    with pytest.raises(ModelError):
        sdlc.update_properties(arc_id, weight=0)
    with pytest.raises(ModelError):
        sdlc.update_properties(arc_id, achievement_value=3)


def test_update_function_name_nonempty(sdlc):
    fn = next(iter(sdlc.functions))
    with pytest.raises(ModelError):
        sdlc.update_properties(fn, name="")
    sdlc.update_properties(fn, name="Renamed", binding_key="new.key")
    assert sdlc.functions[fn].name == "Renamed"


# -- queries ------------------------------------------------------------------------------

def test_queries_on_fixture(sdlc):
    design = next(t.id for t in sdlc.transitions.values()
                  if t.name == "Design Software")
    inputs = sdlc.inputs_of(design)
    assert [s.name for s in inputs] == ["Start"]
    outputs = sdlc.outputs_of(design)
    assert [s.name for s in outputs] == ["Software Designed"]
    root = sdlc.root_state_id
    children = sdlc.children_of(root)
    assert len(children) == 7
    names = [c.name for c in children]
    assert names == sorted(names)


def test_children_of_atomic_rejected(sdlc):
    start = next(s.id for s in sdlc.states.values() if s.name == "Start")
    with pytest.raises(ModelError):
        sdlc.children_of(start)


def test_arcs_of_isolated_state():
    doc = blank()
    s = doc.add_state(None, "Lonely", StateKind.ATOMIC, Point(0, 0))
    assert doc.arcs_of(s) == []
    with pytest.raises(NotFoundError):
        doc.arcs_of("missing")


def test_functions_of_and_tasks_of(sdlc):
    task = next(t.id for t in sdlc.tasks.values() if t.name == "Do Design")
    assert [f.name for f in sdlc.functions_of(task)] == ["Draw UML", "Review Design"]
    design = next(t.id for t in sdlc.transitions.values()
                  if t.name == "Design Software")
    assert [t.name for t in sdlc.tasks_of(design)] == ["Do Design"]


# -- whole-document invariants ---------------------------------------------------------

def test_random_documents_keep_invariants():
    rng = random.Random(20240817)
    for _ in range(60):
        doc = random_document(rng)
        referential_sweep(doc)
        # bipartite arcs
        for arc in doc.arcs.values():
            assert {arc.source.kind, arc.target.kind} == {EntityKind.STATE,
                                                          EntityKind.TRANSITION}
        # hierarchy is a forest
        for state in doc.states.values():
            seen = set()
            cursor = state.parent_id
            while cursor is not None:
                assert cursor not in seen
                seen.add(cursor)
                cursor = doc.states[cursor].parent_id
        # association order contiguous
        for kind in AssociationKind:
            owners = {a.owner_id for a in doc._assoc_list(kind)}
            for owner in owners:
                rows = doc.associations_of(kind, owner)
                assert [a.order_index for a in rows] == list(range(len(rows)))


def test_rejected_operations_leave_document_untouched(sdlc):
    before = export_document(sdlc)
    cases = [
        lambda: sdlc.add_state("missing", "X", StateKind.ATOMIC, Point(0, 0)),
        lambda: sdlc.add_arc(EntityRef(EntityKind.STATE, next(iter(sdlc.states))),
                             EntityRef(EntityKind.STATE, sdlc.root_state_id)),
        lambda: sdlc.convert_state_kind(sdlc.root_state_id, StateKind.ATOMIC),
        lambda: sdlc.set_net_properties(next(s.id for s in sdlc.states.values()
                                             if s.name == "Start"), None, None),
        lambda: sdlc.remove_entities({"nope"}),
        lambda: sdlc.move_entities({next(iter(sdlc.arcs))}, Point(1, 1)),
        lambda: sdlc.update_properties(next(iter(sdlc.functions)), name=""),
    ]
    for case in cases:
        with pytest.raises(Exception):
            case()
        assert export_document(sdlc) == before
