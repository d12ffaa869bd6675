from __future__ import annotations

import random

import pytest

from goalnet import collab, sample_nets
from goalnet.document_io import export_document, import_document
from goalnet.errors import AccessDeniedError, NotFoundError, VersionConflictError
from goalnet.ids import is_entity_id, new_uuid
from goalnet.persistence import (
    Store,
    dump_documents,
    get_compiler_path,
    list_nets,
    load,
    merge_stores,
    restore_document,
    save,
    set_compiler_path,
)


def test_first_save_yields_version_one(store):
    doc, _ = collab.create_net_with_owner(store, "SDLC", "lisiyao")
    assert save(store, doc, "lisiyao") == 1
    assert doc.version == 1


def test_save_requires_write_access(store):
    doc, _ = collab.create_net_with_owner(store, "SDLC", "lisiyao")
    save(store, doc, "lisiyao")
    collab.grant_access(store, "lisiyao", "yuhan", doc.id, collab.AccessLevel.READ)
    snapshot = store.dump_rows()
    loaded = load(store, doc.id)
    loaded.add_task("T", "")  # local edit is fine
    with pytest.raises(AccessDeniedError):
        save(store, loaded, "yuhan")
    assert store.dump_rows() == snapshot  # store byte-identical


def test_concurrent_saves_conflict(store):
    doc, _ = collab.create_net_with_owner(store, "SDLC", "lisiyao")
    save(store, doc, "lisiyao")
    first = load(store, doc.id)
    second = load(store, doc.id)
    first.add_task("A", "")
    second.add_task("B", "")
    assert save(store, first, "lisiyao") == 2
    snapshot = store.dump_rows()
    with pytest.raises(VersionConflictError):
        save(store, second, "lisiyao")
    assert store.dump_rows() == snapshot


def test_load_round_trips_fixture(store, sdlc):
    collab.adopt_net(store, sdlc, "lisiyao")
    assert export_document(load(store, sdlc.id)) == export_document(sdlc)


def test_load_unknown_net(store):
    with pytest.raises(NotFoundError):
        load(store, new_uuid())


def test_list_nets_by_grant(store, sdlc):
    collab.adopt_net(store, sdlc, "lisiyao")
    assert [n.name for n in list_nets(store, "lisiyao")] == ["SDLC"]
    assert list_nets(store, "yuhan") == []
    collab.grant_access(store, "lisiyao", "yuhan", sdlc.id, collab.AccessLevel.READ)
    summaries = list_nets(store, "yuhan")
    assert [(n.name, n.level) for n in summaries] == [("SDLC", "read")]
    assert list_nets(store, "chen") == []


def test_compiler_path_persists(store, sdlc):
    collab.adopt_net(store, sdlc, "lisiyao")
    assert get_compiler_path(store, sdlc.id) is None
    set_compiler_path(store, sdlc.id, "/usr/bin/true")
    assert get_compiler_path(store, sdlc.id) == "/usr/bin/true"


def test_new_uuid_shape_and_uniqueness():
    seen = set()
    for _ in range(100_000):
        value = new_uuid()
        seen.add(value)
    assert len(seen) == 100_000
    sample = next(iter(seen))
    assert is_entity_id(sample)
    for value in list(seen)[:100]:
        assert value[14] == "4"
        assert value[19] in "89ab"


def test_seeded_uuid_stream_is_reproducible():
    a = [new_uuid(random.Random(5)) for _ in range(3)]
    b = [new_uuid(random.Random(5)) for _ in range(3)]
    assert a[0] == b[0] and is_entity_id(a[0])


def test_dump_and_restore(store, tmp_path):
    sdlc = sample_nets.sdlc_document()
    affect = sample_nets.affect_subnet()
    collab.adopt_net(store, sdlc, "lisiyao")
    collab.adopt_net(store, affect, "lisiyao")
    dumped = dump_documents(store)
    assert set(dumped) == {sdlc.id, affect.id}

    other = Store.in_memory()
    for data in dumped.values():
        restore_document(other, data)
    assert dump_documents(other) == dumped


def test_merge_reports_user_conflicts_only(store):
    other = Store.in_memory()
    collab.register_user(other, "lisiyao", "Different Person")
    collab.register_user(other, "zhang")
    doc, _ = collab.create_net_with_owner(other, "Other Net", "zhang")
    save(other, doc, "zhang")

    report = merge_stores(store, other)
    assert report.user_conflicts == ["lisiyao"]
    assert report.duplicate_ids == []
    assert report.merged_nets == 1
    # destination keeps its own user row
    row = store.one("SELECT display_name FROM user WHERE login = 'lisiyao'")
    assert row["display_name"] == ""
    assert export_document(load(store, doc.id)) == export_document(doc)


def test_merge_is_idempotent_on_duplicates(store, sdlc):
    collab.adopt_net(store, sdlc, "lisiyao")
    other = Store.in_memory()
    collab.register_user(other, "lisiyao")
    collab.adopt_net(other, import_document(export_document(sdlc)), "lisiyao")
    report = merge_stores(store, other)
    assert sdlc.id in report.duplicate_ids
    assert report.merged_nets == 0
