"""End-to-end walkthrough of the design workflow on a throwaway store.

Creates the users and the SDLC net, validates the raw drawing (four
errors), fixes the net properties, shares the net read-only, clones the
design task into a second net, and exports both SVG and the canonical
document file.

Usage: python scripts/demo_sdlc_workflow.py [output-dir]
"""
from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from goalnet import collab, sample_nets
from goalnet.document_io import export_document
from goalnet.persistence import Store, load, save
from goalnet.svg import export_svg
from goalnet.validation import validate


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    out_dir.mkdir(parents=True, exist_ok=True)
    store = Store.open(str(out_dir / "demo.db"))

    collab.register_user(store, "lisiyao", "Li Siyao", "25-34", "msc")
    collab.register_user(store, "yuhan", "Yu Han", "25-34", "phd")

    doc = sample_nets.sdlc_document(with_properties=False)
    collab.adopt_net(store, doc, "lisiyao")
    print(f"created goal net {doc.name} ({doc.id})")

    report = validate(doc)
    print(f"\nvalidation before configuring properties: {report.error_count} errors")
    for diag in report.diagnostics:
        if diag.severity.value == "error":
            print(f"  [{diag.rule.value}] {diag.message}")

    names = {s.name: s.id for s in doc.states.values()}
    doc.set_net_properties(names["SDLC"], names["Start"], names["End"])
    save(store, doc, "lisiyao")
    print(f"\nafter setting root/start/end: {validate(doc).error_count} errors, "
          f"{validate(doc).warning_count} warnings")

    collab.grant_access(store, "lisiyao", "yuhan", doc.id, collab.AccessLevel.READ)
    print(f"granted yuhan read access; yuhan can open: "
          f"{collab.check_access(store, 'yuhan', doc.id, collab.AccessLevel.READ)}")

    agile, _ = collab.create_net_with_owner(store, "Agile SDLC", "lisiyao")
    task_id = next(t.id for t in doc.tasks.values() if t.name == "Do Design")
    mapping = collab.clone_task(store, "lisiyao", task_id, doc.id, agile.id)
    print(f"cloned task 'Do Design' into {agile.name}: "
          f"{len(mapping)} new rows (task + functions + associations)")

    svg_path = out_dir / "sdlc.svg"
    svg_path.write_bytes(export_svg(load(store, doc.id)))
    doc_path = out_dir / "sdlc.gnet.json"
    doc_path.write_bytes(export_document(load(store, doc.id)))
    print(f"\nexports written to {svg_path} and {doc_path}")
    store.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
