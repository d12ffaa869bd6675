"""Deterministic SVG rendering of a Goal Net document.

Atomic states are green circles, composites double-bordered circles,
transitions rectangles, arcs arrows, and composite start/end boundaries
dashed arrows. Output bytes are a pure function of document content.
"""
from __future__ import annotations

from .model import GoalNetDocument, Point, StateKind

STATE_RADIUS = 18.0
COMPOSITE_OUTER = 23.0
TRANSITION_W = 42.0
TRANSITION_H = 26.0
MARGIN = 60.0


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _position_of(doc: GoalNetDocument, entity_id: str) -> Point:
    if entity_id in doc.states:
        return doc.states[entity_id].position
    return doc.transitions[entity_id].position


def export_svg(doc: GoalNetDocument) -> bytes:
    nodes = list(doc.states.values()) + list(doc.transitions.values())
    if nodes:
        xs = [n.position.x for n in nodes]
        ys = [n.position.y for n in nodes]
        min_x, max_x = min(xs) - MARGIN, max(xs) + MARGIN
        min_y, max_y = min(ys) - MARGIN, max(ys) + MARGIN
    else:
        min_x = min_y = 0.0
        max_x = max_y = 100.0

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(min_x)} {_fmt(min_y)} {_fmt(max_x - min_x)} {_fmt(max_y - min_y)}">',
    ]
    has_edges = bool(doc.arcs) or any(
        s.child_start_id or s.child_end_id for s in doc.states.values())
    if has_edges:
        lines.append(
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
            'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
            '<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>')

    for arc in sorted(doc.arcs.values(), key=lambda a: a.id):
        src = _position_of(doc, arc.source.id)
        dst = _position_of(doc, arc.target.id)
        lines.append(
            f'<g class="arc" data-id="{arc.id}">'
            f'<line x1="{_fmt(src.x)}" y1="{_fmt(src.y)}" '
            f'x2="{_fmt(dst.x)}" y2="{_fmt(dst.y)}" '
            'stroke="black" marker-end="url(#arrow)"/></g>')

    for state in sorted(doc.states.values(), key=lambda s: s.id):
        if state.kind is not StateKind.COMPOSITE:
            continue
        for child_id, reversed_ in ((state.child_start_id, False),
                                    (state.child_end_id, True)):
            if child_id is None or child_id not in doc.states:
                continue
            a = state.position if not reversed_ else doc.states[child_id].position
            b = doc.states[child_id].position if not reversed_ else state.position
            lines.append(
                f'<g class="boundary" data-id="{state.id}:{child_id}">'
                f'<line x1="{_fmt(a.x)}" y1="{_fmt(a.y)}" '
                f'x2="{_fmt(b.x)}" y2="{_fmt(b.y)}" '
                'stroke="black" stroke-dasharray="6 4" marker-end="url(#arrow)"/></g>')

    for state in sorted(doc.states.values(), key=lambda s: s.id):
        p = state.position
        parts = [f'<g class="state {state.kind.value}" data-id="{state.id}">']
        if state.kind is StateKind.COMPOSITE:
            parts.append(
                f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" r="{_fmt(COMPOSITE_OUTER)}" '
                'fill="none" stroke="darkgreen"/>')
        parts.append(
            f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" r="{_fmt(STATE_RADIUS)}" '
            'fill="palegreen" stroke="darkgreen"/>')
        parts.append(
            f'<text x="{_fmt(p.x)}" y="{_fmt(p.y + STATE_RADIUS + 14)}" '
            f'text-anchor="middle" font-size="11">{_esc(state.name)}</text></g>')
        lines.append("".join(parts))

    for transition in sorted(doc.transitions.values(), key=lambda t: t.id):
        p = transition.position
        lines.append(
            f'<g class="transition {transition.kind.value}" data-id="{transition.id}">'
            f'<rect x="{_fmt(p.x - TRANSITION_W / 2)}" y="{_fmt(p.y - TRANSITION_H / 2)}" '
            f'width="{_fmt(TRANSITION_W)}" height="{_fmt(TRANSITION_H)}" '
            'fill="white" stroke="black"/>'
            f'<text x="{_fmt(p.x)}" y="{_fmt(p.y + TRANSITION_H / 2 + 14)}" '
            f'text-anchor="middle" font-size="11">{_esc(transition.name)}</text></g>')

    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")
