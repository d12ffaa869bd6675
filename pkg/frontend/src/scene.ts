/**
 * Pure projection of a document plus view state onto render primitives.
 * Atomic states become circles, composites double circles, transitions
 * rectangles, arcs arrows, and composite boundaries dashed arrows —
 * the same geometry the server draws in its SVG export.
 */
import type { EntityRef, GoalNetModel, PointData } from "./document.js";

export type Tool =
  | "select" | "atomic" | "composite"
  | "transition-direct" | "transition-conditional" | "transition-probabilistic"
  | "arc" | "move" | "delete";

export type NodeShape = "circle" | "double-circle" | "rectangle";
export type EdgeShape = "arrow" | "dashed-arrow";

export interface SceneNode {
  ref: EntityRef;
  shape: NodeShape;
  x: number;
  y: number;
  label: string;
  selected: boolean;
  unsaved: boolean;
}

export interface SceneEdge {
  ref: EntityRef | null; // null for boundary markers (no standalone entity)
  shape: EdgeShape;
  key: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface CanvasScene {
  nodes: SceneNode[];
  edges: SceneEdge[];
}

export const STATE_RADIUS = 18;
export const COMPOSITE_OUTER = 23;
export const TRANSITION_W = 42;
export const TRANSITION_H = 26;
export const MARGIN = 60;

function positionOf(model: GoalNetModel, id: string): PointData {
  const node = model.states.get(id) ?? model.transitions.get(id);
  return node ? node.position : { x: 0, y: 0 };
}

export function projectScene(model: GoalNetModel,
                             selection: ReadonlySet<string>): CanvasScene {
  const byId = <T extends { id: string }>(items: Iterable<T>): T[] =>
    [...items].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));

  const nodes: SceneNode[] = [];
  for (const state of byId(model.states.values())) {
    nodes.push({
      ref: { kind: "state", id: state.id },
      shape: state.kind === "composite" ? "double-circle" : "circle",
      x: state.position.x,
      y: state.position.y,
      label: state.name,
      selected: selection.has(state.id),
      unsaved: model.unsaved.has(state.id),
    });
  }
  for (const transition of byId(model.transitions.values())) {
    nodes.push({
      ref: { kind: "transition", id: transition.id },
      shape: "rectangle",
      x: transition.position.x,
      y: transition.position.y,
      label: transition.name,
      selected: selection.has(transition.id),
      unsaved: model.unsaved.has(transition.id),
    });
  }

  const edges: SceneEdge[] = [];
  for (const arc of byId(model.arcs.values())) {
    const from = positionOf(model, arc.source.id);
    const to = positionOf(model, arc.target.id);
    edges.push({
      ref: { kind: "arc", id: arc.id },
      shape: "arrow",
      key: arc.id,
      x1: from.x, y1: from.y, x2: to.x, y2: to.y,
    });
  }
  for (const state of byId(model.states.values())) {
    if (state.kind !== "composite") continue;
    if (state.child_start_id && model.states.has(state.child_start_id)) {
      const to = positionOf(model, state.child_start_id);
      edges.push({
        ref: null, shape: "dashed-arrow",
        key: `${state.id}:start`,
        x1: state.position.x, y1: state.position.y, x2: to.x, y2: to.y,
      });
    }
    if (state.child_end_id && model.states.has(state.child_end_id)) {
      const from = positionOf(model, state.child_end_id);
      edges.push({
        ref: null, shape: "dashed-arrow",
        key: `${state.id}:end`,
        x1: from.x, y1: from.y, x2: state.position.x, y2: state.position.y,
      });
    }
  }
  return { nodes, edges };
}

export interface SceneBounds {
  minX: number;
  minY: number;
  width: number;
  height: number;
}

/** Bounding box of all nodes plus the margin; a fixed square when empty. */
export function sceneBounds(scene: CanvasScene): SceneBounds {
  if (!scene.nodes.length) {
    return { minX: 0, minY: 0, width: 100, height: 100 };
  }
  const xs = scene.nodes.map((n) => n.x);
  const ys = scene.nodes.map((n) => n.y);
  const minX = Math.min(...xs) - MARGIN;
  const minY = Math.min(...ys) - MARGIN;
  const width = Math.max(...xs) + MARGIN - minX;
  const height = Math.max(...ys) + MARGIN - minY;
  return { minX, minY, width, height };
}
