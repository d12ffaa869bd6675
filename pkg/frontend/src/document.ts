/**
 * Client-side Goal Net document: the `.gnet.json` wire types plus the
 * editing operations the canvas needs. All durable state flows through
 * the API; this model only buffers local edits between loads and saves.
 */

export type EntityKind =
  | "goal_net" | "state" | "transition" | "arc" | "function" | "task"
  | "association";
export type StateKind = "atomic" | "composite";
export type TransitionKind = "direct" | "conditional" | "probabilistic";
export type AssociationKind = "state_function" | "transition_task" | "task_function";

export interface EntityRef { kind: EntityKind; id: string }
export interface PointData { x: number; y: number }

export interface StateData {
  id: string;
  name: string;
  description: string;
  kind: StateKind;
  achievement_value: number;
  cost: number;
  parent_id: string | null;
  child_start_id: string | null;
  child_end_id: string | null;
  position: PointData;
}

export interface TransitionData {
  id: string;
  name: string;
  description: string;
  kind: TransitionKind;
  parent_id: string | null;
  position: PointData;
}

export interface ArcData {
  id: string;
  name: string;
  description: string;
  source: EntityRef;
  target: EntityRef;
  guard: string | null;
  weight: number;
  priority: number;
}

export interface FunctionData {
  id: string;
  name: string;
  description: string;
  binding_key: string;
}

export interface TaskData { id: string; name: string; description: string }

export interface AssociationData {
  id: string;
  kind: AssociationKind;
  owner_id: string;
  member_id: string;
  order_index: number;
}

export interface NetProperties {
  id: string;
  name: string;
  description: string;
  created_by: string;
  version: number;
  root_state_id: string | null;
  start_state_id: string | null;
  end_state_id: string | null;
}

export interface DocumentFile {
  meta: { format: string };
  net: NetProperties;
  states: StateData[];
  transitions: TransitionData[];
  arcs: ArcData[];
  functions: FunctionData[];
  tasks: TaskData[];
  associations: AssociationData[];
}

export function newUuid(): string {
  const crypto = globalThis.crypto;
  if (crypto && "randomUUID" in crypto) return crypto.randomUUID();
  // RFC 4122 v4 fallback for environments without crypto.randomUUID.
  let out = "";
  for (let i = 0; i < 36; i++) {
    if (i === 8 || i === 13 || i === 18 || i === 23) out += "-";
    else if (i === 14) out += "4";
    else if (i === 19) out += ((Math.random() * 4) | 8).toString(16);
    else out += ((Math.random() * 16) | 0).toString(16);
  }
  return out;
}

/** Mutable in-memory document with the editing operations the UI issues. */
export class GoalNetModel {
  net: NetProperties;
  states = new Map<string, StateData>();
  transitions = new Map<string, TransitionData>();
  arcs = new Map<string, ArcData>();
  functions = new Map<string, FunctionData>();
  tasks = new Map<string, TaskData>();
  associations = new Map<string, AssociationData>();
  /** Ids touched since the last successful save (shown as "unsaved"). */
  unsaved = new Set<string>();

  constructor(net: NetProperties) {
    this.net = net;
  }

  static fromFile(file: DocumentFile): GoalNetModel {
    const model = new GoalNetModel({ ...file.net });
    for (const s of file.states) model.states.set(s.id, { ...s, position: { ...s.position } });
    for (const t of file.transitions) model.transitions.set(t.id, { ...t, position: { ...t.position } });
    for (const a of file.arcs) model.arcs.set(a.id, { ...a, source: { ...a.source }, target: { ...a.target } });
    for (const f of file.functions) model.functions.set(f.id, { ...f });
    for (const k of file.tasks) model.tasks.set(k.id, { ...k });
    for (const a of file.associations) model.associations.set(a.id, { ...a });
    return model;
  }

  toFile(): DocumentFile {
    const byId = <T extends { id: string }>(items: Iterable<T>): T[] =>
      [...items].sort((x, y) => (x.id < y.id ? -1 : x.id > y.id ? 1 : 0));
    return {
      meta: { format: "goalnet/1" },
      net: { ...this.net },
      states: byId(this.states.values()),
      transitions: byId(this.transitions.values()),
      arcs: byId(this.arcs.values()),
      functions: byId(this.functions.values()),
      tasks: byId(this.tasks.values()),
      associations: byId(this.associations.values()),
    };
  }

  kindOf(id: string): EntityKind | null {
    if (id === this.net.id) return "goal_net";
    if (this.states.has(id)) return "state";
    if (this.transitions.has(id)) return "transition";
    if (this.arcs.has(id)) return "arc";
    if (this.functions.has(id)) return "function";
    if (this.tasks.has(id)) return "task";
    if (this.associations.has(id)) return "association";
    return null;
  }

  nameOf(id: string): string {
    if (id === this.net.id) return this.net.name;
    const entity = this.states.get(id) ?? this.transitions.get(id)
      ?? this.arcs.get(id) ?? this.functions.get(id) ?? this.tasks.get(id);
    return entity ? entity.name : "";
  }

  private touch(id: string): void {
    this.unsaved.add(id);
  }

  markSaved(): void {
    this.unsaved.clear();
  }

  addState(parentId: string | null, name: string, kind: StateKind,
           position: PointData): string {
    if (parentId !== null && this.states.get(parentId)?.kind !== "composite") {
      throw new Error("parent must be an existing composite state");
    }
    const id = newUuid();
    this.states.set(id, {
      id, name, description: "", kind, achievement_value: 0, cost: 0,
      parent_id: parentId, child_start_id: null, child_end_id: null,
      position: { ...position },
    });
    this.touch(id);
    return id;
  }

  addTransition(parentId: string | null, name: string, kind: TransitionKind,
                position: PointData): string {
    if (parentId !== null && this.states.get(parentId)?.kind !== "composite") {
      throw new Error("parent must be an existing composite state");
    }
    const id = newUuid();
    this.transitions.set(id, {
      id, name, description: "", kind, parent_id: parentId,
      position: { ...position },
    });
    this.touch(id);
    return id;
  }

  addArc(sourceId: string, targetId: string): string {
    const kinds = [this.kindOf(sourceId), this.kindOf(targetId)];
    if (!((kinds[0] === "state" && kinds[1] === "transition")
        || (kinds[0] === "transition" && kinds[1] === "state"))) {
      throw new Error("arcs connect exactly one state and one transition");
    }
    const scopeOf = (id: string) =>
      this.states.get(id)?.parent_id ?? this.transitions.get(id)?.parent_id ?? null;
    if (scopeOf(sourceId) !== scopeOf(targetId)) {
      throw new Error("arc endpoints must share the same composite scope");
    }
    for (const arc of this.arcs.values()) {
      if (arc.source.id === sourceId && arc.target.id === targetId) {
        throw new Error("identical arc already exists");
      }
    }
    const id = newUuid();
    this.arcs.set(id, {
      id, name: "", description: "",
      source: { kind: this.kindOf(sourceId) as EntityKind, id: sourceId },
      target: { kind: this.kindOf(targetId) as EntityKind, id: targetId },
      guard: null, weight: 1, priority: 0,
    });
    this.touch(id);
    return id;
  }

  /** Translate a whole selection in one operation. */
  moveEntities(ids: Set<string>, dx: number, dy: number): void {
    const nodes: Array<StateData | TransitionData> = [];
    for (const id of ids) {
      const node = this.states.get(id) ?? this.transitions.get(id);
      if (!node) throw new Error(`${id} is not movable`);
      nodes.push(node);
    }
    for (const node of nodes) {
      node.position = { x: node.position.x + dx, y: node.position.y + dy };
      this.touch(node.id);
    }
  }

  private descendants(stateId: string): Set<string> {
    const out = new Set<string>();
    const frontier = [stateId];
    while (frontier.length) {
      const current = frontier.pop()!;
      for (const s of this.states.values()) {
        if (s.parent_id === current && !out.has(s.id)) {
          out.add(s.id);
          frontier.push(s.id);
        }
      }
      for (const t of this.transitions.values()) {
        if (t.parent_id === current) out.add(t.id);
      }
    }
    return out;
  }

  removeEntities(ids: Set<string>): void {
    const doomed = new Set(ids);
    for (const id of ids) {
      if (this.states.get(id)?.kind === "composite") {
        for (const d of this.descendants(id)) doomed.add(d);
      }
    }
    for (const arc of this.arcs.values()) {
      if (doomed.has(arc.source.id) || doomed.has(arc.target.id)) doomed.add(arc.id);
    }
    for (const assoc of this.associations.values()) {
      if (doomed.has(assoc.owner_id) || doomed.has(assoc.member_id)) doomed.add(assoc.id);
    }
    const owners = new Set<string>();
    for (const id of doomed) {
      const assoc = this.associations.get(id);
      if (assoc) owners.add(assoc.kind + ":" + assoc.owner_id);
      this.states.delete(id);
      this.transitions.delete(id);
      this.arcs.delete(id);
      this.functions.delete(id);
      this.tasks.delete(id);
      this.associations.delete(id);
      this.unsaved.delete(id);
    }
    for (const key of owners) this.compactOrder(key.split(":")[0] as AssociationKind,
                                                key.slice(key.indexOf(":") + 1));
    if (this.net.root_state_id && doomed.has(this.net.root_state_id)) this.net.root_state_id = null;
    if (this.net.start_state_id && doomed.has(this.net.start_state_id)) this.net.start_state_id = null;
    if (this.net.end_state_id && doomed.has(this.net.end_state_id)) this.net.end_state_id = null;
    for (const s of this.states.values()) {
      if (s.child_start_id && doomed.has(s.child_start_id)) s.child_start_id = null;
      if (s.child_end_id && doomed.has(s.child_end_id)) s.child_end_id = null;
    }
    this.touch(this.net.id);
  }

  setNetProperties(root: string | null, start: string | null, end: string | null): void {
    if (root !== null && this.states.get(root)?.kind !== "composite") {
      throw new Error("root state must be a composite state");
    }
    for (const id of [start, end]) {
      if (id !== null && !this.states.has(id)) throw new Error("unknown state");
    }
    this.net.root_state_id = root;
    this.net.start_state_id = start;
    this.net.end_state_id = end;
    this.touch(this.net.id);
  }

  associationsOf(kind: AssociationKind, ownerId: string): AssociationData[] {
    return [...this.associations.values()]
      .filter((a) => a.kind === kind && a.owner_id === ownerId)
      .sort((a, b) => a.order_index - b.order_index);
  }

  associate(kind: AssociationKind, ownerId: string, memberId: string): string {
    const existing = this.associationsOf(kind, ownerId);
    if (existing.some((a) => a.member_id === memberId)) {
      throw new Error("association already exists");
    }
    const id = newUuid();
    this.associations.set(id, {
      id, kind, owner_id: ownerId, member_id: memberId,
      order_index: existing.length,
    });
    this.touch(id);
    return id;
  }

  dissociate(associationId: string): void {
    const assoc = this.associations.get(associationId);
    if (!assoc) throw new Error("unknown association");
    this.associations.delete(associationId);
    this.compactOrder(assoc.kind, assoc.owner_id);
    this.touch(this.net.id);
  }

  private compactOrder(kind: AssociationKind, ownerId: string): void {
    this.associationsOf(kind, ownerId).forEach((assoc, i) => {
      assoc.order_index = i;
    });
  }

  /** Swap an association one slot up (-1) or down (+1) in its owner's list. */
  reorderAssociation(associationId: string, delta: -1 | 1): void {
    const assoc = this.associations.get(associationId);
    if (!assoc) throw new Error("unknown association");
    const siblings = this.associationsOf(assoc.kind, assoc.owner_id);
    const index = siblings.findIndex((a) => a.id === associationId);
    const other = siblings[index + delta];
    if (!other) return;
    [assoc.order_index, other.order_index] = [other.order_index, assoc.order_index];
    this.touch(assoc.id);
    this.touch(other.id);
  }

  updateProperties(id: string, changes: Record<string, unknown>): void {
    const entity: object | undefined =
      id === this.net.id ? this.net
        : this.states.get(id) ?? this.transitions.get(id) ?? this.arcs.get(id)
          ?? this.functions.get(id) ?? this.tasks.get(id);
    if (!entity) throw new Error("unknown entity");
    Object.assign(entity, changes);
    this.touch(id);
  }
}
