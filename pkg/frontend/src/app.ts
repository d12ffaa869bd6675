/**
 * The designer workspace: menu bar, tool palette, drawing pane,
 * output/problems tabs, entity lists, property pane with association
 * managers, and the net-properties / sharing / clone dialogs.
 *
 * The app holds one loaded document. Edits mutate the local model only;
 * Save pushes the whole document with optimistic versioning. Users with
 * read access keep their local edits in memory and see a banner instead
 * of an error when saving is not possible.
 */
import { ApiClient, ApiError, ValidationReportBody } from "./api.js";
import {
  AssociationKind,
  DocumentFile,
  GoalNetModel,
  StateKind,
  TransitionKind,
} from "./document.js";
import { navigationFor, ProblemRow, problemRows } from "./problems.js";
import { renderScene } from "./render.js";
import { renderScenePng, PngScale } from "./raster.js";
import { projectScene, Tool } from "./scene.js";

const TOOLS: Tool[] = [
  "select", "atomic", "composite", "transition-direct",
  "transition-conditional", "transition-probabilistic", "arc", "move", "delete",
];

function div(className: string, parent?: Element): HTMLDivElement {
  const node = document.createElement("div");
  node.className = className;
  parent?.appendChild(node);
  return node;
}

function button(label: string, className: string, onClick: () => void,
                parent?: Element): HTMLButtonElement {
  const node = document.createElement("button");
  node.textContent = label;
  node.className = className;
  node.addEventListener("click", onClick);
  parent?.appendChild(node);
  return node;
}

export class DesignerApp {
  model: GoalNetModel | null = null;
  tool: Tool = "select";
  selection = new Set<string>();
  lastReport: ValidationReportBody | null = null;
  readOnly = false;
  private arcSource: string | null = null;

  private canvas!: SVGSVGElement;
  private toolButtons = new Map<Tool, HTMLButtonElement>();
  private banner!: HTMLElement;
  private outputLog!: HTMLElement;
  private problemsBody!: HTMLElement;
  private propertyPane!: HTMLElement;
  private listsPane!: HTMLElement;
  private dialogHost!: HTMLElement;
  private tabButtons = new Map<string, HTMLButtonElement>();
  private tabPanes = new Map<string, HTMLElement>();

  constructor(readonly root: HTMLElement, readonly api: ApiClient) {
    this.buildLayout();
  }

  // -- layout ------------------------------------------------------------

  private buildLayout(): void {
    this.root.innerHTML = "";
    const shell = div("designer", this.root);

    const menu = div("menubar", shell);
    button("Save", "cmd-save", () => void this.save(), menu);
    button("Validate (F10)", "cmd-validate", () => void this.validate(), menu);
    button("Run (F5)", "cmd-run", () => void this.run(), menu);
    button("Goal Net Properties", "cmd-net-properties",
           () => this.openNetPropertiesDialog(), menu);
    button("Sharing", "cmd-access", () => this.openAccessDialog(), menu);
    button("Clone", "cmd-clone", () => this.openCloneDialog(), menu);
    const scale = document.createElement("select");
    scale.className = "png-scale";
    for (const s of [1, 2, 4]) {
      const option = document.createElement("option");
      option.value = String(s);
      option.textContent = `${s}x`;
      scale.appendChild(option);
    }
    menu.appendChild(scale);
    button("Export PNG", "cmd-export-png", () => {
      this.exportPng(Number(scale.value) as PngScale, true);
    }, menu);
    this.banner = div("banner", menu);

    const palette = div("toolbar", shell);
    for (const tool of TOOLS) {
      const node = button(tool, `tool tool-${tool}`, () => this.setTool(tool), palette);
      this.toolButtons.set(tool, node);
    }

    const main = div("main", shell);
    this.canvas = document.createElementNS("http://www.w3.org/2000/svg",
                                           "svg") as SVGSVGElement;
    this.canvas.setAttribute("class", "canvas");
    main.appendChild(this.canvas);
    const sidebar = div("sidebar", main);
    this.listsPane = div("entity-lists", sidebar);
    this.propertyPane = div("property-pane", sidebar);

    const tabs = div("tabs", shell);
    const tabBar = div("tab-bar", tabs);
    for (const name of ["output", "problems"]) {
      const node = button(name, `tab-button tab-${name}`, () => this.showTab(name),
                          tabBar);
      this.tabButtons.set(name, node);
      const pane = div(`tab-pane pane-${name}`, tabs);
      this.tabPanes.set(name, pane);
    }
    this.outputLog = document.createElement("pre");
    this.outputLog.className = "output-log";
    this.tabPanes.get("output")!.appendChild(this.outputLog);
    const table = document.createElement("table");
    table.className = "problems-table";
    const head = document.createElement("tr");
    for (const caption of ["Object", "Message"]) {
      const th = document.createElement("th");
      th.textContent = caption;
      head.appendChild(th);
    }
    table.appendChild(head);
    this.problemsBody = table;
    this.tabPanes.get("problems")!.appendChild(table);

    this.dialogHost = div("dialog-host", shell);
    this.showTab("output");
    this.setTool("select");

    this.root.addEventListener("keydown", (event) => {
      const key = (event as KeyboardEvent).key;
      if (key === "F10") void this.validate();
      if (key === "F5") void this.run();
    });
  }

  private showTab(name: string): void {
    for (const [tab, pane] of this.tabPanes) {
      pane.style.display = tab === name ? "block" : "none";
      this.tabButtons.get(tab)!.classList.toggle("active", tab === name);
    }
  }

  log(line: string): void {
    this.outputLog.textContent += line + "\n";
  }

  setBanner(text: string): void {
    this.banner.textContent = text;
  }

  // -- document lifecycle ---------------------------------------------------

  async open(netId: string): Promise<void> {
    const file = await this.api.getDocument(netId);
    this.model = GoalNetModel.fromFile(file);
    this.selection.clear();
    this.readOnly = false;
    this.lastReport = null;
    this.setBanner("");
    this.log(`opened ${file.net.name} (version ${file.net.version})`);
    try {
      await this.api.postAction({
        object_type: "goal_net", object_id: netId,
        action_type: "open", gnet_id: netId,
      });
    } catch {
      // action logging must never break the workspace
    }
    this.refresh();
  }

  loadFile(file: DocumentFile): void {
    this.model = GoalNetModel.fromFile(file);
    this.selection.clear();
    this.refresh();
  }

  async save(): Promise<number | null> {
    if (!this.model) return null;
    try {
      const version = await this.api.putDocument(this.model.toFile());
      this.model.net.version = version;
      this.model.markSaved();
      this.readOnly = false;
      this.setBanner("");
      this.log(`saved version ${version}`);
      this.refresh();
      return version;
    } catch (error) {
      if (error instanceof ApiError && error.status === 403) {
        this.readOnly = true;
        this.setBanner("read access only: changes will not be saved");
        this.log("save rejected: read access only");
        this.refresh();
        return null;
      }
      if (error instanceof ApiError && error.status === 409) {
        this.setBanner("save conflict: the net changed in the store; reload to continue");
        this.log("save rejected: version conflict");
        return null;
      }
      throw error;
    }
  }

  async validate(): Promise<ValidationReportBody | null> {
    if (!this.model) return null;
    const report = await this.api.validate(this.model.net.id);
    this.lastReport = report;
    this.log(`validation: ${report.error_count} errors, ${report.warning_count} warnings`);
    this.renderProblems();
    this.showTab("problems");
    return report;
  }

  async run(): Promise<void> {
    if (!this.model) return;
    try {
      const report = await this.api.run(this.model.net.id);
      if (!report.launched) {
        this.lastReport = {
          error_count: report.errors.length,
          warning_count: 0,
          diagnostics: report.errors,
        };
        this.log(`run blocked: ${report.errors.length} validation errors`);
        this.renderProblems();
        this.showTab("problems");
      } else {
        this.log(`external compiler exited with status ${report.exit_code}`);
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.log(`run failed: ${error.message}`);
        return;
      }
      throw error;
    }
  }

  // -- canvas interaction ------------------------------------------------------

  setTool(tool: Tool): void {
    this.tool = tool;
    this.arcSource = null;
    for (const [name, node] of this.toolButtons) {
      node.classList.toggle("active", name === tool);
    }
  }

  /** A creation-tool click on free canvas space. */
  placeEntity(x: number, y: number): string | null {
    if (!this.model) return null;
    const parent = this.currentScope();
    let id: string | null = null;
    if (this.tool === "atomic" || this.tool === "composite") {
      const count = this.model.states.size + 1;
      id = this.model.addState(parent, `State ${count}`,
                               this.tool as StateKind, { x, y });
    } else if (this.tool.startsWith("transition-")) {
      const kind = this.tool.slice("transition-".length) as TransitionKind;
      const count = this.model.transitions.size + 1;
      id = this.model.addTransition(parent, `Transition ${count}`, kind, { x, y });
    }
    if (id) {
      this.selection = new Set([id]);
      this.refresh();
    }
    return id;
  }

  /** Parent scope for new entities: the single selected composite, if any. */
  private currentScope(): string | null {
    if (this.selection.size !== 1 || !this.model) return null;
    const only = [...this.selection][0];
    return this.model.states.get(only)?.kind === "composite" ? only : null;
  }

  clickEntity(id: string, additive = false): void {
    if (!this.model) return;
    if (this.tool === "delete") {
      const doomed = this.selection.has(id) ? new Set(this.selection) : new Set([id]);
      this.model.removeEntities(doomed);
      this.selection.clear();
      this.refresh();
      return;
    }
    if (this.tool === "arc") {
      if (this.arcSource === null) {
        this.arcSource = id;
        this.selection = new Set([id]);
      } else if (this.arcSource !== id) {
        try {
          this.model.addArc(this.arcSource, id);
          this.log("arc added");
        } catch (error) {
          this.log(`arc rejected: ${(error as Error).message}`);
        }
        this.arcSource = null;
        this.selection.clear();
      }
      this.refresh();
      return;
    }
    if (additive) {
      if (this.selection.has(id)) this.selection.delete(id);
      else this.selection.add(id);
    } else {
      this.selection = new Set([id]);
    }
    this.refresh();
  }

  /** One translation for the whole selection (a group drag is one call). */
  dragSelectionBy(dx: number, dy: number): void {
    if (!this.model || this.selection.size === 0) return;
    this.model.moveEntities(new Set(this.selection), dx, dy);
    this.refresh();
  }

  // -- problems tab ---------------------------------------------------------------

  problemRowsNow(): ProblemRow[] {
    return this.lastReport ? problemRows(this.lastReport) : [];
  }

  clickProblemRow(row: ProblemRow): void {
    if (!this.model) return;
    const target = navigationFor(row, this.model);
    if (target.kind === "net-properties") {
      this.openNetPropertiesDialog();
      return;
    }
    if (target.kind === "stale") {
      this.setBanner("that entity no longer exists: re-run validation");
      return;
    }
    this.selection = new Set([target.id]);
    this.refresh();
    const node = this.canvas.querySelector(`[data-id="${target.id}"]`);
    (node as unknown as { scrollIntoView?: () => void })?.scrollIntoView?.();
  }

  private renderProblems(): void {
    while (this.problemsBody.children.length > 1) {
      this.problemsBody.removeChild(this.problemsBody.lastChild!);
    }
    for (const row of this.problemRowsNow()) {
      const tr = document.createElement("tr");
      tr.className = `problem-row severity-${row.severity} rule-${row.rule}`;
      const objectCell = document.createElement("td");
      objectCell.textContent = row.objectName;
      const messageCell = document.createElement("td");
      messageCell.textContent = row.message;
      tr.appendChild(objectCell);
      tr.appendChild(messageCell);
      tr.addEventListener("click", () => this.clickProblemRow(row));
      this.problemsBody.appendChild(tr);
    }
  }

  // -- export ------------------------------------------------------------------------

  exportPng(scale: PngScale, download = false): Uint8Array | null {
    if (!this.model) return null;
    const png = renderScenePng(projectScene(this.model, this.selection), scale);
    if (download && typeof URL !== "undefined" && "createObjectURL" in URL) {
      try {
        const blob = new Blob([png.slice().buffer], { type: "image/png" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = `${this.model.net.name}.png`;
        link.click();
      } catch {
        // headless environments have no object URLs; the bytes still return
      }
    }
    this.log(`exported PNG at ${scale}x (${png.length} bytes)`);
    return png;
  }

  // -- dialogs -----------------------------------------------------------------------

  private dialog(className: string): HTMLDivElement {
    this.closeDialogs();
    const overlay = div(`dialog ${className}`, this.dialogHost);
    button("Close", "dialog-close", () => this.closeDialogs(), overlay);
    return overlay;
  }

  closeDialogs(): void {
    this.dialogHost.innerHTML = "";
  }

  openNetPropertiesDialog(): HTMLElement {
    const dialogNode = this.dialog("net-properties");
    if (!this.model) return dialogNode;
    const model = this.model;
    const title = document.createElement("h3");
    title.textContent = "Goal Net Properties";
    dialogNode.appendChild(title);

    const pickers: Record<string, HTMLSelectElement> = {};
    const fields: Array<[label: string, key: "root" | "start" | "end",
                         compositeOnly: boolean, current: string | null]> = [
      ["Root state", "root", true, model.net.root_state_id],
      ["Start state", "start", false, model.net.start_state_id],
      ["End state", "end", false, model.net.end_state_id],
    ];
    for (const [label, key, compositeOnly, current] of fields) {
      const rowNode = div(`field field-${key}`, dialogNode);
      const caption = document.createElement("label");
      caption.textContent = label;
      rowNode.appendChild(caption);
      const select = document.createElement("select");
      select.className = `pick-${key}`;
      const none = document.createElement("option");
      none.value = "";
      none.textContent = "(none)";
      select.appendChild(none);
      for (const state of model.states.values()) {
        if (compositeOnly && state.kind !== "composite") continue;
        const option = document.createElement("option");
        option.value = state.id;
        option.textContent = state.name;
        if (state.id === current) option.selected = true;
        select.appendChild(option);
      }
      rowNode.appendChild(select);
      pickers[key] = select;
    }
    button("Apply", "dialog-apply", () => {
      try {
        model.setNetProperties(pickers.root.value || null,
                               pickers.start.value || null,
                               pickers.end.value || null);
        this.log("net properties updated");
        this.closeDialogs();
        this.refresh();
      } catch (error) {
        this.log(`net properties rejected: ${(error as Error).message}`);
      }
    }, dialogNode);
    return dialogNode;
  }

  openAccessDialog(): HTMLElement {
    const dialogNode = this.dialog("access");
    if (!this.model) return dialogNode;
    const model = this.model;
    const user = document.createElement("input");
    user.className = "access-user";
    user.placeholder = "login";
    dialogNode.appendChild(user);
    const level = document.createElement("select");
    level.className = "access-level";
    for (const name of ["read", "write", "admin"]) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      level.appendChild(option);
    }
    dialogNode.appendChild(level);
    button("Grant", "access-grant", () => {
      void this.api.changeAccess(model.net.id, user.value,
                                 level.value as "read" | "write" | "admin")
        .then(() => this.log(`granted ${level.value} to ${user.value}`))
        .catch((error: Error) => this.log(`grant failed: ${error.message}`));
    }, dialogNode);
    button("Revoke", "access-revoke", () => {
      void this.api.changeAccess(model.net.id, user.value, null)
        .then(() => this.log(`revoked access of ${user.value}`))
        .catch((error: Error) => this.log(`revoke failed: ${error.message}`));
    }, dialogNode);
    return dialogNode;
  }

  openCloneDialog(): HTMLElement {
    const dialogNode = this.dialog("clone");
    if (!this.model) return dialogNode;
    const model = this.model;
    const kind = document.createElement("select");
    kind.className = "clone-kind";
    for (const name of ["task", "function"]) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      kind.appendChild(option);
    }
    dialogNode.appendChild(kind);
    const entity = document.createElement("select");
    entity.className = "clone-entity";
    dialogNode.appendChild(entity);
    const fillEntities = () => {
      entity.innerHTML = "";
      const pool = kind.value === "task" ? model.tasks : model.functions;
      for (const item of pool.values()) {
        const option = document.createElement("option");
        option.value = item.id;
        option.textContent = item.name;
        entity.appendChild(option);
      }
    };
    kind.addEventListener("change", fillEntities);
    fillEntities();
    const target = document.createElement("input");
    target.className = "clone-target";
    target.placeholder = "target net id";
    dialogNode.appendChild(target);
    button("Clone", "clone-run", () => {
      void this.api.clone(kind.value as "task" | "function", entity.value,
                          model.net.id, target.value)
        .then((mapping) => this.log(
          `cloned ${kind.value}: ${Object.keys(mapping).length} entities copied`))
        .catch((error: Error) => this.log(`clone failed: ${error.message}`));
    }, dialogNode);
    return dialogNode;
  }

  /** Association manager for one owner (tasks of a transition, functions
   *  of a state or task), shown inside the property pane. */
  private renderAssociationManager(parent: Element, ownerId: string,
                                   kind: AssociationKind, title: string,
                                   pool: Map<string, { id: string; name: string }>): void {
    if (!this.model) return;
    const model = this.model;
    const box = div(`assoc-manager assoc-${kind}`, parent);
    const caption = document.createElement("h4");
    caption.textContent = title;
    box.appendChild(caption);
    const list = document.createElement("ol");
    list.className = "assoc-list";
    for (const assoc of model.associationsOf(kind, ownerId)) {
      const item = document.createElement("li");
      item.dataset.assocId = assoc.id;
      item.textContent = pool.get(assoc.member_id)?.name ?? assoc.member_id;
      button("up", "assoc-up", () => {
        model.reorderAssociation(assoc.id, -1);
        this.refresh();
      }, item);
      button("down", "assoc-down", () => {
        model.reorderAssociation(assoc.id, 1);
        this.refresh();
      }, item);
      button("remove", "assoc-remove", () => {
        model.dissociate(assoc.id);
        this.refresh();
      }, item);
      list.appendChild(item);
    }
    box.appendChild(list);
    const picker = document.createElement("select");
    picker.className = "assoc-add-pick";
    for (const item of pool.values()) {
      const option = document.createElement("option");
      option.value = item.id;
      option.textContent = item.name;
      picker.appendChild(option);
    }
    box.appendChild(picker);
    button("add", "assoc-add", () => {
      try {
        model.associate(kind, ownerId, picker.value);
        this.refresh();
      } catch (error) {
        this.log(`associate rejected: ${(error as Error).message}`);
      }
    }, box);
  }

  // -- sidebar ------------------------------------------------------------------------

  private renderLists(): void {
    this.listsPane.innerHTML = "";
    if (!this.model) return;
    const model = this.model;
    const sections: Array<[string, Iterable<{ id: string; name: string }>]> = [
      ["arcs", model.arcs.values()],
      ["functions", model.functions.values()],
      ["states", model.states.values()],
      ["tasks", model.tasks.values()],
      ["transitions", model.transitions.values()],
    ];
    for (const [name, items] of sections) {
      const box = div(`entity-list list-${name}`, this.listsPane);
      const caption = document.createElement("h3");
      caption.textContent = name;
      box.appendChild(caption);
      const ul = document.createElement("ul");
      for (const item of [...items].sort((a, b) =>
          a.name < b.name ? -1 : a.name > b.name ? 1 : a.id < b.id ? -1 : 1)) {
        const li = document.createElement("li");
        li.dataset.id = item.id;
        li.textContent = item.name || "(unnamed)";
        if (this.selection.has(item.id)) li.classList.add("selected");
        li.addEventListener("click", () => this.clickEntity(item.id));
        ul.appendChild(li);
      }
      box.appendChild(ul);
    }
  }

  private renderPropertyPane(): void {
    this.propertyPane.innerHTML = "";
    if (!this.model || this.selection.size !== 1) return;
    const model = this.model;
    const id = [...this.selection][0];
    const kind = model.kindOf(id);
    if (!kind || kind === "goal_net" || kind === "association") return;
    const caption = document.createElement("h3");
    caption.textContent = `${kind}: ${model.nameOf(id) || "(unnamed)"}`;
    this.propertyPane.appendChild(caption);

    const textField = (key: string, value: string) => {
      const row = div(`prop prop-${key}`, this.propertyPane);
      const label = document.createElement("label");
      label.textContent = key;
      row.appendChild(label);
      const input = document.createElement("input");
      input.className = `prop-input-${key}`;
      input.value = value;
      input.addEventListener("change", () => {
        try {
          model.updateProperties(id, { [key]: coerce(key, input.value) });
          this.refresh();
        } catch (error) {
          this.log(`edit rejected: ${(error as Error).message}`);
        }
      });
      row.appendChild(input);
    };
    const coerce = (key: string, raw: string): unknown => {
      if (["achievement_value", "cost", "weight"].includes(key)) return Number(raw);
      if (key === "priority") return Math.trunc(Number(raw));
      if (key === "guard") return raw === "" ? null : raw;
      return raw;
    };

    const entity = (model.states.get(id) ?? model.transitions.get(id)
      ?? model.arcs.get(id) ?? model.functions.get(id) ?? model.tasks.get(id))!;
    textField("name", entity.name);
    textField("description", entity.description);
    if (kind === "state") {
      const state = model.states.get(id)!;
      textField("achievement_value", String(state.achievement_value));
      textField("cost", String(state.cost));
      this.renderAssociationManager(this.propertyPane, id, "state_function",
                                    "Manage Functions", model.functions);
    } else if (kind === "transition") {
      this.renderAssociationManager(this.propertyPane, id, "transition_task",
                                    "Manage Tasks", model.tasks);
    } else if (kind === "task") {
      this.renderAssociationManager(this.propertyPane, id, "task_function",
                                    "Manage Functions", model.functions);
    } else if (kind === "arc") {
      const arc = model.arcs.get(id)!;
      textField("guard", arc.guard ?? "");
      textField("weight", String(arc.weight));
      textField("priority", String(arc.priority));
    } else if (kind === "function") {
      textField("binding_key", model.functions.get(id)!.binding_key);
    }
  }

  // -- rendering ----------------------------------------------------------------------

  refresh(): void {
    if (!this.model) return;
    const scene = projectScene(this.model, this.selection);
    renderScene(this.canvas, scene, {
      onNodeClick: (node, event) => this.clickEntity(node.ref.id, event.shiftKey),
      onCanvasClick: (x, y) => {
        if (this.tool === "atomic" || this.tool === "composite"
            || this.tool.startsWith("transition-")) {
          this.placeEntity(x, y);
        } else if (this.tool === "select") {
          this.selection.clear();
          this.refresh();
        }
      },
    });
    this.renderLists();
    this.renderPropertyPane();
  }
}
