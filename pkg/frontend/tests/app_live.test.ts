/**
 * Drives the designer against a live api-service: a real store is
 * seeded through the goalnet CLI, `goalnet serve` runs as a child
 * process, and the app talks to it over HTTP exactly as a browser
 * session would.
 */
import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DesignerApp } from "../src/app.js";
import { pngDimensions } from "../src/png.js";

const here = dirname(fileURLToPath(import.meta.url));
const PORT = 8791;
const BASE = `http://127.0.0.1:${PORT}`;

let serveProcess: ChildProcess;
let workDir: string;
let storePath: string;
let prefixNetId: string;
let fixableNetId: string;
let completeNetId: string;

function cli(...args: string[]): string {
  return execFileSync("goalnet", ["--store", storePath, ...args],
                      { encoding: "utf-8" }).trim();
}

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/questions`, {
        headers: { Authorization: "Bearer tok-lisiyao" },
      });
      if (response.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("api-service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "goalnet-ui-"));
  storePath = join(workDir, "store.db");
  cli("init");
  cli("users", "add", "lisiyao", "--name", "Li Siyao");
  cli("users", "add", "yuhan");
  cli("users", "set-token", "lisiyao", "tok-lisiyao");
  cli("users", "set-token", "yuhan", "tok-yuhan");

  // Fixture documents generated by the server package (committed).
  const imported: Record<string, string> = {};
  for (const fixture of ["sdlc_prefix.gnet.json", "sdlc_prefix2.gnet.json",
                         "sdlc.gnet.json"]) {
    const file = join(workDir, fixture);
    writeFileSync(file, readFileSync(join(here, "fixtures", fixture)));
    imported[fixture] = cli("--as", "lisiyao", "import", file);
  }
  prefixNetId = imported["sdlc_prefix.gnet.json"];
  fixableNetId = imported["sdlc_prefix2.gnet.json"];
  completeNetId = imported["sdlc.gnet.json"];
  cli("--as", "lisiyao", "share", "grant", "--net", completeNetId,
      "--user", "yuhan", "--level", "read");

  serveProcess = spawn("goalnet",
                       ["--store", storePath, "serve", "--listen", `127.0.0.1:${PORT}`,
                        "--cors-origin", "http://localhost:5173"],
                       { stdio: "ignore" });
  await waitForService();
});

afterAll(() => {
  serveProcess?.kill();
});

function mountApp(token = "tok-lisiyao"): DesignerApp {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.querySelector<HTMLDivElement>("#app")!;
  return new DesignerApp(root, new ApiClient({ baseUrl: BASE, token }));
}

describe("designer against a live api-service", () => {
  it("loads a net and renders the scene with shape classes", async () => {
    const app = mountApp();
    await app.open(completeNetId);
    expect(document.querySelectorAll(".canvas .node.state.double-circle")).toHaveLength(1);
    expect(document.querySelectorAll(".canvas .node.state.circle")).toHaveLength(4);
    expect(document.querySelectorAll(".canvas .node.transition.rectangle")).toHaveLength(3);
    expect(document.querySelectorAll(".canvas .edge.arrow")).toHaveLength(6);
    expect(document.querySelectorAll(".canvas .edge.dashed-arrow")).toHaveLength(2);
  });

  it("problem rows navigate: E1 opens net properties, E4 selects the state",
     async () => {
    const app = mountApp();
    await app.open(prefixNetId);
    const report = await app.validate();
    expect(report!.error_count).toBe(4);

    // the problems tab mirrors the whole report: errors first, then warnings
    const rows = document.querySelectorAll<HTMLTableRowElement>(".problem-row");
    expect(rows).toHaveLength(report!.diagnostics.length);
    const errorRows = document.querySelectorAll<HTMLTableRowElement>(
      ".problem-row.severity-error");
    expect(errorRows).toHaveLength(4);
    expect(rows[0].textContent).toContain("This Goal Net has no root state.");

    // E1 row: the net-properties dialog pops up
    rows[0].click();
    const dialog = document.querySelector(".dialog.net-properties");
    expect(dialog).not.toBeNull();
    app.closeDialogs();

    // E4 row: the subject state gets selected on the canvas
    expect(rows[3].className).toContain("rule-E4");
    rows[3].click();
    const subjectId = app.problemRowsNow()[3].subject.id;
    expect(app.selection.has(subjectId)).toBe(true);
    const selected = document.querySelector(".canvas .node.selected");
    expect(selected?.getAttribute("data-id")).toBe(subjectId);
  });

  it("fixing the E1 errors through the dialog makes validation clean", async () => {
    const app = mountApp();
    await app.open(fixableNetId);
    await app.validate();

    const dialog = app.openNetPropertiesDialog();
    const pick = (cls: string, name: string) => {
      const select = dialog.querySelector<HTMLSelectElement>(`.pick-${cls}`)!;
      const option = [...select.options].find((o) => o.textContent === name)!;
      select.value = option.value;
    };
    pick("root", "SDLC");
    pick("start", "Start");
    pick("end", "End");
    (dialog.querySelector(".dialog-apply") as HTMLButtonElement).click();

    const saved = await app.save();
    expect(saved).not.toBeNull();
    const report = await app.validate();
    expect(report!.error_count).toBe(0);
  });

  it("read users edit locally, see the unsaved flag, and cannot save", async () => {
    const app = mountApp("tok-yuhan");
    await app.open(completeNetId);
    app.setTool("atomic");
    const placed = app.placeEntity(400, 300);
    expect(placed).not.toBeNull();
    const node = document.querySelector(`.canvas .node[data-id="${placed}"]`)!;
    expect(node.classList.contains("unsaved")).toBe(true);

    const version = await app.save();
    expect(version).toBeNull();
    expect(app.readOnly).toBe(true);
    expect(document.querySelector(".banner")!.textContent)
      .toContain("changes will not be saved");
    // the local edit is still there, still flagged unsaved
    expect(app.model!.states.has(placed!)).toBe(true);
    expect(app.model!.unsaved.has(placed!)).toBe(true);
  });

  it("a group drag issues one move for the whole selection", async () => {
    const app = mountApp();
    await app.open(completeNetId);
    const ids = [...app.model!.states.keys()];
    for (const id of ids) app.clickEntity(id, true);
    let calls = 0;
    const original = app.model!.moveEntities.bind(app.model);
    app.model!.moveEntities = (set, dx, dy) => {
      calls += 1;
      original(set, dx, dy);
    };
    app.dragSelectionBy(12, -4);
    expect(calls).toBe(1);
  });

  it("exports a PNG whose dimensions double at scale 2", async () => {
    const app = mountApp();
    await app.open(completeNetId);
    const at1 = pngDimensions(app.exportPng(1)!);
    const at2 = pngDimensions(app.exportPng(2)!);
    expect(at2.width).toBe(2 * at1.width);
    expect(at2.height).toBe(2 * at1.height);
  });

  it("run surfaces the gate errors in the problems tab", async () => {
    const app = mountApp();
    await app.open(prefixNetId);
    await app.run();
    // gate errors only (warnings never block running)
    const rows = document.querySelectorAll(".problem-row");
    expect(rows.length).toBe(4);
    expect(document.querySelector(".output-log")!.textContent)
      .toContain("run blocked: 4 validation errors");
  });
});
