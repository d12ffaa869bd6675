/**
 * Problems tab rows and their navigation behaviour. Rows are verbatim
 * API diagnostics (the UI never derives its own); clicking a row either
 * opens the net-properties dialog (net-subject rows, the E-rules about
 * missing properties) or selects the offending entity on the canvas.
 */
import type { DiagnosticRow, ValidationReportBody } from "./api.js";
import type { GoalNetModel } from "./document.js";

export interface ProblemRow {
  objectName: string;
  message: string;
  severity: "error" | "warning";
  rule: string;
  subject: { kind: string; id: string };
}

export function problemRows(report: ValidationReportBody): ProblemRow[] {
  return report.diagnostics.map((d: DiagnosticRow) => ({
    objectName: d.subject_name ?? d.subject_id,
    message: d.message,
    severity: d.severity,
    rule: d.rule,
    subject: { kind: d.subject_kind, id: d.subject_id },
  }));
}

export type Navigation =
  | { kind: "net-properties" }
  | { kind: "select-entity"; id: string }
  | { kind: "stale"; id: string };

/** Where clicking a problem row should take the user. */
export function navigationFor(row: ProblemRow, model: GoalNetModel): Navigation {
  if (row.subject.kind === "goal_net") {
    return { kind: "net-properties" };
  }
  if (model.kindOf(row.subject.id) === null) {
    return { kind: "stale", id: row.subject.id };
  }
  return { kind: "select-entity", id: row.subject.id };
}
