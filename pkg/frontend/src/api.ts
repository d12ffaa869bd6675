/**
 * Typed client for the goalnet HTTP service. Every request carries the
 * configured bearer token; failures surface as ApiError with the
 * server's machine code.
 */
import type { DocumentFile } from "./document.js";

export interface ApiConfig {
  baseUrl: string;
  token: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

export interface DiagnosticRow {
  severity: "error" | "warning";
  rule: string;
  message: string;
  subject_kind: string;
  subject_id: string;
  subject_name?: string;
}

export interface ValidationReportBody {
  error_count: number;
  warning_count: number;
  diagnostics: DiagnosticRow[];
}

export interface NetSummary {
  id: string;
  name: string;
  description: string;
  version: number;
  level: string;
}

export interface RunReportBody {
  launched: boolean;
  compiler_path: string | null;
  exit_code: number | null;
  errors: DiagnosticRow[];
}

async function fail(response: Response): Promise<never> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(readonly config: ApiConfig) {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return { Authorization: `Bearer ${this.config.token}`, ...extra };
  }

  private url(path: string): string {
    return this.config.baseUrl.replace(/\/$/, "") + path;
  }

  async listNets(): Promise<NetSummary[]> {
    const response = await fetch(this.url("/goalnets"), { headers: this.headers() });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async createNet(name: string, description = ""): Promise<DocumentFile> {
    const response = await fetch(this.url("/goalnets"), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ name, description }),
    });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async getDocument(netId: string): Promise<DocumentFile> {
    const response = await fetch(this.url(`/goalnets/${netId}`),
                                 { headers: this.headers() });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async putDocument(file: DocumentFile): Promise<number> {
    const response = await fetch(this.url(`/goalnets/${file.net.id}`), {
      method: "PUT",
      headers: this.headers({
        "Content-Type": "application/json",
        "If-Match": String(file.net.version),
      }),
      body: JSON.stringify(file),
    });
    if (!response.ok) await fail(response);
    return (await response.json()).version;
  }

  async validate(netId: string): Promise<ValidationReportBody> {
    const response = await fetch(this.url(`/goalnets/${netId}/validate`), {
      method: "POST",
      headers: this.headers(),
    });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async run(netId: string, options: Record<string, unknown> = {}): Promise<RunReportBody> {
    const response = await fetch(this.url(`/goalnets/${netId}/run`), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(options),
    });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async changeAccess(netId: string, user: string,
                     level: "read" | "write" | "admin" | null): Promise<void> {
    const body = level === null ? { user, revoke: true } : { user, level };
    const response = await fetch(this.url(`/goalnets/${netId}/access`), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(body),
    });
    if (!response.ok) await fail(response);
  }

  async clone(kind: "function" | "task", id: string, sourceNet: string,
              targetNet: string): Promise<Record<string, string>> {
    const response = await fetch(this.url("/clone"), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ kind, id, source_net: sourceNet, target_net: targetNet }),
    });
    if (!response.ok) await fail(response);
    return (await response.json()).mapping;
  }

  async exportSvg(netId: string): Promise<string> {
    const response = await fetch(this.url(`/goalnets/${netId}/export.svg`),
                                 { headers: this.headers() });
    if (!response.ok) await fail(response);
    return response.text();
  }

  async postAction(entry: { object_type: string; object_id: string;
                            action_type: string; gnet_id?: string }): Promise<void> {
    const response = await fetch(this.url("/actions"), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(entry),
    });
    if (!response.ok) await fail(response);
  }

  async questions(): Promise<Array<{ id: string; text: string }>> {
    const response = await fetch(this.url("/questions"), { headers: this.headers() });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async submitFeedback(questionId: string, score: number): Promise<void> {
    const response = await fetch(this.url("/feedback"), {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ question_id: questionId, score }),
    });
    if (!response.ok) await fail(response);
  }
}
