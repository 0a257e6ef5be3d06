/**
 * Typed client for the decision service HTTP API.
 *
 * The client enforces the session concurrency rule: at most one decision
 * request in flight at a time. Admin calls attach the X-Admin-Token header.
 */

import type {
  AuditQueryResponse,
  DecisionDoc,
  FieldErrors,
  HealthDoc,
  PolicyDoc,
} from "./types.js";

export interface AuditFilters {
  request_id?: string;
  requester_id?: string;
  dataset_id?: string;
  decision?: string;
  gate_id?: string;
  case_id?: string;
  limit?: number;
}

export class ApiError extends Error {
  readonly status: number;
  readonly fieldErrors: FieldErrors;

  constructor(status: number, message: string, fieldErrors: FieldErrors = {}) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

/** Thrown when a second decision is submitted while one is still pending. */
export class DecisionInFlightError extends Error {
  constructor() {
    super("a decision is already in flight; wait for it to finish");
    this.name = "DecisionInFlightError";
  }
}

async function raiseForStatus(response: Response): Promise<never> {
  let fieldErrors: FieldErrors = {};
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      if (body.errors && typeof body.errors === "object" && !Array.isArray(body.errors)) {
        fieldErrors = body.errors as FieldErrors;
        detail = Object.entries(fieldErrors)
          .map(([field, msg]) => `${field}: ${msg}`)
          .join("; ");
      } else if (typeof body.detail === "string") {
        detail = body.detail;
      }
    }
  } catch {
    // Non-JSON error body; keep the status line.
  }
  throw new ApiError(response.status, detail, fieldErrors);
}

export class ApiClient {
  readonly baseUrl: string;
  private adminToken: string;
  private decisionInFlight = false;
  private readonly fetchImpl: typeof fetch;

  constructor(baseUrl = "", adminToken = "", fetchImpl: typeof fetch = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.adminToken = adminToken;
    this.fetchImpl = fetchImpl;
  }

  setAdminToken(token: string): void {
    this.adminToken = token;
  }

  get hasAdminToken(): boolean {
    return this.adminToken.length > 0;
  }

  get decisionPending(): boolean {
    return this.decisionInFlight;
  }

  private async request(path: string, init: RequestInit = {}, admin = false): Promise<Response> {
    const headers = new Headers(init.headers);
    if (init.body !== undefined && !headers.has("Content-Type")) {
      headers.set("Content-Type", "application/json");
    }
    if (admin) {
      headers.set("X-Admin-Token", this.adminToken);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    if (!response.ok) {
      await raiseForStatus(response);
    }
    return response;
  }

  /** POST /decisions. Rejects immediately if another decision is pending. */
  async decide(body: Record<string, unknown>): Promise<DecisionDoc> {
    if (this.decisionInFlight) {
      throw new DecisionInFlightError();
    }
    this.decisionInFlight = true;
    try {
      const response = await this.request("/decisions", {
        method: "POST",
        body: JSON.stringify(body),
      });
      return (await response.json()) as DecisionDoc;
    } finally {
      this.decisionInFlight = false;
    }
  }

  async auditQuery(filters: AuditFilters = {}): Promise<AuditQueryResponse> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value !== undefined && value !== "") {
        params.set(key, String(value));
      }
    }
    const query = params.toString();
    const response = await this.request(`/audit${query ? `?${query}` : ""}`, {}, true);
    return (await response.json()) as AuditQueryResponse;
  }

  /** The CSV download proxies /audit/export; the browser follows this URL. */
  auditExportUrl(): string {
    return `${this.baseUrl}/audit/export`;
  }

  async auditExportCsv(): Promise<string> {
    const response = await this.request("/audit/export", {}, true);
    return response.text();
  }

  async catalogSection<T = unknown>(section: string): Promise<T> {
    const response = await this.request(`/catalog/${section}`);
    const body = (await response.json()) as Record<string, T>;
    return body[section] as T;
  }

  async replaceCatalogSection(section: string, payload: unknown): Promise<void> {
    await this.request(`/catalog/${section}`, {
      method: "POST",
      body: JSON.stringify(payload),
    }, true);
  }

  async policies(): Promise<PolicyDoc[]> {
    return this.catalogSection<PolicyDoc[]>("policies");
  }

  async runEval(body: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    const response = await this.request("/eval/runs", {
      method: "POST",
      body: JSON.stringify(body),
    }, true);
    return (await response.json()) as Record<string, unknown>;
  }

  async health(): Promise<HealthDoc> {
    const response = await this.request("/healthz");
    return (await response.json()) as HealthDoc;
  }
}
