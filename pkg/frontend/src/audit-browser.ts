/**
 * Audit browser: filterable trail table, CSV download, and the summary card.
 *
 * Filters round-trip through URL query parameters so views are linkable.
 * All rows come from GET /audit; the card aggregates what that query
 * returned (counts by decision, nearest-rank latency percentiles).
 */

import type { AuditFilters } from "./api.js";
import type { AuditRecordDoc } from "./types.js";

const FILTER_KEYS = [
  "request_id",
  "requester_id",
  "dataset_id",
  "decision",
  "gate_id",
  "case_id",
  "limit",
] as const;

export function filtersToQuery(filters: AuditFilters): string {
  const params = new URLSearchParams();
  for (const key of FILTER_KEYS) {
    const value = filters[key];
    if (value !== undefined && value !== "") {
      params.set(key, String(value));
    }
  }
  return params.toString();
}

export function filtersFromQuery(query: string): AuditFilters {
  const params = new URLSearchParams(query);
  const filters: AuditFilters = {};
  for (const key of FILTER_KEYS) {
    const value = params.get(key);
    if (value === null || value === "") {
      continue;
    }
    if (key === "limit") {
      const parsed = Number.parseInt(value, 10);
      if (Number.isFinite(parsed) && parsed > 0) {
        filters.limit = parsed;
      }
    } else {
      filters[key] = value;
    }
  }
  return filters;
}

const TABLE_COLUMNS: Array<[keyof AuditRecordDoc, string]> = [
  ["seq", "#"],
  ["request_id", "request"],
  ["requester_id", "requester"],
  ["dataset_id", "dataset"],
  ["decision", "decision"],
  ["gate_id", "gate"],
  ["controls", "controls"],
  ["latency_ms", "latency (ms)"],
  ["decided_at", "decided at"],
];

export function buildAuditTable(records: AuditRecordDoc[]): HTMLElement {
  const wrapper = document.createElement("div");
  wrapper.dataset.testid = "audit-table";
  if (records.length === 0) {
    const empty = document.createElement("p");
    empty.dataset.testid = "audit-empty";
    empty.textContent = "No audit records match the current filters.";
    wrapper.append(empty);
    return wrapper;
  }
  const table = document.createElement("table");
  const head = table.createTHead().insertRow();
  for (const [, title] of TABLE_COLUMNS) {
    const cell = document.createElement("th");
    cell.scope = "col";
    cell.textContent = title;
    head.append(cell);
  }
  const body = table.createTBody();
  for (const record of records) {
    const row = body.insertRow();
    row.dataset.testid = "audit-row";
    row.dataset.seq = String(record.seq);
    for (const [field] of TABLE_COLUMNS) {
      const value = record[field];
      const text = Array.isArray(value) ? value.join(", ") : value === null ? "" : String(value);
      row.insertCell().textContent = text;
    }
  }
  wrapper.append(table);
  return wrapper;
}

/** Nearest-rank percentile, matching the service's audit statistics. */
export function nearestRankPercentile(values: number[], percentile: number): number {
  if (values.length === 0) {
    throw new Error("percentile of empty list");
  }
  if (!(percentile > 0 && percentile <= 100)) {
    throw new Error(`percentile must be in (0, 100], got ${percentile}`);
  }
  const sorted = [...values].sort((a, b) => a - b);
  const rank = Math.max(Math.ceil((percentile / 100) * sorted.length), 1);
  return sorted[rank - 1]!;
}

export interface AuditSummary {
  total: number;
  byDecision: Record<string, number>;
  p50Ms: number | null;
  p95Ms: number | null;
}

export function summarize(records: AuditRecordDoc[]): AuditSummary {
  const byDecision: Record<string, number> = {};
  for (const record of records) {
    byDecision[record.decision] = (byDecision[record.decision] ?? 0) + 1;
  }
  const latencies = records.map((r) => r.latency_ms);
  return {
    total: records.length,
    byDecision,
    p50Ms: latencies.length > 0 ? nearestRankPercentile(latencies, 50) : null,
    p95Ms: latencies.length > 0 ? nearestRankPercentile(latencies, 95) : null,
  };
}

export function buildSummaryCard(summary: AuditSummary): HTMLElement {
  const card = document.createElement("section");
  card.dataset.testid = "summary-card";
  card.className = "summary-card";
  const heading = document.createElement("h2");
  heading.textContent = `Decisions (${summary.total})`;
  card.append(heading);
  const counts = document.createElement("ul");
  for (const [decision, count] of Object.entries(summary.byDecision).sort()) {
    const item = document.createElement("li");
    item.dataset.testid = `count-${decision}`;
    item.textContent = `${decision}: ${count}`;
    counts.append(item);
  }
  card.append(counts);
  const latency = document.createElement("p");
  latency.dataset.testid = "summary-latency";
  latency.textContent = summary.p50Ms === null
    ? "No latency data yet."
    : `latency p50 ${summary.p50Ms} ms, p95 ${summary.p95Ms} ms`;
  card.append(latency);
  return card;
}

export function buildAccessDeniedView(): HTMLElement {
  const root = document.createElement("div");
  root.dataset.testid = "access-denied";
  root.setAttribute("role", "alert");
  const heading = document.createElement("h2");
  heading.textContent = "Access denied";
  const body = document.createElement("p");
  body.textContent = "The audit trail requires a valid admin token.";
  root.append(heading, body);
  return root;
}
