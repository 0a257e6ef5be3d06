/**
 * Document types mirroring the service JSON API.
 *
 * These are transcriptions of what the HTTP endpoints return, nothing more:
 * the console never derives labels, gates, or controls on its own.
 */

export type DecisionLabelValue = "APPROVE" | "DENY" | "CONDITIONAL";

export type SharingScopeValue =
  | "internal"
  | "cross_department"
  | "external_third_party"
  | "cross_border";

export const SHARING_SCOPES: readonly SharingScopeValue[] = [
  "internal",
  "cross_department",
  "external_third_party",
  "cross_border",
];

export interface ControlDoc {
  control_id: string;
  kind: string;
  description: string;
  params: Record<string, unknown>;
}

export interface GateHitDoc {
  gate_id: string;
  message: string;
  citation: string;
  evidence: Array<[string, unknown]>;
}

export interface StageVerdictDoc {
  stage: string;
  status: string;
  signals: Record<string, unknown>;
  proposed_controls: string[];
  citations: string[];
  notes: string;
}

export interface RationaleDoc {
  summary: string;
  cited_policies: string[];
  stage_findings: Record<string, string>;
  machine_fields: Record<string, unknown>;
}

export interface ScoreDoc {
  per_stage_status: string[];
  uncertainty: number;
  mitigable: boolean;
}

export interface DecisionDoc {
  request_id: string;
  label: string;
  label_code: string;
  raw_label: string;
  rationale: RationaleDoc;
  controls: ControlDoc[];
  gate_hit: GateHitDoc | null;
  stage_trace: StageVerdictDoc[];
  score: ScoreDoc | null;
  latency_ms: number;
  audit_seq?: number;
}

export interface AuditRecordDoc {
  seq: number;
  request_id: string;
  requester_id: string;
  dataset_id: string;
  purpose: string;
  decision: string;
  raw_label: string;
  gate_id: string | null;
  controls: string[];
  policy_citations: string[];
  submitted_at: string;
  decided_at: string;
  latency_ms: number;
  retry_count: number;
  model_settings: Record<string, unknown>;
  rationale_summary: string;
  machine_fields: Record<string, unknown>;
  rationale_hash: string;
  hash_alg: string;
  org_id: string;
  case_id: string | null;
}

export interface AuditQueryResponse {
  count: number;
  records: AuditRecordDoc[];
}

export interface PolicyDoc {
  policy_id: string;
  title: string;
  text: string;
  scope_tags: string[];
  gate_tags: string[];
}

export interface HealthDoc {
  status: string;
  org_id: string;
  reasoner: string;
  circuit: string;
  audit_records: number;
}

/** Per-field problem map as returned by 400 responses: {"field": "message"}. */
export type FieldErrors = Record<string, string>;
