/**
 * Request drafts and client-side schema validation.
 *
 * Validation here is structural only (required fields, basic shapes) so the
 * form can point at the failing field before a round trip. The service
 * revalidates everything; a 400 maps back onto the same field names.
 */

import { SHARING_SCOPES, type FieldErrors, type SharingScopeValue } from "./types.js";

export interface RequestDraft {
  requester_id: string;
  dataset_id: string;
  purpose: string;
  sharing_scope: SharingScopeValue;
  declared_retention_days: number | null;
  destination_region: string;
  external_party: string;
}

export function emptyDraft(): RequestDraft {
  return {
    requester_id: "",
    dataset_id: "",
    purpose: "",
    sharing_scope: "internal",
    declared_retention_days: null,
    destination_region: "",
    external_party: "",
  };
}

/** Validate a draft; returns one message per failing field, empty when clean. */
export function validateDraft(draft: RequestDraft): FieldErrors {
  const errors: FieldErrors = {};
  if (!draft.requester_id.trim()) {
    errors.requester_id = "requester is required";
  }
  if (!draft.dataset_id.trim()) {
    errors.dataset_id = "dataset is required";
  }
  if (!draft.purpose.trim()) {
    errors.purpose = "purpose is required";
  }
  if (!SHARING_SCOPES.includes(draft.sharing_scope)) {
    errors.sharing_scope = `unknown sharing scope "${draft.sharing_scope}"`;
  }
  const retention = draft.declared_retention_days;
  if (retention !== null && (!Number.isInteger(retention) || retention <= 0)) {
    errors.declared_retention_days = "retention must be a positive whole number of days";
  }
  if (draft.sharing_scope === "cross_border" && !draft.destination_region.trim()) {
    errors.destination_region = "destination region is required for cross-border sharing";
  }
  return errors;
}

export function draftIsValid(draft: RequestDraft): boolean {
  return Object.keys(validateDraft(draft)).length === 0;
}

/** Body for POST /decisions; omits empty optionals instead of sending "". */
export function draftToBody(draft: RequestDraft): Record<string, unknown> {
  const body: Record<string, unknown> = {
    requester_id: draft.requester_id.trim(),
    dataset_id: draft.dataset_id.trim(),
    purpose: draft.purpose.trim(),
    sharing_scope: draft.sharing_scope,
  };
  if (draft.declared_retention_days !== null) {
    body.declared_retention_days = draft.declared_retention_days;
  }
  if (draft.destination_region.trim()) {
    body.destination_region = draft.destination_region.trim();
  }
  if (draft.external_party.trim()) {
    body.external_party = draft.external_party.trim();
  }
  return body;
}
