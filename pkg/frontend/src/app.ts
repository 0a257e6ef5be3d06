/**
 * Page controller: wires the guided form, decision viewer, what-if panel,
 * and audit browser together. All elements are native form controls, so the
 * whole request -> decision -> what-if path works keyboard-only.
 */

import { ApiClient, ApiError, DecisionInFlightError, type AuditFilters } from "./api.js";
import {
  buildAccessDeniedView,
  buildAuditTable,
  buildSummaryCard,
  filtersFromQuery,
  filtersToQuery,
  summarize,
} from "./audit-browser.js";
import { buildDecisionView } from "./decision-view.js";
import type { PolicyDoc } from "./types.js";
import { buildDiffView, WhatIfSession } from "./what-if.js";
import {
  draftIsValid,
  draftToBody,
  emptyDraft,
  validateDraft,
  type RequestDraft,
} from "./validation.js";

interface FieldSpec {
  name: keyof RequestDraft;
  label: string;
  kind: "text" | "number" | "textarea" | "select";
  options?: string[];
}

const FORM_FIELDS: FieldSpec[] = [
  { name: "requester_id", label: "Requester", kind: "text" },
  { name: "dataset_id", label: "Dataset", kind: "text" },
  { name: "purpose", label: "Business purpose", kind: "textarea" },
  {
    name: "sharing_scope",
    label: "Sharing scope",
    kind: "select",
    options: ["internal", "cross_department", "external_third_party", "cross_border"],
  },
  { name: "declared_retention_days", label: "Retention (days)", kind: "number" },
  { name: "destination_region", label: "Destination region", kind: "text" },
  { name: "external_party", label: "External party", kind: "text" },
];

function readDraft(form: HTMLFormElement): RequestDraft {
  const draft = emptyDraft();
  const data = new FormData(form);
  for (const spec of FORM_FIELDS) {
    const raw = (data.get(spec.name) ?? "").toString();
    if (spec.name === "declared_retention_days") {
      draft.declared_retention_days = raw.trim() === "" ? null : Number(raw);
    } else if (spec.name === "sharing_scope") {
      draft.sharing_scope = raw as RequestDraft["sharing_scope"];
    } else {
      (draft as unknown as Record<string, string>)[spec.name] = raw;
    }
  }
  return draft;
}

function showFieldErrors(form: HTMLFormElement, errors: Record<string, string>): void {
  for (const spec of FORM_FIELDS) {
    const slot = form.querySelector<HTMLElement>(`[data-error-for="${spec.name}"]`);
    if (slot) {
      slot.textContent = errors[spec.name] ?? "";
    }
  }
}

function buildForm(): HTMLFormElement {
  const form = document.createElement("form");
  form.dataset.testid = "request-form";
  form.noValidate = true;
  for (const spec of FORM_FIELDS) {
    const wrapper = document.createElement("p");
    const label = document.createElement("label");
    const fieldId = `field-${spec.name}`;
    label.htmlFor = fieldId;
    label.textContent = spec.label;
    let input: HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement;
    if (spec.kind === "textarea") {
      input = document.createElement("textarea");
    } else if (spec.kind === "select") {
      input = document.createElement("select");
      for (const option of spec.options ?? []) {
        const opt = document.createElement("option");
        opt.value = option;
        opt.textContent = option.replaceAll("_", " ");
        input.append(opt);
      }
    } else {
      input = document.createElement("input");
      input.type = spec.kind;
    }
    input.id = fieldId;
    input.name = spec.name;
    const error = document.createElement("span");
    error.dataset.errorFor = spec.name;
    error.className = "field-error";
    error.setAttribute("role", "status");
    wrapper.append(label, input, error);
    form.append(wrapper);
  }
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.dataset.testid = "submit-request";
  submit.textContent = "Request access";
  submit.disabled = true;
  form.append(submit);
  return form;
}

export interface App {
  client: ApiClient;
  session: WhatIfSession;
  refreshAudit: (filters?: AuditFilters) => Promise<void>;
}

export function initApp(root: HTMLElement, client: ApiClient): App {
  const session = new WhatIfSession(client);
  let policies = new Map<string, PolicyDoc>();

  const form = buildForm();
  const submit = form.querySelector<HTMLButtonElement>("[data-testid=submit-request]")!;
  const decisionSlot = document.createElement("div");
  decisionSlot.dataset.testid = "decision-slot";
  const diffSlot = document.createElement("div");
  diffSlot.dataset.testid = "diff-slot";
  const auditSlot = document.createElement("div");
  auditSlot.dataset.testid = "audit-slot";
  const statusLine = document.createElement("p");
  statusLine.dataset.testid = "status-line";
  statusLine.setAttribute("role", "status");

  const tokenField = document.createElement("input");
  tokenField.type = "password";
  tokenField.id = "admin-token";
  tokenField.autocomplete = "off";
  const tokenLabel = document.createElement("label");
  tokenLabel.htmlFor = "admin-token";
  tokenLabel.textContent = "Admin token";
  tokenField.addEventListener("change", () => client.setAdminToken(tokenField.value));

  client.policies()
    .then((docs) => {
      policies = new Map(docs.map((p) => [p.policy_id, p]));
    })
    .catch(() => {
      // Policy text stays collapsed to ids if the catalog is unreachable.
    });

  form.addEventListener("input", () => {
    const draft = readDraft(form);
    showFieldErrors(form, validateDraft(draft));
    submit.disabled = !draftIsValid(draft);
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const draft = readDraft(form);
    const errors = validateDraft(draft);
    showFieldErrors(form, errors);
    if (Object.keys(errors).length > 0) {
      return; // schema-invalid drafts never reach the network
    }
    statusLine.textContent = "deciding...";
    client.decide(draftToBody(draft))
      .then((doc) => {
        session.remember(draft, doc);
        decisionSlot.replaceChildren(buildDecisionView(doc, policies));
        statusLine.textContent = "";
      })
      .catch((err) => {
        if (err instanceof DecisionInFlightError) {
          statusLine.textContent = err.message;
        } else if (err instanceof ApiError && Object.keys(err.fieldErrors).length > 0) {
          showFieldErrors(form, err.fieldErrors);
          statusLine.textContent = "the service rejected the request; see the field messages";
        } else {
          statusLine.textContent = `request failed: ${String(err instanceof Error ? err.message : err)}`;
        }
      });
  });

  async function refreshAudit(filters?: AuditFilters): Promise<void> {
    const active = filters ?? filtersFromQuery(window.location.search);
    const query = filtersToQuery(active);
    const url = query ? `?${query}` : window.location.pathname;
    window.history.replaceState(null, "", url);
    try {
      const response = await client.auditQuery(active);
      const summary = summarize(response.records);
      const download = document.createElement("a");
      download.href = client.auditExportUrl();
      download.textContent = "Download CSV";
      download.dataset.testid = "csv-download";
      auditSlot.replaceChildren(buildSummaryCard(summary), buildAuditTable(response.records), download);
    } catch (err) {
      if (err instanceof ApiError && err.status === 403) {
        auditSlot.replaceChildren(buildAccessDeniedView());
        return;
      }
      throw err;
    }
  }

  const whatIfButton = document.createElement("button");
  whatIfButton.type = "button";
  whatIfButton.dataset.testid = "what-if-resubmit";
  whatIfButton.textContent = "Re-run latest request";
  whatIfButton.addEventListener("click", () => {
    session.whatIf({})
      .then(({ entry, diff }) => {
        decisionSlot.replaceChildren(buildDecisionView(entry.decision, policies));
        diffSlot.replaceChildren(buildDiffView(diff));
      })
      .catch((err) => {
        statusLine.textContent = String(err instanceof Error ? err.message : err);
      });
  });

  const auditButton = document.createElement("button");
  auditButton.type = "button";
  auditButton.dataset.testid = "audit-refresh";
  auditButton.textContent = "Refresh audit trail";
  auditButton.addEventListener("click", () => {
    refreshAudit().catch((err) => {
      statusLine.textContent = String(err instanceof Error ? err.message : err);
    });
  });

  root.replaceChildren(
    form,
    statusLine,
    decisionSlot,
    whatIfButton,
    diffSlot,
    tokenLabel,
    tokenField,
    auditButton,
    auditSlot,
  );
  return { client, session, refreshAudit };
}

export function main(): void {
  const root = document.getElementById("app");
  if (root) {
    initApp(root, new ApiClient(""));
  }
}
