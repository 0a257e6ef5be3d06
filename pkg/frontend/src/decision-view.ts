/**
 * Decision viewer: renders a decision document into DOM.
 *
 * Every label, gate, and control shown here comes straight out of the API
 * response. The only client-side vocabulary is the display-string tables
 * below, keyed by the API's own enum values; an unknown value falls back to
 * rendering the raw string rather than guessing.
 */

import type { ControlDoc, DecisionDoc, GateHitDoc, PolicyDoc, StageVerdictDoc } from "./types.js";

const LABEL_TEXT: Record<string, string> = {
  APPROVE: "Approved",
  CONDITIONAL: "Approved with controls",
  DENY: "Denied",
};

const STATUS_TEXT: Record<string, string> = {
  Pass: "pass",
  Uncertain: "uncertain",
  Fail: "fail",
};

export function labelText(apiValue: string): string {
  return LABEL_TEXT[apiValue] ?? apiValue;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  testId: string | null,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (testId) {
    node.dataset.testid = testId;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function labelBadge(doc: DecisionDoc): HTMLElement {
  const badge = el("span", "label-badge", labelText(doc.label));
  badge.dataset.label = doc.label;
  badge.dataset.labelCode = doc.label_code;
  badge.className = `badge badge-${doc.label.toLowerCase()}`;
  return badge;
}

function rawVsFinal(doc: DecisionDoc): HTMLElement {
  const node = el("p", "raw-vs-final");
  node.dataset.raw = doc.raw_label;
  node.dataset.final = doc.label;
  node.textContent = doc.raw_label === doc.label
    ? `Pre-gate and final labels agree: ${labelText(doc.label)}.`
    : `Pre-gate label ${labelText(doc.raw_label)} was overridden to ${labelText(doc.label)} by a policy gate.`;
  return node;
}

function gateBanner(gate: GateHitDoc): HTMLElement {
  const banner = el("div", "gate-banner");
  banner.className = "gate-banner";
  banner.setAttribute("role", "alert");
  banner.dataset.gateId = gate.gate_id;
  banner.append(el("strong", "gate-id", gate.gate_id));
  banner.append(el("p", "gate-message", gate.message));
  if (gate.citation) {
    banner.append(el("p", "gate-citation", `Policy: ${gate.citation}`));
  }
  if (gate.evidence.length > 0) {
    const list = el("dl", "gate-evidence");
    for (const [key, value] of gate.evidence) {
      list.append(el("dt", null, key));
      list.append(el("dd", null, JSON.stringify(value)));
    }
    banner.append(list);
  }
  return banner;
}

function stageList(trace: StageVerdictDoc[], findings: Record<string, string>): HTMLElement {
  const list = el("ul", "stage-list");
  for (const verdict of trace) {
    const item = el("li", `stage-${verdict.stage}`);
    item.dataset.status = verdict.status;
    const heading = el("strong", null, `${verdict.stage}: ${STATUS_TEXT[verdict.status] ?? verdict.status}`);
    item.append(heading);
    const finding = findings[verdict.stage];
    if (finding) {
      item.append(el("p", null, finding));
    }
    if (verdict.notes) {
      item.append(el("p", null, verdict.notes));
    }
    if (verdict.citations.length > 0) {
      item.append(el("p", null, `cites ${verdict.citations.join(", ")}`));
    }
    list.append(item);
  }
  return list;
}

function controlsChecklist(controls: ControlDoc[]): HTMLElement {
  const wrapper = el("div", "controls-checklist");
  if (controls.length === 0) {
    wrapper.append(el("p", "controls-empty", "No controls attached."));
    return wrapper;
  }
  const list = el("ul", null);
  for (const control of controls) {
    const item = el("li", `control-${control.control_id}`);
    const label = el("label", null);
    const checkbox = el("input", null);
    checkbox.type = "checkbox";
    checkbox.value = control.control_id;
    label.append(checkbox, ` ${control.control_id} (${control.kind}): ${control.description}`);
    item.append(label);
    list.append(item);
  }
  wrapper.append(list);
  return wrapper;
}

function citedPolicies(ids: string[], policies: Map<string, PolicyDoc>): HTMLElement {
  const wrapper = el("div", "cited-policies");
  if (ids.length === 0) {
    wrapper.append(el("p", null, "No policies cited."));
    return wrapper;
  }
  for (const id of ids) {
    const details = el("details", `policy-${id}`);
    const policy = policies.get(id);
    details.append(el("summary", null, policy ? `${id}: ${policy.title}` : id));
    details.append(el("p", null, policy ? policy.text : "Policy text unavailable."));
    wrapper.append(details);
  }
  return wrapper;
}

/** Build the full decision view; renders every field the document carries. */
export function buildDecisionView(
  doc: DecisionDoc,
  policies: Map<string, PolicyDoc> = new Map(),
): HTMLElement {
  const root = el("section", "decision-view");
  root.className = "decision-view";
  root.dataset.requestId = doc.request_id;

  const header = el("header", null);
  header.append(labelBadge(doc));
  header.append(el("span", "request-id", ` request ${doc.request_id}`));
  root.append(header);

  root.append(rawVsFinal(doc));
  if (doc.gate_hit) {
    root.append(gateBanner(doc.gate_hit));
  }

  root.append(el("p", "summary", doc.rationale.summary));
  root.append(controlsChecklist(doc.controls));
  root.append(citedPolicies(doc.rationale.cited_policies, policies));

  if (doc.stage_trace.length > 0) {
    root.append(stageList(doc.stage_trace, doc.rationale.stage_findings));
  } else {
    root.append(el("p", "stage-empty", "No stage trace recorded for this decision."));
  }

  if (doc.score) {
    root.append(el(
      "p",
      "score",
      `uncertain stages: ${doc.score.uncertainty}, mitigable: ${doc.score.mitigable}`,
    ));
  }

  const footer = el("footer", null);
  footer.append(el("span", "latency", `decided in ${doc.latency_ms} ms`));
  if (doc.audit_seq !== undefined) {
    footer.append(el("span", "audit-seq", ` audit #${doc.audit_seq}`));
  }
  root.append(footer);

  const machine = el("details", "machine-fields");
  machine.append(el("summary", null, "Machine-readable rationale"));
  machine.append(el("pre", null, JSON.stringify(doc.rationale.machine_fields, null, 2)));
  root.append(machine);

  return root;
}
