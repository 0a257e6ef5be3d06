// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import type { DecisionDoc } from "../src/types.js";
import { emptyDraft, type RequestDraft } from "../src/validation.js";
import {
  applyEdits,
  buildDiffView,
  diffDecisions,
  diffIsEmpty,
  WhatIfSession,
} from "../src/what-if.js";

function doc(overrides: Partial<DecisionDoc> = {}): DecisionDoc {
  return {
    request_id: "r",
    label: "DENY",
    label_code: "D",
    raw_label: "CONDITIONAL",
    rationale: { summary: "", cited_policies: [], stage_findings: {}, machine_fields: {} },
    controls: [],
    gate_hit: {
      gate_id: "ExternalSharingNoAgreement",
      message: "",
      citation: "TP4",
      evidence: [],
    },
    stage_trace: [],
    score: null,
    latency_ms: 1,
    ...overrides,
  };
}

function control(id: string) {
  return { control_id: id, kind: "procedural", description: "", params: {} };
}

describe("diffDecisions", () => {
  it("is empty for identical outcomes", () => {
    const diff = diffDecisions(doc(), doc());
    expect(diffIsEmpty(diff)).toBe(true);
  });

  it("captures a label flip with the gate clearing", () => {
    const after = doc({
      label: "CONDITIONAL",
      label_code: "C",
      gate_hit: null,
      controls: [control("dsa_required")],
    });
    const diff = diffDecisions(doc(), after);
    expect(diff.label).toEqual({ before: "DENY", after: "CONDITIONAL" });
    expect(diff.gate).toEqual({ before: "ExternalSharingNoAgreement", after: null });
    expect(diff.controlsAdded).toEqual(["dsa_required"]);
    expect(diff.controlsRemoved).toEqual([]);
  });

  it("reports removed controls symmetrically", () => {
    const before = doc({ label: "CONDITIONAL", gate_hit: null, controls: [control("tokenize_pii")] });
    const after = doc({ label: "CONDITIONAL", gate_hit: null, controls: [] });
    const diff = diffDecisions(before, after);
    expect(diff.label).toBeNull();
    expect(diff.controlsRemoved).toEqual(["tokenize_pii"]);
  });
});

describe("applyEdits", () => {
  it("returns a new draft and leaves the original untouched", () => {
    const base: RequestDraft = { ...emptyDraft(), requester_id: "u_mkt", external_party: "acme_ads" };
    const edited = applyEdits(base, { external_party: "trusted_analytics" });
    expect(edited.external_party).toBe("trusted_analytics");
    expect(edited.requester_id).toBe("u_mkt");
    expect(base.external_party).toBe("acme_ads");
  });
});

describe("WhatIfSession", () => {
  function fakeClient(responses: DecisionDoc[]): ApiClient {
    const queue = [...responses];
    return {
      decide: async () => {
        const next = queue.shift();
        if (!next) throw new Error("no scripted response left");
        return next;
      },
    } as unknown as ApiClient;
  }

  it("starts every session with empty history", () => {
    const session = new WhatIfSession(fakeClient([]));
    expect(session.history).toHaveLength(0);
    expect(session.latest).toBeNull();
  });

  it("refuses a what-if without a prior decision", async () => {
    const session = new WhatIfSession(fakeClient([]));
    await expect(session.whatIf({})).rejects.toThrow(/no prior decision/);
  });

  it("resubmits the edited draft and diffs against the prior outcome", async () => {
    const flipped = doc({ label: "CONDITIONAL", gate_hit: null, controls: [control("dsa_required")] });
    const session = new WhatIfSession(fakeClient([flipped]));
    session.remember({ ...emptyDraft(), requester_id: "u_mkt" }, doc());

    const { entry, diff } = await session.whatIf({ external_party: "trusted_analytics" });
    expect(entry.draft.external_party).toBe("trusted_analytics");
    expect(diff.label).toEqual({ before: "DENY", after: "CONDITIONAL" });
    expect(session.history).toHaveLength(2);
    expect(session.latest?.decision.label).toBe("CONDITIONAL");
  });

  it("produces an empty diff when nothing changed", async () => {
    const session = new WhatIfSession(fakeClient([doc()]));
    session.remember(emptyDraft(), doc());
    const { diff } = await session.whatIf({});
    expect(diffIsEmpty(diff)).toBe(true);
  });
});

describe("buildDiffView", () => {
  it("says so when the diff is empty", () => {
    const view = buildDiffView(diffDecisions(doc(), doc()));
    expect(view.querySelector("[data-testid=diff-empty]")?.textContent).toContain("identical");
  });

  it("lists label, gate, and control changes", () => {
    const after = doc({ label: "CONDITIONAL", gate_hit: null, controls: [control("dsa_required")] });
    const view = buildDiffView(diffDecisions(doc(), after));
    expect(view.querySelector("[data-testid=diff-label]")?.textContent).toContain("DENY");
    expect(view.querySelector("[data-testid=diff-label]")?.textContent).toContain("CONDITIONAL");
    expect(view.querySelector("[data-testid=diff-gate]")?.textContent).toContain("none");
    expect(view.querySelector("[data-testid=diff-controls-added]")?.textContent).toContain("dsa_required");
  });
});
