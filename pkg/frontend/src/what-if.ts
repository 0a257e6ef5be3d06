/**
 * What-if replay: edit a prior draft, resubmit, and diff the outcomes.
 *
 * History is session-local by design; every what-if submission is a real
 * decision and lands in the server-side audit trail like any other.
 */

import type { ApiClient } from "./api.js";
import type { DecisionDoc } from "./types.js";
import { draftToBody, type RequestDraft } from "./validation.js";

export interface HistoryEntry {
  draft: RequestDraft;
  decision: DecisionDoc;
}

export interface DecisionDiff {
  label: { before: string; after: string } | null;
  gate: { before: string | null; after: string | null } | null;
  controlsAdded: string[];
  controlsRemoved: string[];
}

export function diffIsEmpty(diff: DecisionDiff): boolean {
  return diff.label === null
    && diff.gate === null
    && diff.controlsAdded.length === 0
    && diff.controlsRemoved.length === 0;
}

/** Compare two decision documents on the axes the viewer surfaces. */
export function diffDecisions(before: DecisionDoc, after: DecisionDoc): DecisionDiff {
  const gateBefore = before.gate_hit?.gate_id ?? null;
  const gateAfter = after.gate_hit?.gate_id ?? null;
  const controlsBefore = new Set(before.controls.map((c) => c.control_id));
  const controlsAfter = new Set(after.controls.map((c) => c.control_id));
  return {
    label: before.label === after.label ? null : { before: before.label, after: after.label },
    gate: gateBefore === gateAfter ? null : { before: gateBefore, after: gateAfter },
    controlsAdded: [...controlsAfter].filter((id) => !controlsBefore.has(id)),
    controlsRemoved: [...controlsBefore].filter((id) => !controlsAfter.has(id)),
  };
}

/** Apply field edits to a draft without mutating the original. */
export function applyEdits(draft: RequestDraft, edits: Partial<RequestDraft>): RequestDraft {
  return { ...draft, ...edits };
}

export class WhatIfSession {
  private readonly client: ApiClient;
  private readonly entries: HistoryEntry[] = [];

  constructor(client: ApiClient) {
    this.client = client;
  }

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  get latest(): HistoryEntry | null {
    return this.entries.length > 0 ? this.entries[this.entries.length - 1]! : null;
  }

  /** Record a decision made through the normal form. */
  remember(draft: RequestDraft, decision: DecisionDoc): void {
    this.entries.push({ draft, decision });
  }

  /**
   * Resubmit the latest draft with edits applied and diff against the prior
   * outcome. Requires a prior decision in session.
   */
  async whatIf(edits: Partial<RequestDraft>): Promise<{
    entry: HistoryEntry;
    diff: DecisionDiff;
  }> {
    const previous = this.latest;
    if (!previous) {
      throw new Error("no prior decision in this session to replay");
    }
    const draft = applyEdits(previous.draft, edits);
    const decision = await this.client.decide(draftToBody(draft));
    const entry: HistoryEntry = { draft, decision };
    this.entries.push(entry);
    return { entry, diff: diffDecisions(previous.decision, decision) };
  }
}

/** Render a diff as DOM; empty diffs say so explicitly. */
export function buildDiffView(diff: DecisionDiff): HTMLElement {
  const root = document.createElement("div");
  root.dataset.testid = "what-if-diff";
  root.className = "what-if-diff";
  if (diffIsEmpty(diff)) {
    const p = document.createElement("p");
    p.dataset.testid = "diff-empty";
    p.textContent = "No change: the decision is identical.";
    root.append(p);
    return root;
  }
  const list = document.createElement("ul");
  if (diff.label) {
    const item = document.createElement("li");
    item.dataset.testid = "diff-label";
    item.textContent = `label: ${diff.label.before} → ${diff.label.after}`;
    list.append(item);
  }
  if (diff.gate) {
    const item = document.createElement("li");
    item.dataset.testid = "diff-gate";
    item.textContent = `gate: ${diff.gate.before ?? "none"} → ${diff.gate.after ?? "none"}`;
    list.append(item);
  }
  if (diff.controlsAdded.length > 0) {
    const item = document.createElement("li");
    item.dataset.testid = "diff-controls-added";
    item.textContent = `controls added: ${diff.controlsAdded.join(", ")}`;
    list.append(item);
  }
  if (diff.controlsRemoved.length > 0) {
    const item = document.createElement("li");
    item.dataset.testid = "diff-controls-removed";
    item.textContent = `controls removed: ${diff.controlsRemoved.join(", ")}`;
    list.append(item);
  }
  root.append(list);
  return root;
}
