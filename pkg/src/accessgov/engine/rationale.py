"""Rationale assembly: a short human summary plus machine-readable fields.

Rationales are deterministic functions of their inputs; the audit trail hashes
their canonical serialization, so identical decisions hash identically across
processes and replays.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from .model import (
    AggregateScore,
    Control,
    DecisionLabel,
    GateHit,
    Rationale,
    StageVerdict,
)

MAX_SUMMARY_CHARS = 2000


def generate_rationale(
    label: DecisionLabel,
    verdicts: list[StageVerdict],
    gate_hit: Optional[GateHit] = None,
    controls: Optional[list[Control]] = None,
    score: Optional[AggregateScore] = None,
    insufficient_context: bool = False,
    extra_machine_fields: Optional[dict[str, Any]] = None,
) -> Rationale:
    controls = controls or []
    cited = _collect_citations(verdicts, gate_hit)
    regulation_tags = _collect_regulations(verdicts)

    parts: list[str] = []
    if insufficient_context:
        parts.append(
            "Deny: insufficient context. The request lacks a verifiable requester "
            "or any applicable policy, so no assessment is possible."
        )
    elif gate_hit is not None:
        parts.append(f"Deny: policy gate violated ({gate_hit.gate_id}). {gate_hit.message}")
    elif label == DecisionLabel.APPROVE:
        parts.append("Approve: all verification stages passed; no controls required.")
    elif label == DecisionLabel.CONDITIONAL:
        names = ", ".join(c.control_id for c in controls)
        parts.append(f"Conditional approval: access is granted once these controls are in place: {names}.")
    else:
        escalation = _escalation_cause(verdicts)
        if escalation:
            parts.append(f"Deny: escalate. Model assistance was unavailable ({escalation}); "
                         "a human reviewer must assess this request.")
        else:
            parts.append("Deny: escalate. At least one finding has no registered mitigation, "
                         "so the request needs human review.")
    if regulation_tags:
        parts.append("Regulations in scope: " + ", ".join(regulation_tags) + ".")
    if cited:
        parts.append("Cited policies: " + ", ".join(cited) + ".")
    summary = " ".join(parts)
    if len(summary) > MAX_SUMMARY_CHARS:
        summary = summary[: MAX_SUMMARY_CHARS - 3] + "..."

    machine: dict[str, Any] = {
        "decision": label.value,
        "control_ids": [c.control_id for c in controls],
        "regulation_tags": regulation_tags,
    }
    if gate_hit is not None:
        machine["gate_id"] = gate_hit.gate_id
    if insufficient_context:
        machine["reason"] = "insufficient_context"
    if extra_machine_fields:
        machine.update(extra_machine_fields)

    findings: dict[str, str] = {}
    for verdict in verdicts:
        text = verdict.status.value
        if verdict.triggers:
            text += " [" + ", ".join(verdict.triggers) + "]"
        if verdict.notes:
            text += ": " + verdict.notes
        findings[verdict.stage.value] = text

    return Rationale(
        summary=summary,
        cited_policies=cited,
        stage_findings=findings,
        machine_fields=machine,
    )


def _collect_citations(verdicts: list[StageVerdict], gate_hit: Optional[GateHit]) -> list[str]:
    cited: list[str] = []
    if gate_hit is not None and gate_hit.citation:
        cited.append(gate_hit.citation)
    for verdict in verdicts:
        for citation in verdict.citations:
            if citation and citation not in cited:
                cited.append(citation)
    return cited


def _collect_regulations(verdicts: list[StageVerdict]) -> list[str]:
    tags: list[str] = []
    for verdict in verdicts:
        for tag in verdict.signals.get("regulation_tags", []):
            if tag not in tags:
                tags.append(tag)
    return tags


def _escalation_cause(verdicts: list[StageVerdict]) -> Optional[str]:
    for verdict in verdicts:
        if "reasoner_unavailable" in verdict.triggers:
            return str(verdict.signals.get("failure_cause", "unknown"))
    return None


def canonical_rationale_bytes(machine_fields: dict[str, Any], summary: str) -> bytes:
    """Stable byte serialization used for hashing in the audit trail.

    Takes the raw fields rather than a Rationale so any process holding a
    stored record can recompute the digest without reconstructing objects.
    """
    machine = json.dumps(machine_fields, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return (machine + "\n" + summary).encode("utf-8")
