from __future__ import annotations

import json

from accessgov.engine.model import (
    Control,
    DecisionLabel,
    GateHit,
    Stage,
    StageStatus,
    StageVerdict,
)
from accessgov.engine.rationale import (
    MAX_SUMMARY_CHARS,
    canonical_rationale_bytes,
    generate_rationale,
)


def _verdict(stage=Stage.CONTEXT, status=StageStatus.PASS, *, triggers=(), signals=None,
             citations=(), notes=""):
    merged = {"triggers": list(triggers)}
    merged.update(signals or {})
    return StageVerdict(stage, status, merged, citations=tuple(citations), notes=notes)


CONTROL = Control(control_id="tokenize_pii", kind="transformation",
                  description="Replace identifiers before use.")


def test_approve_summary():
    rationale = generate_rationale(DecisionLabel.APPROVE, [_verdict()])
    assert rationale.summary.startswith("Approve: all verification stages passed")
    assert rationale.machine_fields["decision"] == "APPROVE"
    assert rationale.machine_fields["control_ids"] == []


def test_conditional_summary_names_controls():
    rationale = generate_rationale(
        DecisionLabel.CONDITIONAL,
        [_verdict(status=StageStatus.UNCERTAIN, triggers=["cross_border_transfer"])],
        controls=[CONTROL],
    )
    assert "tokenize_pii" in rationale.summary
    assert rationale.machine_fields["control_ids"] == ["tokenize_pii"]


def test_gate_deny_summary_names_gate():
    hit = GateHit(gate_id="SoDViolation", message="Requester initiates and approves.",
                  citation="TP5", evidence=(("sod_rule_id", "SOD-T1"),))
    rationale = generate_rationale(DecisionLabel.DENY, [_verdict()], gate_hit=hit)
    assert "SoDViolation" in rationale.summary
    assert rationale.machine_fields["gate_id"] == "SoDViolation"
    assert rationale.cited_policies[0] == "TP5"


def test_escalation_summary_for_unmitigable():
    rationale = generate_rationale(
        DecisionLabel.DENY,
        [_verdict(status=StageStatus.FAIL, triggers=["no_need_to_know"])],
    )
    assert "human review" in rationale.summary


def test_escalation_summary_names_outage_cause():
    rationale = generate_rationale(
        DecisionLabel.DENY,
        [_verdict(status=StageStatus.FAIL, triggers=["reasoner_unavailable"],
                  signals={"failure_cause": "budget_exhausted"})],
    )
    assert "unavailable" in rationale.summary
    assert "budget_exhausted" in rationale.summary


def test_insufficient_context_summary():
    rationale = generate_rationale(DecisionLabel.DENY, [], insufficient_context=True)
    assert "insufficient context" in rationale.summary
    assert rationale.machine_fields["reason"] == "insufficient_context"
    assert rationale.stage_findings == {}


def test_citations_deduplicated_in_order():
    hit = GateHit(gate_id="NoStatedPurpose", message="m", citation="TP4", evidence=())
    verdicts = [
        _verdict(Stage.CONTEXT, StageStatus.FAIL, citations=["TP4", "TP1"]),
        _verdict(Stage.COMPLIANCE, StageStatus.UNCERTAIN, citations=["TP1", "TP2"]),
    ]
    rationale = generate_rationale(DecisionLabel.DENY, verdicts, gate_hit=hit)
    assert rationale.cited_policies == ["TP4", "TP1", "TP2"]
    assert "Cited policies: TP4, TP1, TP2." in rationale.summary


def test_regulation_tags_collected_across_stages():
    verdicts = [
        _verdict(Stage.COMPLIANCE, StageStatus.UNCERTAIN,
                 signals={"regulation_tags": ["GDPR", "HIPAA"]}),
        _verdict(Stage.CONTEXT, StageStatus.PASS, signals={"regulation_tags": ["GDPR"]}),
    ]
    rationale = generate_rationale(DecisionLabel.CONDITIONAL, verdicts, controls=[CONTROL])
    assert rationale.machine_fields["regulation_tags"] == ["GDPR", "HIPAA"]
    assert "Regulations in scope: GDPR, HIPAA." in rationale.summary


def test_stage_findings_capture_status_triggers_and_notes():
    verdicts = [
        _verdict(Stage.BUSINESS_PURPOSE, StageStatus.UNCERTAIN,
                 triggers=["time_bound_missing"], notes="no retention stated"),
    ]
    rationale = generate_rationale(DecisionLabel.CONDITIONAL, verdicts, controls=[CONTROL])
    finding = rationale.stage_findings["BusinessPurpose"]
    assert finding == "Uncertain [time_bound_missing]: no retention stated"


def test_summary_is_capped():
    long_note = "x" * 5000
    verdicts = [_verdict(Stage.CONTEXT, StageStatus.FAIL,
                         triggers=["no_stated_purpose"], citations=[long_note])]
    rationale = generate_rationale(DecisionLabel.DENY, verdicts)
    assert len(rationale.summary) == MAX_SUMMARY_CHARS
    assert rationale.summary.endswith("...")


class TestCanonicalBytes:
    def test_key_order_does_not_matter(self):
        a = canonical_rationale_bytes({"b": 1, "a": [2, 3]}, "s")
        b = canonical_rationale_bytes({"a": [2, 3], "b": 1}, "s")
        assert a == b

    def test_summary_separated_from_fields(self):
        fields = {"decision": "Deny"}
        data = canonical_rationale_bytes(fields, "line two")
        machine, _, summary = data.partition(b"\n")
        assert json.loads(machine) == fields
        assert summary == b"line two"

    def test_compact_and_utf8(self):
        data = canonical_rationale_bytes({"k": "vé"}, "résumé")
        assert b'{"k":"v\xc3\xa9"}' == data.split(b"\n")[0]
        assert data.decode("utf-8")

    def test_value_changes_change_bytes(self):
        base = canonical_rationale_bytes({"decision": "Approve"}, "s")
        assert canonical_rationale_bytes({"decision": "Deny"}, "s") != base
        assert canonical_rationale_bytes({"decision": "Approve"}, "t") != base
