from __future__ import annotations

from typing import Any

import pytest

from accessgov.engine.model import Stage, StageStatus
from accessgov.engine.policy import Policy, PolicyStore
from accessgov.engine.stages import (
    stage_business_purpose,
    stage_compliance,
    stage_context,
    stage_data_classification,
    stage_user_validation,
)
from accessgov.reasoner.base import Reasoner, ReasonerUnavailable, ReasonerVerdict
from accessgov.reasoner.rule import RuleReasoner

from conftest import make_request


class StubReasoner(Reasoner):
    tag = "stub"

    def __init__(self, verdict: ReasonerVerdict | None = None, fail_with: str | None = None):
        super().__init__()
        self.verdict = verdict or ReasonerVerdict()
        self.fail_with = fail_with

    def interpret(self, stage, request, policy_snippets, metadata):
        if self.fail_with:
            raise ReasonerUnavailable(self.fail_with, "stubbed outage")
        return self.verdict


def _run_stage3(org, request):
    return stage_data_classification(request, org.catalog)


class TestContextStage:
    def test_clear_purpose_passes(self, tech_org):
        request = make_request("u_ana", "prod_metrics_public", "Monthly analytics review")
        verdict = stage_context(request, tech_org.policies, RuleReasoner(), tech_org.catalog)
        assert verdict.status is StageStatus.PASS
        assert verdict.signals["purpose_category"] == "analytics_modeling"

    def test_empty_purpose_fails_regardless_of_reasoner(self, tech_org):
        lenient = StubReasoner(ReasonerVerdict(status=StageStatus.PASS))
        request = make_request("u_ana", "prod_metrics_public", "   ")
        verdict = stage_context(request, tech_org.policies, lenient, tech_org.catalog)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["no_stated_purpose"]

    def test_vague_purpose_uncertain_with_control(self, tech_org):
        request = make_request("u_sam", "customer_master", "Need all customer data for a project")
        verdict = stage_context(request, tech_org.policies, RuleReasoner(), tech_org.catalog)
        assert verdict.status is StageStatus.UNCERTAIN
        assert verdict.triggers == ["purpose_unclear"]
        assert [c.control_id for c in verdict.proposed_controls] == ["approval_required"]

    def test_conflicting_policy_scopes_fail(self, tech_org):
        store = PolicyStore([
            Policy(policy_id="A1", title="t", text="x", scope_tags=("all",),
                   conflicts_with=("B2",)),
            Policy(policy_id="B2", title="t", text="y", scope_tags=("all",)),
        ])
        request = make_request("u_ana", "prod_metrics_public", "Monthly analytics review")
        verdict = stage_context(request, store, None, tech_org.catalog)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["policy_scope_conflict"]
        assert verdict.citations == ["A1", "B2"]

    def test_scripted_status_is_adopted(self, tech_org):
        scripted = StubReasoner(ReasonerVerdict(
            status=StageStatus.UNCERTAIN,
            entities={"triggers": ["purpose_unclear"], "proposed_control_ids": ["approval_required"]},
        ))
        request = make_request("u_ana", "prod_metrics_public", "Monthly analytics review")
        verdict = stage_context(request, tech_org.policies, scripted, tech_org.catalog)
        assert verdict.status is StageStatus.UNCERTAIN
        assert verdict.triggers == ["purpose_unclear"]

    def test_reasoner_outage_escalates(self, tech_org):
        request = make_request("u_ana", "prod_metrics_public", "Monthly analytics review")
        verdict = stage_context(request, tech_org.policies,
                                StubReasoner(fail_with="timeout"), tech_org.catalog)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["reasoner_unavailable"]
        assert "timeout" in verdict.notes


class TestUserValidationStage:
    def test_known_active_user_passes(self, tech_org):
        request = make_request("u_ana", "prod_metrics_public", "x")
        verdict = stage_user_validation(request, tech_org.catalog)
        assert verdict.status is StageStatus.PASS
        assert verdict.signals["identity_verified"] is True

    def test_unknown_user_fails(self, tech_org):
        request = make_request("ghost", "prod_metrics_public", "x")
        verdict = stage_user_validation(request, tech_org.catalog)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["identity_unverified"]

    def test_inactive_user_fails(self, tech_org):
        request = make_request("u_former", "prod_metrics_public", "x")
        verdict = stage_user_validation(request, tech_org.catalog)
        assert verdict.status is StageStatus.FAIL

    def test_sod_conflict_fails_with_citation(self, tech_org):
        request = make_request("u_pay", "payment_approvals", "Operations review")
        verdict = stage_user_validation(request, tech_org.catalog)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["sod_conflict"]
        assert verdict.signals["sod_rule_id"] == "SOD-T1"
        assert verdict.citations == ["TP5"]


class TestDataClassificationStage:
    def test_known_dataset_passes_with_signals(self, tech_org):
        request = make_request("u_ana", "transactions_2024", "x")
        verdict = _run_stage3(tech_org, request)
        assert verdict.status is StageStatus.PASS
        assert verdict.signals["effective_sensitivity"] == "Confidential"
        assert verdict.signals["pii_present"] is True
        assert "pii_financial" in verdict.signals["composition_flags"]

    def test_unknown_dataset_fails(self, tech_org):
        request = make_request("u_ana", "no_such_dataset", "x")
        verdict = _run_stage3(tech_org, request)
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["unknown_dataset"]


class TestBusinessPurposeStage:
    def _signals(self, org, request, reasoner=None) -> dict[str, Any]:
        ctx = stage_context(request, org.policies, reasoner or RuleReasoner(), org.catalog)
        merged = dict(ctx.signals)
        merged.pop("triggers", None)
        return merged

    def test_allowed_purpose_passes(self, tech_org):
        request = make_request("u_ana", "prod_metrics_public",
                               "Monthly analytics review", retention=30)
        verdict = stage_business_purpose(
            request, self._signals(tech_org, request), tech_org.catalog,
            RuleReasoner(), tech_org.policies,
        )
        assert verdict.status is StageStatus.PASS
        assert verdict.signals["need_to_know"] is True

    def test_purpose_not_in_allowlist_fails(self, fin_org):
        request = make_request("f_mkt", "salary_table",
                               "Q4 marketing campaign audience planning", retention=30)
        verdict = stage_business_purpose(
            request, self._signals(fin_org, request), fin_org.catalog,
            RuleReasoner(), fin_org.policies,
        )
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["no_need_to_know"]

    def test_department_restriction_enforced(self, tech_org):
        # customer_master allows only product_analytics and customer_success.
        request = make_request("u_mkt", "customer_master",
                               "Subscriber segment report for leadership", retention=30)
        verdict = stage_business_purpose(
            request, self._signals(tech_org, request), tech_org.catalog,
            RuleReasoner(), tech_org.policies,
        )
        assert verdict.status is StageStatus.FAIL
        assert verdict.signals["department_allowed"] is False

    def test_missing_time_bound_is_uncertain(self, fin_org):
        request = make_request("f_fin", "sales_history",
                               "Historical sales trend analysis for annual planning")
        verdict = stage_business_purpose(
            request, self._signals(fin_org, request), fin_org.catalog,
            RuleReasoner(), fin_org.policies,
        )
        assert verdict.status is StageStatus.UNCERTAIN
        assert verdict.triggers == ["time_bound_missing"]
        assert [c.control_id for c in verdict.proposed_controls] == ["time_boxed_access"]

    def test_retention_parsed_from_purpose_text(self, fin_org):
        request = make_request("f_fin", "sales_history",
                               "Historical sales trend analysis, keep for 30 days")
        verdict = stage_business_purpose(
            request, self._signals(fin_org, request), fin_org.catalog,
            RuleReasoner(), fin_org.policies,
        )
        assert verdict.status is StageStatus.PASS
        assert verdict.signals["time_bound_present"] is True


class TestComplianceStage:
    def _stage3_signals(self, org, request):
        verdict = _run_stage3(org, request)
        merged = dict(verdict.signals)
        merged.pop("triggers", None)
        return merged

    def _with_purpose(self, org, request, signals):
        ctx = stage_context(request, org.policies, RuleReasoner(), org.catalog)
        signals = dict(signals)
        signals["purpose_category"] = ctx.signals["purpose_category"]
        return signals

    def test_health_data_maps_to_hipaa(self, hc_org):
        request = make_request("h_eng", "patient_records",
                               "Urgent incident fix for medication dosing outage", retention=7)
        signals = self._with_purpose(hc_org, request, self._stage3_signals(hc_org, request))
        verdict = stage_compliance(request, signals, hc_org.policies, hc_org.catalog, RuleReasoner())
        assert verdict.status is StageStatus.UNCERTAIN
        assert "health_data_access" in verdict.triggers
        assert verdict.signals["regulation_tags"] == ["HIPAA"]
        assert [c.control_id for c in verdict.proposed_controls] == [
            "time_boxed_access", "enhanced_logging", "approval_required",
        ]

    def test_pii_cross_border_maps_to_gdpr(self, tech_org):
        request = make_request("u_mkt", "eu_engagement",
                               "Regional marketing campaign planning", retention=30,
                               sharing="cross_border", destination_region="us")
        signals = self._with_purpose(tech_org, request, self._stage3_signals(tech_org, request))
        verdict = stage_compliance(request, signals, tech_org.policies, tech_org.catalog,
                                   RuleReasoner())
        assert "cross_border_transfer" in verdict.triggers
        assert "GDPR" in verdict.signals["regulation_tags"]
        assert {c.control_id for c in verdict.proposed_controls} >= {"tokenize_pii", "dpo_review"}

    def test_sox_for_confidential_financial(self, fin_org):
        request = make_request("f_aud", "fin_reporting_db",
                               "Quarterly SOX audit evidence collection", retention=90)
        signals = self._with_purpose(fin_org, request, self._stage3_signals(fin_org, request))
        verdict = stage_compliance(request, signals, fin_org.policies, fin_org.catalog,
                                   RuleReasoner())
        assert verdict.triggers == ["sox_financial"]
        assert verdict.signals["regulation_tags"] == ["SOX"]

    def test_unmatched_sensitive_request_is_mapping_gap(self, tech_org):
        # Confidential PII dataset, internal sharing, non-modeling purpose:
        # no mapping rule applies, so the stage must escalate instead of passing.
        request = make_request("u_ana", "customer_master",
                               "Customer segment report for leadership", retention=30)
        signals = self._with_purpose(tech_org, request, self._stage3_signals(tech_org, request))
        verdict = stage_compliance(request, signals, tech_org.policies, tech_org.catalog,
                                   RuleReasoner())
        assert verdict.status is StageStatus.UNCERTAIN
        assert verdict.triggers == ["compliance_mapping_gap"]

    def test_low_sensitivity_no_match_passes(self, tech_org):
        request = make_request("u_sam", "ops_tickets",
                               "Support operations dashboard", retention=30)
        signals = self._with_purpose(tech_org, request, self._stage3_signals(tech_org, request))
        verdict = stage_compliance(request, signals, tech_org.policies, tech_org.catalog,
                                   RuleReasoner())
        assert verdict.status is StageStatus.PASS
        assert verdict.triggers == []

    def test_scripted_verdict_adopted_verbatim(self, hc_org):
        scripted = StubReasoner(ReasonerVerdict(
            status=StageStatus.UNCERTAIN,
            entities={
                "triggers": ["cross_border_transfer"],
                "proposed_control_ids": ["tokenize_pii", "dpo_review"],
                "regulation_tags": ["GDPR"],
            },
        ))
        request = make_request("h_dpo", "patient_records", "GDPR data subject request export",
                               retention=30, sharing="cross_border", destination_region="eu")
        verdict = stage_compliance(request, {}, hc_org.policies, hc_org.catalog, scripted)
        assert verdict.signals["regulation_tags"] == ["GDPR"]
        assert verdict.triggers == ["cross_border_transfer"]

    def test_outage_escalates(self, hc_org):
        request = make_request("h_eng", "patient_records", "Urgent incident fix", retention=7)
        verdict = stage_compliance(request, {}, hc_org.policies, hc_org.catalog,
                                   StubReasoner(fail_with="circuit_open"))
        assert verdict.status is StageStatus.FAIL
        assert verdict.triggers == ["reasoner_unavailable"]


def test_stage_enum_order_matches_pipeline():
    assert [s.value for s in Stage] == [
        "Context", "UserValidation", "DataClassification", "BusinessPurpose", "Compliance",
    ]
