"""Deterministic synthetic organizations for demos, tests, and benchmarks.

generate_synthetic_org(sector, seed) is a pure function: the same arguments
always produce the same org document byte for byte. Entity ids are fixed per
sector so fixtures can reference them; the seed varies only cosmetic surface
such as display names and the org id suffix.
"""

from __future__ import annotations

import random
from typing import Any

from .load import OrgSpec, parse_org
from .model import CatalogError, FieldCategory, SensitivityLabel

SECTORS = ("finance", "healthcare", "technology")

_NAME_POOL = (
    "Alex Rivera", "Sam Chen", "Jordan Patel", "Morgan Diaz", "Casey Kim",
    "Riley Novak", "Quinn Baker", "Avery Silva", "Dana Ross", "Jamie Fox",
    "Robin Hale", "Drew Santos", "Parker Lane", "Emery Stone", "Reese Vo",
)


def _ds(dataset_id: str, name: str, sensitivity: str, region: str, retention: int,
        tags: list[str], purposes: list[str], fields: list[tuple[str, str, str]],
        departments: list[str] | None = None) -> dict[str, Any]:
    return {
        "dataset_id": dataset_id,
        "name": name,
        "sensitivity": sensitivity,
        "region": region,
        "max_retention_days": retention,
        "scope_tags": tags,
        "allowed_purposes": purposes,
        "allowed_departments": departments or [],
        "fields": [{"name": n, "category": c, "label": l} for n, c, l in fields],
    }


def _user(user_id: str, role: str, department: str, clearance: str, active: bool = True) -> dict[str, Any]:
    return {
        "user_id": user_id,
        "display_name": "",
        "role": role,
        "department": department,
        "clearance": clearance,
        "active": active,
    }


def _policies(prefix: str, protection_scope: list[str], export_scope: list[str],
              sharing_scope: list[str], finance_scope: list[str]) -> list[dict[str, Any]]:
    return [
        {
            "policy_id": f"{prefix}1",
            "title": "PII modeling protection",
            "text": "Direct identifiers must be tokenized or aggregated before any model training use.",
            "scope_tags": protection_scope + ["pii_modeling_protection"],
            "gate_tags": ["PiiModelingNoProtection"],
        },
        {
            "policy_id": f"{prefix}2",
            "title": "Cross-border transfer approval",
            "text": "Transfers that leave the source region require data protection officer approval on file.",
            "scope_tags": export_scope,
            "gate_tags": ["CrossBorderNoDpoApproval"],
        },
        {
            "policy_id": f"{prefix}3",
            "title": "External sharing agreements",
            "text": "External recipients need a signed data sharing agreement; processors also need a data processing agreement.",
            "scope_tags": sharing_scope,
            "gate_tags": ["ExternalSharingNoAgreement", "ThirdPartyNoDpa"],
        },
        {
            "policy_id": f"{prefix}4",
            "title": "Purpose specification",
            "text": "Every request must state a specific business purpose and fall under at least one applicable policy.",
            "scope_tags": ["all"],
            "gate_tags": ["NoStatedPurpose", "NoPolicyContext"],
        },
        {
            "policy_id": f"{prefix}5",
            "title": "Identity and separation of duties",
            "text": "Requesters must be active, hold a role, and must not combine duties that conflict.",
            "scope_tags": ["all"],
            "gate_tags": ["MissingIdentityOrRole", "SoDViolation"],
        },
        {
            "policy_id": f"{prefix}6",
            "title": "Retention limits",
            "text": "Declared retention may not exceed the dataset's maximum retention window.",
            "scope_tags": ["all"],
            "gate_tags": ["RetentionBeyondPolicy"],
        },
        {
            "policy_id": f"{prefix}7",
            "title": "Financial data clearance",
            "text": "Restricted financial records require Restricted clearance and audit logging.",
            "scope_tags": finance_scope,
            "gate_tags": ["RestrictedFinanceNoClearance"],
        },
    ]


def _technology_doc() -> dict[str, Any]:
    return {
        "sector": "technology",
        "datasets": [
            _ds("prod_metrics_public", "Product adoption metrics", "Public", "us", 365,
                ["product", "metrics"], ["analytics_modeling", "reporting"],
                [("page_views", "public_metric", "Public"), ("adoption_rate", "public_metric", "Public")]),
            _ds("ops_tickets", "Support ticket rollups", "Internal", "us", 180,
                ["operations"], ["reporting", "operations"],
                [("ticket_volume", "operational", "Internal"), ("queue_time", "operational", "Internal")]),
            _ds("customer_master", "Customer master records", "Confidential", "us", 365,
                ["customer_data", "pii"], ["reporting", "data_subject_request"],
                [("email", "pii", "Confidential"), ("full_name", "pii", "Confidential"),
                 ("segment", "operational", "Internal")],
                departments=["product_analytics", "customer_success"]),
            _ds("transactions_2024", "Card transactions 2024", "Confidential", "us", 365,
                ["transactions", "customer_data", "pii"], ["analytics_modeling", "reporting"],
                [("card_token", "pii", "Confidential"), ("amount", "financial", "Confidential"),
                 ("merchant_location", "location", "Internal")]),
            _ds("subscriber_usage", "Subscriber usage extract", "Confidential", "us", 180,
                ["customer_data", "pii", "sharing"], ["marketing", "reporting", "analytics_modeling"],
                [("account_email", "pii", "Confidential"), ("usage_hours", "operational", "Internal")]),
            _ds("eu_engagement", "EU engagement metrics", "Confidential", "eu", 90,
                ["customer_data", "pii", "export"], ["marketing", "reporting"],
                [("user_email", "pii", "Confidential"), ("engagement_score", "operational", "Internal")]),
            _ds("sales_daily", "Daily sales rollup", "Internal", "us", 365,
                ["sales"], ["reporting", "analytics_modeling"],
                [("revenue", "financial", "Internal"), ("units_sold", "operational", "Internal")]),
            _ds("payment_approvals", "Vendor payment approvals", "Restricted", "us", 365,
                ["finance", "payments"], ["operations", "compliance_audit"],
                [("vendor_account", "financial", "Restricted"), ("approval_amount", "financial", "Restricted")]),
            _ds("beta_signups", "Beta program signups", "Confidential", "us", 90,
                ["beta"], ["analytics_modeling", "marketing"],
                [("signup_email", "pii", "Confidential")]),
        ],
        "users": [
            _user("u_ana", "data_analyst", "product_analytics", "Confidential"),
            _user("u_sam", "support_lead", "support", "Internal"),
            _user("u_mkt", "marketing_manager", "marketing", "Internal"),
            _user("u_pay", "payment_initiator", "finance_ops", "Confidential"),
            _user("u_sec", "security_engineer", "security", "Restricted"),
            _user("u_former", "contractor", "engineering", "Internal", active=False),
        ],
        "sod_rules": [
            {"rule_id": "SOD-T1", "a": "payment_initiator", "b": "payment_approvals", "citation": "TP5"},
            {"rule_id": "SOD-T2", "a": "release_engineer", "b": "deploy_approval", "citation": "TP5"},
        ],
        "agreements": {
            "parties": [
                {"party_id": "acme_ads", "kind": "recipient", "has_dsa": False, "has_dpa": False},
                {"party_id": "cloudproc", "kind": "processor", "has_dsa": True, "has_dpa": False},
                {"party_id": "trusted_analytics", "kind": "recipient", "has_dsa": True, "has_dpa": True},
            ],
            "region_pairs": [
                {"from_region": "us", "to_region": "eu", "dpo_approval_on_file": True},
                {"from_region": "eu", "to_region": "us", "dpo_approval_on_file": True},
                {"from_region": "us", "to_region": "apac", "dpo_approval_on_file": False},
            ],
        },
        "policies": _policies("TP", ["pii"], ["export", "customer_data"],
                              ["sharing", "customer_data"], ["finance", "payments"]),
    }


def _finance_doc() -> dict[str, Any]:
    return {
        "sector": "finance",
        "datasets": [
            _ds("market_prices_public", "Published market prices", "Public", "us", 365,
                ["markets"], ["reporting", "analytics_modeling"],
                [("index_close", "public_metric", "Public")]),
            _ds("salary_table", "Employee salary table", "Confidential", "us", 365,
                ["hr", "payroll", "pii"], ["compliance_audit", "reporting"],
                [("employee_name", "pii", "Confidential"), ("base_salary", "financial", "Confidential")],
                departments=["hr", "finance"]),
            _ds("profit_margins", "Product profit margins", "Restricted", "us", 365,
                ["finance"], ["reporting", "compliance_audit"],
                [("product_margin", "financial", "Restricted"), ("unit_cost", "financial", "Restricted")]),
            _ds("budget_summary", "Quarterly budget summary", "Internal", "us", 180,
                ["finance"], ["reporting"],
                [("variance_pct", "financial", "Internal"), ("cost_center", "operational", "Internal")]),
            _ds("sales_history", "Monthly sales history", "Internal", "us", 730,
                ["sales"], ["reporting", "analytics_modeling"],
                [("monthly_revenue", "financial", "Internal"), ("region_code", "operational", "Internal")]),
            _ds("fin_reporting_db", "Financial reporting ledger", "Confidential", "us", 365,
                ["finance", "sox"], ["compliance_audit"],
                [("ledger_ref", "financial", "Confidential"), ("control_id", "operational", "Internal")]),
            _ds("trade_approvals", "Trade approval queue", "Restricted", "us", 365,
                ["finance", "payments"], ["operations"],
                [("trade_account", "financial", "Restricted")]),
            _ds("client_contacts", "Client contact list", "Confidential", "us", 365,
                ["crm"], ["marketing", "analytics_modeling"],
                [("client_email", "pii", "Confidential")]),
        ],
        "users": [
            _user("f_mkt", "marketing_specialist", "marketing", "Internal"),
            _user("f_fin", "financial_analyst", "finance", "Confidential"),
            _user("f_aud", "internal_auditor", "audit", "Confidential"),
            _user("f_ops", "operations_manager", "operations", "Internal"),
            _user("f_trd", "trade_initiator", "trading", "Confidential"),
            _user("f_old", "partner", "finance", "Internal", active=False),
        ],
        "sod_rules": [
            {"rule_id": "SOD-F1", "a": "trade_initiator", "b": "trade_approvals", "citation": "FP5"},
            {"rule_id": "SOD-F2", "a": "expense_approver", "b": "expense_submission", "citation": "FP5"},
        ],
        "agreements": {
            "parties": [
                {"party_id": "audit_partners", "kind": "recipient", "has_dsa": True, "has_dpa": True},
                {"party_id": "offshore_proc", "kind": "processor", "has_dsa": True, "has_dpa": False},
                {"party_id": "adtech_list_co", "kind": "recipient", "has_dsa": False, "has_dpa": False},
            ],
            "region_pairs": [
                {"from_region": "us", "to_region": "eu", "dpo_approval_on_file": True},
                {"from_region": "us", "to_region": "apac", "dpo_approval_on_file": False},
            ],
        },
        "policies": _policies("FP", ["pii"], ["export"], ["sharing"],
                              ["finance", "payroll", "sox"]),
    }


def _healthcare_doc() -> dict[str, Any]:
    return {
        "sector": "healthcare",
        "datasets": [
            _ds("wellness_tips_public", "Published wellness articles", "Public", "us", 365,
                ["wellness"], ["reporting", "marketing"],
                [("article_views", "public_metric", "Public")]),
            _ds("staffing_roster", "Clinic staffing roster", "Internal", "us", 180,
                ["operations"], ["operations", "reporting"],
                [("shift_count", "operational", "Internal")]),
            _ds("patient_records", "Patient medical records", "Restricted", "us", 180,
                ["patients", "health", "pii"],
                ["incident_response", "compliance_audit", "data_subject_request"],
                [("patient_name", "pii", "Restricted"), ("diagnosis_code", "health", "Restricted"),
                 ("admission_location", "location", "Confidential")]),
            _ds("clinical_notes", "Clinical notes metadata", "Confidential", "us", 365,
                ["patients", "health"], ["incident_response", "compliance_audit"],
                [("note_meta", "health", "Confidential"), ("author_role", "operational", "Internal")]),
            _ds("billing_claims", "Insurance billing claims", "Restricted", "us", 365,
                ["billing", "finance"], ["compliance_audit", "operations"],
                [("claim_amount", "financial", "Restricted"), ("payer_id", "operational", "Internal")]),
            _ds("research_cohort", "Research cohort roster", "Confidential", "us", 365,
                ["research"], ["analytics_modeling"],
                [("subject_email", "pii", "Confidential"), ("cohort_flag", "operational", "Internal")]),
        ],
        "users": [
            _user("h_eng", "reliability_engineer", "platform", "Confidential"),
            _user("h_dev", "app_developer", "product", "Internal"),
            _user("h_dpo", "privacy_officer", "privacy", "Restricted"),
            _user("h_bil", "claims_initiator", "billing", "Confidential"),
            _user("h_old", "nurse", "clinical", "Internal", active=False),
        ],
        "sod_rules": [
            {"rule_id": "SOD-H1", "a": "claims_initiator", "b": "billing_claims", "citation": "HP5"},
            {"rule_id": "SOD-H2", "a": "roster_editor", "b": "roster_approval", "citation": "HP5"},
        ],
        "agreements": {
            "parties": [
                {"party_id": "medresearch_org", "kind": "recipient", "has_dsa": False, "has_dpa": False},
                {"party_id": "claims_proc", "kind": "processor", "has_dsa": True, "has_dpa": False},
            ],
            "region_pairs": [
                {"from_region": "us", "to_region": "eu", "dpo_approval_on_file": True},
                {"from_region": "us", "to_region": "apac", "dpo_approval_on_file": False},
            ],
        },
        "policies": _policies("HP", ["patients"], ["export", "patients"], ["sharing"],
                              ["billing", "finance"]),
    }


_TEMPLATES = {
    "technology": _technology_doc,
    "finance": _finance_doc,
    "healthcare": _healthcare_doc,
}


def generate_synthetic_org(sector: str, seed: int) -> OrgSpec:
    """Generate the synthetic org for (sector, seed); deterministic and validated."""
    if sector not in _TEMPLATES:
        raise CatalogError(f"unknown sector {sector!r}; expected one of {sorted(_TEMPLATES)}")
    doc = _TEMPLATES[sector]()
    doc["schema_version"] = 1
    doc["org_id"] = f"{sector}-{seed}"
    rng = random.Random(f"{sector}:{seed}")
    names = list(_NAME_POOL)
    rng.shuffle(names)
    for i, user in enumerate(doc["users"]):
        user["display_name"] = names[i % len(names)]
    org = parse_org(doc)
    _check_postconditions(org)
    return org


def _check_postconditions(org: OrgSpec) -> None:
    datasets = list(org.catalog.datasets.values())
    for level in SensitivityLabel:
        if not any(d.sensitivity == level for d in datasets):
            raise CatalogError(f"org {org.org_id}: no dataset at sensitivity {level.value}")
    if org.sector == "finance":
        if not any(
            d.sensitivity == SensitivityLabel.RESTRICTED and FieldCategory.FINANCIAL in d.categories
            for d in datasets
        ):
            raise CatalogError(f"org {org.org_id}: finance org lacks a Restricted financial dataset")
    if org.sector == "healthcare":
        if not any(FieldCategory.HEALTH in d.categories for d in datasets):
            raise CatalogError(f"org {org.org_id}: healthcare org lacks a health dataset")
    if len(org.catalog.sod_rules) < 2:
        raise CatalogError(f"org {org.org_id}: needs at least two SoD rules")
    if len(org.policies) < 6:
        raise CatalogError(f"org {org.org_id}: needs at least six policies")
    covered = {tag for p in org.policies for tag in p.gate_tags}
    from ..engine.gates import default_gate_registry

    missing = set(default_gate_registry().ids) - covered
    if missing:
        raise CatalogError(f"org {org.org_id}: no policy covers gates {sorted(missing)}")
