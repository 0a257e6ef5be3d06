"""The five verification stages of the decision pipeline.

Stages 1 (context), 4 (business purpose), and 5 (compliance) accept an
optional reasoner whose verdict can soften or replace the rubric status;
stages 2 and 3 are purely deterministic catalog checks. A reasoner verdict
only shapes soft signals. Hard gates re-derive everything they need from
deterministic sources, so no suggestion can bypass them.
"""

from __future__ import annotations

from typing import Any, Optional

from ..catalog.model import FieldCategory, MetadataCatalog, SensitivityLabel, effective_sensitivity
from ..reasoner.base import Reasoner, ReasonerUnavailable, ReasonerVerdict
from ..reasoner.prompt import metadata_for_prompt
from .model import (
    AccessRequest,
    Control,
    PurposeCategory,
    SharingScope,
    Stage,
    StageStatus,
    StageVerdict,
)
from .policy import PolicyStore
from .purpose import classify_purpose
from .registry import ControlRegistry, load_control_registry

_default_registry: Optional[ControlRegistry] = None


def default_control_registry() -> ControlRegistry:
    global _default_registry
    if _default_registry is None:
        _default_registry = load_control_registry()
    return _default_registry


def _interpret(
    reasoner: Optional[Reasoner],
    stage_key: str,
    request: AccessRequest,
    policies: PolicyStore,
    catalog: Optional[MetadataCatalog],
    prior_signals: Optional[dict[str, Any]] = None,
) -> tuple[Optional[ReasonerVerdict], Optional[str]]:
    """Run the reasoner; on failure return (None, cause) instead of raising."""
    if reasoner is None:
        return None, None
    dataset = catalog.get_dataset(request.dataset_id) if catalog else None
    user = catalog.get_user(request.requester_id) if catalog else None
    snippets = [
        f"{p.policy_id}: {p.title}. {p.text}"
        for p in policies.relevant_to(dataset.scope_tags if dataset else [])
    ][:5]
    metadata = metadata_for_prompt(request, dataset, user)
    if prior_signals:
        metadata["prior_signals"] = {
            k: v for k, v in prior_signals.items() if isinstance(v, (str, int, float, bool, list))
        }
    try:
        return reasoner.interpret(stage_key, request, snippets, metadata), None
    except ReasonerUnavailable as exc:
        return None, exc.cause


def _unavailable_verdict(stage: Stage, cause: str) -> StageVerdict:
    return StageVerdict(
        stage=stage,
        status=StageStatus.FAIL,
        signals={"triggers": ["reasoner_unavailable"], "failure_cause": cause},
        notes=f"escalate: model assistance unavailable ({cause})",
    )


def _controls_from_ids(registry: ControlRegistry, control_ids: list[str]) -> list[Control]:
    return [registry.get(cid) for cid in control_ids]


def stage_context(
    request: AccessRequest,
    policies: PolicyStore,
    reasoner: Optional[Reasoner] = None,
    catalog: Optional[MetadataCatalog] = None,
    registry: Optional[ControlRegistry] = None,
) -> StageVerdict:
    """Stage 1: is the stated purpose specific, and is the policy scope sane?"""
    registry = registry or default_control_registry()
    rv, failure = _interpret(reasoner, "context", request, policies, catalog)
    if failure:
        return _unavailable_verdict(Stage.CONTEXT, failure)

    dataset = catalog.get_dataset(request.dataset_id) if catalog else None
    relevant = policies.relevant_to(dataset.scope_tags if dataset else [])

    entities = rv.entities if rv else {}
    category_raw = entities.get("purpose_category")
    if category_raw is None and "purpose_category" not in entities:
        detected, _ = classify_purpose(request.purpose)
        category_raw = detected.value if detected else None
    purpose_clear = bool(entities.get("purpose_clear", category_raw is not None))
    retention = entities.get("retention_days", request.declared_retention_days)

    signals: dict[str, Any] = {
        "purpose_category": category_raw,
        "purpose_clear": purpose_clear,
        "retention_days": retention,
        "sharing_scope": request.sharing_scope.value,
        "relevant_policy_count": len(relevant),
        "triggers": [],
    }

    # Deterministic floor: an empty purpose always fails, whatever a model says.
    if not request.purpose.strip():
        signals["purpose_clear"] = False
        signals["purpose_category"] = None
        signals["triggers"] = ["no_stated_purpose"]
        return StageVerdict(Stage.CONTEXT, StageStatus.FAIL, signals, notes="no purpose given")

    conflict = _policy_scope_conflict(relevant)
    if conflict:
        signals["triggers"] = ["policy_scope_conflict"]
        return StageVerdict(
            Stage.CONTEXT,
            StageStatus.FAIL,
            signals,
            citations=list(conflict),
            notes="relevant policies declare conflicting scopes",
        )

    if rv and rv.status is not None:
        signals["triggers"] = list(entities.get("triggers", []))
        return StageVerdict(
            Stage.CONTEXT,
            rv.status,
            signals,
            proposed_controls=_controls_from_ids(registry, entities.get("proposed_control_ids", [])),
            citations=list(rv.citations),
            notes=rv.confidence_note,
        )

    if not purpose_clear or category_raw is None:
        signals["purpose_clear"] = False
        signals["triggers"] = ["purpose_unclear"]
        return StageVerdict(
            Stage.CONTEXT,
            StageStatus.UNCERTAIN,
            signals,
            proposed_controls=registry.controls_for("purpose_unclear"),
            notes="purpose text does not map to a known category",
        )
    return StageVerdict(Stage.CONTEXT, StageStatus.PASS, signals)


def _policy_scope_conflict(relevant: list) -> Optional[tuple[str, str]]:
    by_id = {p.policy_id for p in relevant}
    for policy in relevant:
        for other in getattr(policy, "conflicts_with", ()):  # optional schema field
            if other in by_id:
                return tuple(sorted((policy.policy_id, other)))  # type: ignore[return-value]
    return None


def stage_user_validation(request: AccessRequest, catalog: MetadataCatalog) -> StageVerdict:
    """Stage 2: identity, role, clearance, and separation-of-duties checks."""
    user = catalog.get_user(request.requester_id)
    signals: dict[str, Any] = {"triggers": []}
    if user is None or not user.active or not user.role:
        signals.update(
            {
                "identity_verified": False,
                "role": user.role if user else None,
                "active": bool(user and user.active),
            }
        )
        signals["triggers"] = ["identity_unverified"]
        return StageVerdict(
            Stage.USER_VALIDATION,
            StageStatus.FAIL,
            signals,
            notes="requester unknown, inactive, or missing a role",
        )

    signals.update(
        {
            "identity_verified": True,
            "role": user.role,
            "department": user.department,
            "clearance": user.clearance.value,
            "active": True,
        }
    )
    rule = catalog.check_sod(user, request.dataset_id)
    if rule is not None:
        signals["sod_conflict"] = True
        signals["sod_rule_id"] = rule.rule_id
        signals["triggers"] = ["sod_conflict"]
        return StageVerdict(
            Stage.USER_VALIDATION,
            StageStatus.FAIL,
            signals,
            citations=[rule.citation] if rule.citation else [],
            notes=f"separation-of-duties rule {rule.rule_id} matches this role and dataset",
        )
    signals["sod_conflict"] = False
    return StageVerdict(Stage.USER_VALIDATION, StageStatus.PASS, signals)


def stage_data_classification(request: AccessRequest, catalog: MetadataCatalog) -> StageVerdict:
    """Stage 3: sensitivity labels, categories, and composition risk flags."""
    dataset = catalog.get_dataset(request.dataset_id)
    signals: dict[str, Any] = {"triggers": []}
    if dataset is None:
        signals["triggers"] = ["unknown_dataset"]
        return StageVerdict(
            Stage.DATA_CLASSIFICATION,
            StageStatus.FAIL,
            signals,
            notes=f"dataset {request.dataset_id!r} is not in the catalog",
        )
    if dataset.labels_missing():
        signals["triggers"] = ["labels_missing"]
        return StageVerdict(
            Stage.DATA_CLASSIFICATION,
            StageStatus.FAIL,
            signals,
            notes="one or more fields have no sensitivity label",
        )
    label, flags = effective_sensitivity(catalog, [dataset.dataset_id])
    signals.update(
        {
            "effective_sensitivity": label.value,
            "pii_present": dataset.pii_present,
            "categories": sorted(c.value for c in dataset.categories),
            "composition_flags": flags,
            "dataset_region": dataset.region,
            "max_retention_days": dataset.max_retention_days,
        }
    )
    return StageVerdict(Stage.DATA_CLASSIFICATION, StageStatus.PASS, signals)


def stage_business_purpose(
    request: AccessRequest,
    stage_signals: dict[str, Any],
    catalog: MetadataCatalog,
    reasoner: Optional[Reasoner] = None,
    policies: Optional[PolicyStore] = None,
    registry: Optional[ControlRegistry] = None,
) -> StageVerdict:
    """Stage 4: need-to-know against the dataset's allowed purposes, plus a time bound."""
    registry = registry or default_control_registry()
    policies = policies or PolicyStore()
    rv, failure = _interpret(reasoner, "business_purpose", request, policies, catalog, stage_signals)
    if failure:
        return _unavailable_verdict(Stage.BUSINESS_PURPOSE, failure)

    dataset = catalog.get_dataset(request.dataset_id)
    user = catalog.get_user(request.requester_id)
    category_raw = stage_signals.get("purpose_category")
    purpose_allowed = bool(
        dataset is not None and category_raw is not None and category_raw in dataset.allowed_purposes
    )
    department_allowed = bool(
        dataset is not None
        and (not dataset.allowed_departments or (user and user.department in dataset.allowed_departments))
    )
    need_to_know = purpose_allowed and department_allowed
    retention = stage_signals.get("retention_days", request.declared_retention_days)
    time_bound_present = retention is not None

    signals: dict[str, Any] = {
        "need_to_know": need_to_know,
        "purpose_allowed": purpose_allowed,
        "department_allowed": department_allowed,
        "time_bound_present": time_bound_present,
        "triggers": [],
    }

    if rv and rv.status is not None:
        signals["triggers"] = list(rv.entities.get("triggers", []))
        return StageVerdict(
            Stage.BUSINESS_PURPOSE,
            rv.status,
            signals,
            proposed_controls=_controls_from_ids(
                registry, rv.entities.get("proposed_control_ids", [])
            ),
            citations=list(rv.citations),
            notes=rv.confidence_note,
        )

    if not need_to_know:
        signals["triggers"] = ["no_need_to_know"]
        return StageVerdict(
            Stage.BUSINESS_PURPOSE,
            StageStatus.FAIL,
            signals,
            notes="stated purpose is not an approved use of this dataset for this requester",
        )
    if not time_bound_present:
        signals["triggers"] = ["time_bound_missing"]
        return StageVerdict(
            Stage.BUSINESS_PURPOSE,
            StageStatus.UNCERTAIN,
            signals,
            proposed_controls=registry.controls_for("time_bound_missing"),
            notes="no retention window declared for the access",
        )
    return StageVerdict(Stage.BUSINESS_PURPOSE, StageStatus.PASS, signals)


# Static compliance mapping: (categories, sharing, sensitivity, purpose) -> obligations.
# Each row: (name, matcher, regulation tags, control ids, trigger, topic tags)
def _compliance_rules():
    def health(ctx):
        return FieldCategory.HEALTH.value in ctx["categories"]

    def pii_cross_border(ctx):
        return ctx["pii"] and ctx["sharing"] == SharingScope.CROSS_BORDER.value

    def external_share(ctx):
        return ctx["sharing"] == SharingScope.EXTERNAL_THIRD_PARTY.value and (
            ctx["pii"] or ctx["sensitivity_rank"] >= SensitivityLabel.CONFIDENTIAL.rank
        )

    def sox(ctx):
        return (
            FieldCategory.FINANCIAL.value in ctx["categories"]
            and ctx["sensitivity_rank"] >= SensitivityLabel.CONFIDENTIAL.rank
        )

    def pii_modeling(ctx):
        return ctx["pii"] and ctx["purpose"] == PurposeCategory.ANALYTICS_MODELING.value

    return (
        ("health_records", health, ["HIPAA"],
         ["time_boxed_access", "enhanced_logging", "approval_required"], "health_data_access",
         {"health"}),
        ("pii_cross_border", pii_cross_border, ["GDPR"], ["tokenize_pii", "dpo_review"],
         "cross_border_transfer", {"export", "pii"}),
        ("external_share", external_share, [], ["dsa_required"], "external_sharing", {"sharing"}),
        ("sox_financial", sox, ["SOX"], ["enhanced_logging"], "sox_financial", {"finance", "sox"}),
        ("pii_modeling", pii_modeling, [], ["tokenize_pii"], "pii_modeling", {"pii"}),
    )


_COMPLIANCE_RULES = _compliance_rules()


def stage_compliance(
    request: AccessRequest,
    stage_signals: dict[str, Any],
    policies: PolicyStore,
    catalog: Optional[MetadataCatalog] = None,
    reasoner: Optional[Reasoner] = None,
    registry: Optional[ControlRegistry] = None,
) -> StageVerdict:
    """Stage 5: map the request onto regulations and their required controls."""
    registry = registry or default_control_registry()
    rv, failure = _interpret(reasoner, "compliance", request, policies, catalog, stage_signals)
    if failure:
        return _unavailable_verdict(Stage.COMPLIANCE, failure)

    if rv and rv.status is not None:
        entities = rv.entities
        signals = {
            "regulation_tags": list(entities.get("regulation_tags", [])),
            "required_control_ids": list(entities.get("proposed_control_ids", [])),
            "triggers": list(entities.get("triggers", [])),
        }
        return StageVerdict(
            Stage.COMPLIANCE,
            rv.status,
            signals,
            proposed_controls=_controls_from_ids(
                registry, entities.get("proposed_control_ids", [])
            ),
            citations=list(rv.citations),
            notes=rv.confidence_note,
        )

    dataset = catalog.get_dataset(request.dataset_id) if catalog else None
    ctx = {
        "categories": stage_signals.get("categories", []),
        "pii": bool(stage_signals.get("pii_present")),
        "sharing": request.sharing_scope.value,
        "purpose": stage_signals.get("purpose_category"),
        "sensitivity_rank": SensitivityLabel.parse(
            stage_signals.get("effective_sensitivity", SensitivityLabel.PUBLIC.value)
        ).rank,
    }

    tags: list[str] = []
    control_ids: list[str] = []
    triggers: list[str] = []
    topics: set[str] = set()
    for _, matcher, rule_tags, rule_controls, trigger, rule_topics in _COMPLIANCE_RULES:
        if matcher(ctx):
            tags.extend(t for t in rule_tags if t not in tags)
            control_ids.extend(c for c in rule_controls if c not in control_ids)
            triggers.append(trigger)
            topics |= rule_topics

    signals = {
        "regulation_tags": tags,
        "required_control_ids": control_ids,
        "triggers": triggers,
    }
    citations = []
    if dataset is not None and topics:
        scope = set(dataset.scope_tags) | topics
        citations = [p.policy_id for p in policies.relevant_to(scope) if "all" not in p.scope_tags][:3]

    if triggers:
        return StageVerdict(
            Stage.COMPLIANCE,
            StageStatus.UNCERTAIN,
            signals,
            proposed_controls=_controls_from_ids(registry, control_ids),
            citations=citations,
            notes="regulatory obligations apply; listed controls must be in place",
        )
    if ctx["sensitivity_rank"] >= SensitivityLabel.CONFIDENTIAL.rank:
        signals["triggers"] = ["compliance_mapping_gap"]
        return StageVerdict(
            Stage.COMPLIANCE,
            StageStatus.UNCERTAIN,
            signals,
            notes="no mapping entry covers this sensitive request; escalate for review",
        )
    return StageVerdict(Stage.COMPLIANCE, StageStatus.PASS, signals)
