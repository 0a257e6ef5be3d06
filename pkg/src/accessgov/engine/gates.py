"""Hard policy gates: non-negotiable deny rules evaluated in a fixed order.

Every predicate is a deterministic function of the request, the catalog, and
the policy store. Gates deliberately re-derive purpose clarity and identity
from deterministic sources rather than trusting model-assisted stage output,
so a lenient reasoner can never argue past them.
"""

from __future__ import annotations

from typing import Any, Callable, Optional

from ..catalog.model import FieldCategory, MetadataCatalog, SensitivityLabel
from .model import AccessRequest, GateHit, PurposeCategory, SharingScope, StageVerdict
from .policy import PolicyStore
from .purpose import classify_purpose, purpose_is_clear
from .registry import GateRegistry, load_gate_registry

Evidence = list[tuple[str, Any]]
Predicate = Callable[[AccessRequest, MetadataCatalog, PolicyStore], Optional[Evidence]]

_default_gates: Optional[GateRegistry] = None


def default_gate_registry() -> GateRegistry:
    global _default_gates
    if _default_gates is None:
        _default_gates = load_gate_registry()
    return _default_gates


def _missing_identity(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    user = catalog.get_user(req.requester_id)
    if user is None or not user.active or not user.role:
        return [
            ("requester_id", req.requester_id),
            ("known", user is not None),
            ("active", bool(user and user.active)),
            ("role", user.role if user else None),
        ]
    return None


def _no_stated_purpose(req: AccessRequest, _c: MetadataCatalog, _p: PolicyStore):
    if not purpose_is_clear(req.purpose):
        return [("purpose", req.purpose), ("purpose_clear", False)]
    return None


def _sod_violation(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    user = catalog.get_user(req.requester_id)
    if user is None:
        return None
    rule = catalog.check_sod(user, req.dataset_id)
    if rule is not None:
        return [("role", user.role), ("dataset_id", req.dataset_id), ("sod_rule_id", rule.rule_id)]
    return None


def _restricted_finance(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    dataset = catalog.get_dataset(req.dataset_id)
    if dataset is None:
        return None
    if dataset.sensitivity != SensitivityLabel.RESTRICTED:
        return None
    if FieldCategory.FINANCIAL not in dataset.categories:
        return None
    user = catalog.get_user(req.requester_id)
    clearance = user.clearance if user else None
    if clearance is None or clearance.rank < SensitivityLabel.RESTRICTED.rank:
        return [
            ("dataset_sensitivity", dataset.sensitivity.value),
            ("dataset_categories", sorted(c.value for c in dataset.categories)),
            ("requester_clearance", clearance.value if clearance else None),
        ]
    return None


def _external_no_dsa(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    if req.sharing_scope != SharingScope.EXTERNAL_THIRD_PARTY:
        return None
    if not catalog.agreements.has_dsa(req.external_party):
        return [("external_party", req.external_party), ("has_dsa", False)]
    return None


def _cross_border_no_dpo(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    if req.sharing_scope != SharingScope.CROSS_BORDER:
        return None
    dataset = catalog.get_dataset(req.dataset_id)
    from_region = dataset.region if dataset else "unknown"
    if not catalog.agreements.dpo_approval_on_file(from_region, req.destination_region or ""):
        return [
            ("from_region", from_region),
            ("destination_region", req.destination_region),
            ("dpo_approval_on_file", False),
        ]
    return None


def _pii_modeling_unprotected(req: AccessRequest, catalog: MetadataCatalog, policies: PolicyStore):
    dataset = catalog.get_dataset(req.dataset_id)
    if dataset is None or not dataset.pii_present:
        return None
    category, _ = classify_purpose(req.purpose)
    if category != PurposeCategory.ANALYTICS_MODELING:
        return None
    protected = any(
        "pii_modeling_protection" in p.scope_tags
        for p in policies.relevant_to(dataset.scope_tags)
    )
    if not protected:
        return [
            ("pii_present", True),
            ("purpose_category", category.value),
            ("protection_policy_on_file", False),
        ]
    return None


def _retention_beyond_policy(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    dataset = catalog.get_dataset(req.dataset_id)
    if dataset is None or dataset.max_retention_days is None:
        return None
    if req.declared_retention_days is None:
        return None
    if req.declared_retention_days > dataset.max_retention_days:
        return [
            ("declared_retention_days", req.declared_retention_days),
            ("max_retention_days", dataset.max_retention_days),
        ]
    return None


def _third_party_no_dpa(req: AccessRequest, catalog: MetadataCatalog, _: PolicyStore):
    if req.sharing_scope != SharingScope.EXTERNAL_THIRD_PARTY:
        return None
    agreements = catalog.agreements
    if agreements.is_processor(req.external_party) and not agreements.has_dpa(req.external_party):
        return [("external_party", req.external_party), ("kind", "processor"), ("has_dpa", False)]
    return None


def _no_policy_context(req: AccessRequest, catalog: MetadataCatalog, policies: PolicyStore):
    dataset = catalog.get_dataset(req.dataset_id)
    tags = dataset.scope_tags if dataset else ()
    if not policies.relevant_to(tags):
        return [("dataset_id", req.dataset_id), ("relevant_policy_count", 0)]
    return None


PREDICATES: dict[str, Predicate] = {
    "MissingIdentityOrRole": _missing_identity,
    "NoStatedPurpose": _no_stated_purpose,
    "SoDViolation": _sod_violation,
    "RestrictedFinanceNoClearance": _restricted_finance,
    "ExternalSharingNoAgreement": _external_no_dsa,
    "CrossBorderNoDpoApproval": _cross_border_no_dpo,
    "PiiModelingNoProtection": _pii_modeling_unprotected,
    "RetentionBeyondPolicy": _retention_beyond_policy,
    "ThirdPartyNoDpa": _third_party_no_dpa,
    "NoPolicyContext": _no_policy_context,
}


def evaluate_gates(
    request: AccessRequest,
    verdicts: list[StageVerdict],
    catalog: MetadataCatalog,
    policies: PolicyStore,
    gates: Optional[GateRegistry] = None,
    collect_all: bool = False,
):
    """First firing gate in registry order, or None.

    With collect_all=True (diagnostics), returns the list of every firing gate
    instead; attribution in normal operation is always first-match.
    """
    gates = gates or default_gate_registry()
    hits: list[GateHit] = []
    for rule in gates:
        predicate = PREDICATES.get(rule.gate_id)
        if predicate is None:
            continue
        evidence = predicate(request, catalog, policies)
        if evidence is None:
            continue
        citing = policies.citing_gate(rule.gate_id)
        hit = GateHit(
            gate_id=rule.gate_id,
            message=rule.message,
            citation=citing.policy_id if citing else rule.citation,
            evidence=tuple(evidence),
        )
        if not collect_all:
            return hit
        hits.append(hit)
    return hits if collect_all else None
