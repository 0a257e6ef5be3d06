"""Core decision types shared across the pipeline, gates, and audit trail."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional


class DecisionLabel(str, Enum):
    APPROVE = "APPROVE"
    DENY = "DENY"
    CONDITIONAL = "CONDITIONAL"

    @property
    def code(self) -> str:
        return {"APPROVE": "A", "DENY": "D", "CONDITIONAL": "C"}[self.value]

    @classmethod
    def parse(cls, raw: str) -> "DecisionLabel":
        text = str(raw).strip().upper()
        for label in cls:
            if text in (label.value, label.code):
                return label
        raise ValueError(f"unknown decision label: {raw!r}")


class Stage(str, Enum):
    CONTEXT = "Context"
    USER_VALIDATION = "UserValidation"
    DATA_CLASSIFICATION = "DataClassification"
    BUSINESS_PURPOSE = "BusinessPurpose"
    COMPLIANCE = "Compliance"


STAGE_ORDER = (
    Stage.CONTEXT,
    Stage.USER_VALIDATION,
    Stage.DATA_CLASSIFICATION,
    Stage.BUSINESS_PURPOSE,
    Stage.COMPLIANCE,
)


class StageStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    UNCERTAIN = "Uncertain"


class SharingScope(str, Enum):
    INTERNAL = "internal"
    CROSS_DEPARTMENT = "cross_department"
    EXTERNAL_THIRD_PARTY = "external_third_party"
    CROSS_BORDER = "cross_border"


class PurposeCategory(str, Enum):
    ANALYTICS_MODELING = "analytics_modeling"
    REPORTING = "reporting"
    MARKETING = "marketing"
    COMPLIANCE_AUDIT = "compliance_audit"
    INCIDENT_RESPONSE = "incident_response"
    DATA_SUBJECT_REQUEST = "data_subject_request"
    OPERATIONS = "operations"


class RequestValidationError(ValueError):
    """Request failed schema validation. Carries per-field messages."""

    def __init__(self, errors: dict[str, str]):
        self.errors = dict(errors)
        super().__init__("; ".join(f"{k}: {v}" for k, v in sorted(self.errors.items())))


@dataclass(frozen=True)
class AccessRequest:
    """One access request: who wants which dataset, for what, under what terms."""

    request_id: str
    requester_id: str
    dataset_id: str
    purpose: str
    submitted_at: datetime
    declared_retention_days: Optional[int] = None
    sharing_scope: SharingScope = SharingScope.INTERNAL
    destination_region: Optional[str] = None
    external_party: Optional[str] = None

    def validate(self) -> None:
        errors: dict[str, str] = {}
        if not self.request_id:
            errors["request_id"] = "must be nonempty"
        if self.declared_retention_days is not None and self.declared_retention_days <= 0:
            errors["declared_retention_days"] = "must be a positive integer when present"
        if self.sharing_scope == SharingScope.CROSS_BORDER and not self.destination_region:
            errors["destination_region"] = "required when sharing_scope is cross_border"
        if errors:
            raise RequestValidationError(errors)

    def to_doc(self) -> dict[str, Any]:
        return {
            "request_id": self.request_id,
            "requester_id": self.requester_id,
            "dataset_id": self.dataset_id,
            "purpose": self.purpose,
            "submitted_at": self.submitted_at.isoformat(),
            "declared_retention_days": self.declared_retention_days,
            "sharing_scope": self.sharing_scope.value,
            "destination_region": self.destination_region,
            "external_party": self.external_party,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "AccessRequest":
        submitted = doc.get("submitted_at")
        if isinstance(submitted, str):
            submitted_at = datetime.fromisoformat(submitted)
        elif isinstance(submitted, datetime):
            submitted_at = submitted
        else:
            submitted_at = datetime.now(timezone.utc)
        request = cls(
            request_id=str(doc.get("request_id", "")),
            requester_id=str(doc.get("requester_id", "")),
            dataset_id=str(doc.get("dataset_id", "")),
            purpose=str(doc.get("purpose", "")),
            submitted_at=submitted_at,
            declared_retention_days=doc.get("declared_retention_days"),
            sharing_scope=SharingScope(doc.get("sharing_scope", "internal")),
            destination_region=doc.get("destination_region"),
            external_party=doc.get("external_party"),
        )
        request.validate()
        return request


@dataclass(frozen=True)
class Control:
    """One mitigation drawn from the closed control registry."""

    control_id: str
    kind: str
    description: str
    params: tuple[tuple[str, Any], ...] = ()

    def with_params(self, **params: Any) -> "Control":
        merged = dict(self.params)
        merged.update(params)
        return Control(self.control_id, self.kind, self.description, tuple(sorted(merged.items())))

    def to_doc(self) -> dict[str, Any]:
        return {
            "control_id": self.control_id,
            "kind": self.kind,
            "description": self.description,
            "params": dict(self.params),
        }


@dataclass
class StageVerdict:
    """Outcome of one pipeline stage.

    Signals is a flat key/value map; triggering rule names for Fail/Uncertain
    statuses are listed under signals["triggers"] so aggregation and gates can
    read them without parsing prose.
    """

    stage: Stage
    status: StageStatus
    signals: dict[str, Any] = field(default_factory=dict)
    proposed_controls: list[Control] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)
    notes: str = ""

    @property
    def triggers(self) -> list[str]:
        return list(self.signals.get("triggers", []))

    def to_doc(self) -> dict[str, Any]:
        return {
            "stage": self.stage.value,
            "status": self.status.value,
            "signals": _plain(self.signals),
            "proposed_controls": [c.control_id for c in self.proposed_controls],
            "citations": list(self.citations),
            "notes": self.notes,
        }


@dataclass(frozen=True)
class GateHit:
    gate_id: str
    message: str
    citation: str = ""
    evidence: tuple[tuple[str, Any], ...] = ()

    def to_doc(self) -> dict[str, Any]:
        return {
            "gate_id": self.gate_id,
            "message": self.message,
            "citation": self.citation,
            "evidence": [[k, _plain(v)] for k, v in self.evidence],
        }


@dataclass(frozen=True)
class AggregateScore:
    per_stage_status: tuple[StageStatus, ...]
    uncertainty: int
    mitigable: bool

    def to_doc(self) -> dict[str, Any]:
        return {
            "per_stage_status": [s.value for s in self.per_stage_status],
            "uncertainty": self.uncertainty,
            "mitigable": self.mitigable,
        }


@dataclass
class Rationale:
    """Human summary plus machine-readable fields; hashed into the audit trail."""

    summary: str
    cited_policies: list[str] = field(default_factory=list)
    stage_findings: dict[str, str] = field(default_factory=dict)
    machine_fields: dict[str, Any] = field(default_factory=dict)

    def to_doc(self) -> dict[str, Any]:
        return {
            "summary": self.summary,
            "cited_policies": list(self.cited_policies),
            "stage_findings": dict(self.stage_findings),
            "machine_fields": _plain(self.machine_fields),
        }


@dataclass
class DecisionOutcome:
    request_id: str
    label: DecisionLabel
    raw_label: DecisionLabel
    rationale: Rationale
    controls: list[Control] = field(default_factory=list)
    gate_hit: Optional[GateHit] = None
    stage_trace: list[StageVerdict] = field(default_factory=list)
    score: Optional[AggregateScore] = None
    latency_ms: int = 0

    def to_doc(self) -> dict[str, Any]:
        return {
            "request_id": self.request_id,
            "label": self.label.value,
            "label_code": self.label.code,
            "raw_label": self.raw_label.value,
            "rationale": self.rationale.to_doc(),
            "controls": [c.to_doc() for c in self.controls],
            "gate_hit": self.gate_hit.to_doc() if self.gate_hit else None,
            "stage_trace": [v.to_doc() for v in self.stage_trace],
            "score": self.score.to_doc() if self.score else None,
            "latency_ms": self.latency_ms,
        }


def _plain(value: Any) -> Any:
    """Coerce enums/tuples into JSON-friendly plain values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value
