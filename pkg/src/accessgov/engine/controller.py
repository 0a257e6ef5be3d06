"""Decision controller: short-circuit, stages, gates, aggregation, rationale.

Control flow for one request:
  1. With no verifiable requester or an empty policy store there is nothing to
     assess: deny with "insufficient context" and no stage trace.
  2. Run the five stages (1, 4, 5 may be model-assisted).
  3. Aggregate the verdicts into the pre-gate label; this raw label is always
     recorded so evaluations can compare it against the gated result without a
     second model pass.
  4. Any firing gate forces Deny with no controls.
  5. Otherwise the aggregate decides: all-pass approves, mitigable findings
     yield Conditional with controls, anything else denies for escalation.
"""

from __future__ import annotations

from typing import Optional

from ..catalog.model import MetadataCatalog
from ..reasoner.base import Reasoner
from ..reasoner.resilience import Clock
from .aggregate import aggregate_and_decide
from .gates import evaluate_gates
from .model import (
    AccessRequest,
    DecisionLabel,
    DecisionOutcome,
    Stage,
    StageStatus,
    StageVerdict,
)
from .policy import PolicyStore
from .rationale import generate_rationale
from .registry import ControlRegistry, GateRegistry
from .stages import (
    default_control_registry,
    stage_business_purpose,
    stage_compliance,
    stage_context,
    stage_data_classification,
    stage_user_validation,
)

# Stages that consult the reasoner by default; 2 and 3 stay deterministic.
DEFAULT_MODEL_STAGES = frozenset({Stage.CONTEXT, Stage.BUSINESS_PURPOSE, Stage.COMPLIANCE})


def decide(
    request: AccessRequest,
    policies: PolicyStore,
    catalog: MetadataCatalog,
    reasoner: Optional[Reasoner] = None,
    gates: Optional[GateRegistry] = None,
    registry: Optional[ControlRegistry] = None,
    clock: Optional[Clock] = None,
    model_stages: frozenset[Stage] = DEFAULT_MODEL_STAGES,
    diagnostics: bool = False,
    ablate_compliance: bool = False,
) -> DecisionOutcome:
    """Produce the decision outcome for one access request."""
    clock = clock or Clock()
    registry = registry or default_control_registry()
    started = clock.now_ms()
    request.validate()

    user = catalog.get_user(request.requester_id)
    if not request.requester_id or user is None or len(policies) == 0:
        rationale = generate_rationale(
            DecisionLabel.DENY, verdicts=[], insufficient_context=True
        )
        return DecisionOutcome(
            request_id=request.request_id,
            label=DecisionLabel.DENY,
            raw_label=DecisionLabel.DENY,
            rationale=rationale,
            controls=[],
            gate_hit=None,
            stage_trace=[],
            score=None,
            latency_ms=_elapsed(clock, started),
        )

    def pick(stage: Stage) -> Optional[Reasoner]:
        return reasoner if stage in model_stages else None

    v_context = stage_context(
        request, policies, reasoner=pick(Stage.CONTEXT), catalog=catalog, registry=registry
    )
    v_user = stage_user_validation(request, catalog)
    v_data = stage_data_classification(request, catalog)
    prior = _merged_signals([v_context, v_user, v_data])
    v_purpose = stage_business_purpose(
        request,
        prior,
        catalog,
        reasoner=pick(Stage.BUSINESS_PURPOSE),
        policies=policies,
        registry=registry,
    )
    if ablate_compliance:
        v_compliance = StageVerdict(
            Stage.COMPLIANCE,
            StageStatus.PASS,
            {"regulation_tags": [], "required_control_ids": [], "triggers": [], "ablated": True},
            notes="compliance stage disabled for ablation",
        )
    else:
        v_compliance = stage_compliance(
            request,
            {**prior, **_merged_signals([v_purpose])},
            policies,
            catalog=catalog,
            reasoner=pick(Stage.COMPLIANCE),
            registry=registry,
        )
    verdicts = [v_context, v_user, v_data, v_purpose, v_compliance]

    score, raw_label, agg_controls = aggregate_and_decide(verdicts, registry)
    gate_hit = evaluate_gates(request, verdicts, catalog, policies, gates=gates)

    extra = None
    if diagnostics:
        all_hits = evaluate_gates(
            request, verdicts, catalog, policies, gates=gates, collect_all=True
        )
        extra = {"all_gate_ids": [h.gate_id for h in all_hits]}

    if gate_hit is not None:
        label = DecisionLabel.DENY
        controls = []
    else:
        label = raw_label
        controls = agg_controls if raw_label == DecisionLabel.CONDITIONAL else []

    rationale = generate_rationale(
        label,
        verdicts,
        gate_hit=gate_hit,
        controls=controls,
        score=score,
        extra_machine_fields=extra,
    )
    return DecisionOutcome(
        request_id=request.request_id,
        label=label,
        raw_label=raw_label,
        rationale=rationale,
        controls=controls,
        gate_hit=gate_hit,
        stage_trace=verdicts,
        score=score,
        latency_ms=_elapsed(clock, started),
    )


def _merged_signals(verdicts: list[StageVerdict]) -> dict:
    merged = {}
    for verdict in verdicts:
        for key, value in verdict.signals.items():
            if key != "triggers":
                merged[key] = value
    return merged


def _elapsed(clock: Clock, started: float) -> int:
    return max(0, int(clock.now_ms() - started))
