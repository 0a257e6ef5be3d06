"""Risk synthesis: fold five stage verdicts into a label and control set."""

from __future__ import annotations

from typing import Optional

from .model import AggregateScore, Control, DecisionLabel, StageStatus, StageVerdict
from .registry import ControlRegistry


def aggregate_and_decide(
    verdicts: list[StageVerdict],
    registry: ControlRegistry,
) -> tuple[AggregateScore, DecisionLabel, list[Control]]:
    """Approve on all-pass; Conditional when every trigger is mitigable; else Deny.

    A non-passing stage that names no trigger is treated as unmitigable: if we
    cannot tell what went wrong we cannot claim a control fixes it. When Deny
    and Conditional both have support, Deny wins.
    """
    statuses = tuple(v.status for v in verdicts)
    uncertainty = sum(1 for s in statuses if s == StageStatus.UNCERTAIN)
    failing = [v for v in verdicts if v.status != StageStatus.PASS]

    if not failing:
        score = AggregateScore(statuses, uncertainty=0, mitigable=True)
        return score, DecisionLabel.APPROVE, []

    mitigable = True
    for verdict in failing:
        triggers = verdict.triggers
        if not triggers or any(not registry.mitigable(t) for t in triggers):
            mitigable = False
            break

    score = AggregateScore(statuses, uncertainty=uncertainty, mitigable=mitigable)
    if not mitigable:
        return score, DecisionLabel.DENY, []

    controls: list[Control] = []
    seen: set[str] = set()

    def add(control: Optional[Control]) -> None:
        if control is not None and control.control_id not in seen:
            seen.add(control.control_id)
            controls.append(control)

    for verdict in failing:
        for control in verdict.proposed_controls:
            add(control)
        for trigger in verdict.triggers:
            for control in registry.controls_for(trigger):
                add(control)
    return score, DecisionLabel.CONDITIONAL, controls
