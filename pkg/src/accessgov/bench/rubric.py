"""Qualitative rubric checks applied to benchmark outcomes.

These go beyond the label: a decision is functionally appropriate only if
its controls cover what the case requires, and compliant only if its
rationale cites every regulation the case implicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..engine.model import DecisionOutcome
from .cases import BenchmarkSuite


@dataclass(frozen=True)
class CheckResult:
    passed: tuple[str, ...]
    failed: tuple[str, ...]

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.passed), len(self.passed) + len(self.failed)


def functional_appropriateness(
    suite: BenchmarkSuite, outcomes: Mapping[str, Optional[DecisionOutcome]]
) -> CheckResult:
    """Label matches ground truth and required controls are all attached."""
    passed, failed = [], []
    for case in suite.cases:
        outcome = outcomes.get(case.case_id)
        if outcome is None or outcome.label != case.ground_truth.label:
            failed.append(case.case_id)
            continue
        attached = {c.control_id for c in outcome.controls}
        if set(case.ground_truth.required_controls) <= attached:
            passed.append(case.case_id)
        else:
            failed.append(case.case_id)
    return CheckResult(tuple(passed), tuple(failed))


def compliance_adherence(
    suite: BenchmarkSuite, outcomes: Mapping[str, Optional[DecisionOutcome]]
) -> CheckResult:
    """Every regulation the case implicates appears in the rationale's tags."""
    passed, failed = [], []
    for case in suite.cases:
        outcome = outcomes.get(case.case_id)
        if outcome is None:
            failed.append(case.case_id)
            continue
        cited = set(outcome.rationale.machine_fields.get("regulation_tags", []))
        if set(case.ground_truth.expected_regulations) <= cited:
            passed.append(case.case_id)
        else:
            failed.append(case.case_id)
    return CheckResult(tuple(passed), tuple(failed))


def stability(labels_by_seed: Mapping[int, Mapping[str, str]]) -> CheckResult:
    """Cases whose final label is identical across every seed."""
    seeds = sorted(labels_by_seed)
    if not seeds:
        return CheckResult((), ())
    case_ids = sorted(labels_by_seed[seeds[0]])
    passed, failed = [], []
    for case_id in case_ids:
        labels = {labels_by_seed[seed][case_id] for seed in seeds}
        (passed if len(labels) == 1 else failed).append(case_id)
    return CheckResult(tuple(passed), tuple(failed))
