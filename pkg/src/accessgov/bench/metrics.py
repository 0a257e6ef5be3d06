"""Decision-quality metrics: confusion matrices, rates, and Wilson intervals.

All functions are pure and operate on label codes A (approve), D (deny),
C (conditional). Undefined ratios (zero denominators) are returned as None
rather than silently coerced to 0.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence

from ..engine.model import DecisionLabel

LABEL_CODES = ("A", "D", "C")

# Two-sided 95% normal quantile, to the precision used for reported intervals.
Z_95 = 1.959964


class MetricsError(Exception):
    pass


def _norm(code: str) -> str:
    return DecisionLabel.parse(code).code


def confusion_matrix(
    ground_truth: Mapping[str, str], predicted: Mapping[str, str]
) -> dict[str, dict[str, int]]:
    """Row = ground-truth label, column = predicted label, fixed A/D/C order."""
    matrix = {row: {col: 0 for col in LABEL_CODES} for row in LABEL_CODES}
    for case_id, gt in ground_truth.items():
        if case_id not in predicted:
            raise MetricsError(f"no prediction for case {case_id!r}")
        matrix[_norm(gt)][_norm(predicted[case_id])] += 1
    return matrix


def exact_match(ground_truth: Mapping[str, str], predicted: Mapping[str, str]) -> tuple[int, int]:
    """(matching decisions, total decisions)."""
    total = len(ground_truth)
    hits = sum(
        1 for case_id, gt in ground_truth.items() if _norm(predicted[case_id]) == _norm(gt)
    )
    return hits, total


def per_class_precision_recall(
    matrix: Mapping[str, Mapping[str, int]]
) -> dict[str, dict[str, Optional[float]]]:
    out: dict[str, dict[str, Optional[float]]] = {}
    for code in LABEL_CODES:
        support = sum(matrix[code][col] for col in LABEL_CODES)
        predicted = sum(matrix[row][code] for row in LABEL_CODES)
        true_pos = matrix[code][code]
        out[code] = {
            "support": support,
            "predicted": predicted,
            "recall": (true_pos / support) if support else None,
            "precision": (true_pos / predicted) if predicted else None,
        }
    return out


def balanced_accuracy(matrix: Mapping[str, Mapping[str, int]]) -> float:
    """Mean of per-class recalls; every class must have support."""
    recalls = []
    for code in LABEL_CODES:
        support = sum(matrix[code][col] for col in LABEL_CODES)
        if support == 0:
            raise MetricsError(f"class {code} has zero support; balanced accuracy undefined")
        recalls.append(matrix[code][code] / support)
    return sum(recalls) / len(recalls)


def far_must_deny(
    predicted: Mapping[str, str], must_deny_ids: Sequence[str], mode: str = "table"
) -> tuple[int, int]:
    """False-access violations over must-deny cases.

    mode="table" counts any non-Deny outcome as a violation; mode="strict"
    counts only outright Approve.
    """
    if mode not in ("table", "strict"):
        raise MetricsError(f"unknown FAR mode {mode!r}")
    violations = 0
    for case_id in must_deny_ids:
        if case_id not in predicted:
            raise MetricsError(f"no prediction for must-deny case {case_id!r}")
        code = _norm(predicted[case_id])
        if mode == "table" and code != "D":
            violations += 1
        if mode == "strict" and code == "A":
            violations += 1
    return violations, len(must_deny_ids)


def fdr_must_approve(predicted: Mapping[str, str], must_approve_ids: Sequence[str]) -> tuple[int, int]:
    """False denials over must-approve cases (only outright Deny counts)."""
    violations = 0
    for case_id in must_approve_ids:
        if case_id not in predicted:
            raise MetricsError(f"no prediction for must-approve case {case_id!r}")
        if _norm(predicted[case_id]) == "D":
            violations += 1
    return violations, len(must_approve_ids)


def wilson_interval(successes: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise MetricsError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise MetricsError(f"successes {successes} outside [0, {trials}]")
    p_hat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials))
    # At the boundaries the endpoints are exactly 0 or 1; avoid float residue.
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


def rate(pair: tuple[int, int]) -> Optional[float]:
    hits, total = pair
    return (hits / total) if total else None
