"""Benchmark report assembly and rendering.

build_report turns a finished run into one structure holding every headline
number: exact-match rates before and after gating, confusion matrices,
per-class precision/recall with Wilson intervals, violation rates, rubric
checks, stability, and latency percentiles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from ..audit import nearest_rank_percentile
from .cases import BenchmarkSuite
from .metrics import (
    LABEL_CODES,
    balanced_accuracy,
    confusion_matrix,
    exact_match,
    far_must_deny,
    fdr_must_approve,
    per_class_precision_recall,
    wilson_interval,
)
from .rubric import compliance_adherence, functional_appropriateness, stability
from .runner import RunResult

_LABEL_NAMES = {"A": "Approve", "D": "Deny", "C": "Conditional"}


def _ratio_block(hits: int, total: int) -> dict[str, Any]:
    low, high = wilson_interval(hits, total)
    return {
        "hits": hits,
        "total": total,
        "rate": hits / total if total else None,
        "wilson_low": low,
        "wilson_high": high,
    }


def _class_blocks(matrix: dict[str, dict[str, int]]) -> dict[str, dict[str, Any]]:
    stats = per_class_precision_recall(matrix)
    out: dict[str, dict[str, Any]] = {}
    for code in LABEL_CODES:
        entry = dict(stats[code])
        support = entry["support"]
        predicted = entry["predicted"]
        tp = matrix[code][code]
        entry["recall_interval"] = wilson_interval(tp, support) if support else None
        entry["precision_interval"] = wilson_interval(tp, predicted) if predicted else None
        out[code] = entry
    return out


@dataclass
class MetricsReport:
    suite_id: str
    mode: str
    seeds: tuple[int, ...]
    cases: int
    edm_raw: dict[str, Any] = field(default_factory=dict)
    edm_final: dict[str, Any] = field(default_factory=dict)
    confusion_raw: dict[str, dict[str, int]] = field(default_factory=dict)
    confusion_final: dict[str, dict[str, int]] = field(default_factory=dict)
    classes_raw: dict[str, dict[str, Any]] = field(default_factory=dict)
    classes_final: dict[str, dict[str, Any]] = field(default_factory=dict)
    balanced_accuracy_raw: Optional[float] = None
    balanced_accuracy_final: Optional[float] = None
    far_table_raw: dict[str, Any] = field(default_factory=dict)
    far_table_final: dict[str, Any] = field(default_factory=dict)
    far_strict_raw: dict[str, Any] = field(default_factory=dict)
    far_strict_final: dict[str, Any] = field(default_factory=dict)
    fdr_raw: dict[str, Any] = field(default_factory=dict)
    fdr_final: dict[str, Any] = field(default_factory=dict)
    functional_appropriateness: dict[str, Any] = field(default_factory=dict)
    compliance_adherence: dict[str, Any] = field(default_factory=dict)
    stability: dict[str, Any] = field(default_factory=dict)
    latency_p50_ms: Optional[float] = None
    latency_p95_ms: Optional[float] = None
    total_retries: int = 0
    error_count: int = 0

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True, default=list)


def build_report(suite: BenchmarkSuite, run: RunResult) -> MetricsReport:
    gt = {c.case_id: c.ground_truth.label.code for c in suite.cases}
    raw = run.raw_labels_first
    final = run.final_labels_first

    matrix_raw = confusion_matrix(gt, raw)
    matrix_final = confusion_matrix(gt, final)

    fa = functional_appropriateness(suite, run.first_seed_outcomes)
    ca = compliance_adherence(suite, run.first_seed_outcomes)
    stab = stability(run.labels_by_seed)

    latencies = run.latencies_ms
    report = MetricsReport(
        suite_id=suite.suite_id,
        mode=run.mode,
        seeds=run.seeds,
        cases=len(suite.cases),
        edm_raw=_ratio_block(*exact_match(gt, raw)),
        edm_final=_ratio_block(*exact_match(gt, final)),
        confusion_raw=matrix_raw,
        confusion_final=matrix_final,
        classes_raw=_class_blocks(matrix_raw),
        classes_final=_class_blocks(matrix_final),
        balanced_accuracy_raw=balanced_accuracy(matrix_raw),
        balanced_accuracy_final=balanced_accuracy(matrix_final),
        far_table_raw=_ratio_block(*far_must_deny(raw, suite.must_deny_ids, "table")),
        far_table_final=_ratio_block(*far_must_deny(final, suite.must_deny_ids, "table")),
        far_strict_raw=_ratio_block(*far_must_deny(raw, suite.must_deny_ids, "strict")),
        far_strict_final=_ratio_block(*far_must_deny(final, suite.must_deny_ids, "strict")),
        fdr_raw=_ratio_block(*fdr_must_approve(raw, suite.must_approve_ids)),
        fdr_final=_ratio_block(*fdr_must_approve(final, suite.must_approve_ids)),
        functional_appropriateness={
            "hits": fa.counts[0], "total": fa.counts[1], "failed": list(fa.failed),
        },
        compliance_adherence={
            "hits": ca.counts[0], "total": ca.counts[1], "failed": list(ca.failed),
        },
        stability={
            "stable": stab.counts[0], "total": stab.counts[1], "unstable": list(stab.failed),
        },
        latency_p50_ms=nearest_rank_percentile(latencies, 50) if latencies else None,
        latency_p95_ms=nearest_rank_percentile(latencies, 95) if latencies else None,
        total_retries=run.total_retries,
        error_count=len(run.errors),
    )
    return report


def _fmt_rate(block: dict[str, Any]) -> str:
    rate = block.get("rate")
    shown = "undefined" if rate is None else f"{rate:.3f}"
    return (
        f"{block['hits']}/{block['total']} = {shown} "
        f"[{block['wilson_low']:.2f}, {block['wilson_high']:.2f}]"
    )


def _fmt_opt(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.3f}"


def _fmt_interval(interval: Optional[tuple[float, float]]) -> str:
    if interval is None:
        return ""
    return f" [{interval[0]:.2f}, {interval[1]:.2f}]"


def _confusion_lines(matrix: dict[str, dict[str, int]]) -> list[str]:
    header = "              " + "".join(f"{_LABEL_NAMES[c]:>14}" for c in LABEL_CODES)
    lines = [header]
    for row in LABEL_CODES:
        cells = "".join(f"{matrix[row][col]:>14}" for col in LABEL_CODES)
        lines.append(f"{_LABEL_NAMES[row]:>14}{cells}")
    return lines


def render_text(report: MetricsReport) -> str:
    lines: list[str] = []
    lines.append(f"Benchmark suite {report.suite_id} ({report.cases} cases, mode={report.mode})")
    lines.append(f"Seeds: {', '.join(str(s) for s in report.seeds)}")
    lines.append("")
    lines.append(f"Exact decision match (pre-gate):  {_fmt_rate(report.edm_raw)}")
    lines.append(f"Exact decision match (final):     {_fmt_rate(report.edm_final)}")
    lines.append(f"Balanced accuracy: pre-gate {_fmt_opt(report.balanced_accuracy_raw)}, "
                 f"final {_fmt_opt(report.balanced_accuracy_final)}")
    lines.append("")
    lines.append("Confusion (pre-gate), rows = ground truth:")
    lines.extend(_confusion_lines(report.confusion_raw))
    lines.append("Confusion (final), rows = ground truth:")
    lines.extend(_confusion_lines(report.confusion_final))
    lines.append("")
    for title, blocks in (("pre-gate", report.classes_raw), ("final", report.classes_final)):
        lines.append(f"Per-class precision/recall ({title}):")
        for code in LABEL_CODES:
            b = blocks[code]
            precision = "undefined" if b["precision"] is None else f"{b['precision']:.3f}"
            recall = "undefined" if b["recall"] is None else f"{b['recall']:.3f}"
            lines.append(
                f"  {_LABEL_NAMES[code]:>12}: precision {precision}"
                f"{_fmt_interval(b['precision_interval'])}, recall {recall}"
                f"{_fmt_interval(b['recall_interval'])} (support {b['support']})"
            )
    lines.append("")
    lines.append(f"False access (must-deny, any non-deny): pre-gate {_fmt_rate(report.far_table_raw)}, "
                 f"final {_fmt_rate(report.far_table_final)}")
    lines.append(f"False access (must-deny, approvals only): pre-gate {_fmt_rate(report.far_strict_raw)}, "
                 f"final {_fmt_rate(report.far_strict_final)}")
    lines.append(f"False denial (must-approve): pre-gate {_fmt_rate(report.fdr_raw)}, "
                 f"final {_fmt_rate(report.fdr_final)}")
    lines.append("")
    fa, ca, stab = report.functional_appropriateness, report.compliance_adherence, report.stability
    lines.append(f"Functionally appropriate: {fa['hits']}/{fa['total']}"
                 + (f" (failed: {', '.join(fa['failed'])})" if fa["failed"] else ""))
    lines.append(f"Compliance adherence:     {ca['hits']}/{ca['total']}"
                 + (f" (failed: {', '.join(ca['failed'])})" if ca["failed"] else ""))
    lines.append(f"Stable across seeds:      {stab['stable']}/{stab['total']}"
                 + (f" (unstable: {', '.join(stab['unstable'])})" if stab["unstable"] else ""))
    lines.append("")
    p50 = "n/a" if report.latency_p50_ms is None else f"{report.latency_p50_ms:.0f} ms"
    p95 = "n/a" if report.latency_p95_ms is None else f"{report.latency_p95_ms:.0f} ms"
    lines.append(f"Latency: p50 {p50}, p95 {p95}; retries {report.total_retries}; "
                 f"errors {report.error_count}")
    return "\n".join(lines)
