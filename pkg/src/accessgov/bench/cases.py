"""Benchmark case definitions and the packaged evaluation suite.

A suite is a set of labeled access requests against pinned synthetic orgs.
Each case carries its ground-truth label, the controls a correct conditional
decision must include, and the regulations a correct rationale must cite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from ..catalog.synth import generate_synthetic_org
from ..catalog.load import OrgSpec
from ..engine.model import AccessRequest, DecisionLabel, SharingScope

# All benchmark requests share one nominal submission instant so that runs
# differ only where the engine itself is nondeterministic.
SUBMITTED_AT = datetime(2024, 6, 1, 9, 0, 0, tzinfo=timezone.utc)


class SuiteError(Exception):
    pass


@dataclass(frozen=True)
class GroundTruth:
    label: DecisionLabel
    required_controls: tuple[str, ...] = ()
    expected_regulations: tuple[str, ...] = ()


@dataclass(frozen=True)
class BenchmarkCase:
    case_id: str
    family: str
    org: str
    request_fields: dict[str, Any]
    ground_truth: GroundTruth
    must: Optional[str] = None

    def build_request(self, seed: int) -> AccessRequest:
        fields = self.request_fields
        return AccessRequest(
            request_id=f"{self.case_id}-s{seed}",
            requester_id=fields["requester_id"],
            dataset_id=fields["dataset_id"],
            purpose=fields["purpose"],
            submitted_at=SUBMITTED_AT,
            declared_retention_days=fields.get("declared_retention_days"),
            sharing_scope=SharingScope(fields.get("sharing_scope", "internal")),
            destination_region=fields.get("destination_region"),
            external_party=fields.get("external_party"),
        )


@dataclass(frozen=True)
class BenchmarkSuite:
    suite_id: str
    org_seed: int
    sectors: tuple[str, ...]
    cases: tuple[BenchmarkCase, ...] = field(default_factory=tuple)

    def orgs(self) -> dict[str, OrgSpec]:
        return {sector: generate_synthetic_org(sector, self.org_seed) for sector in self.sectors}

    def case(self, case_id: str) -> BenchmarkCase:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise SuiteError(f"no case {case_id!r} in suite {self.suite_id}")

    @property
    def must_deny_ids(self) -> tuple[str, ...]:
        return tuple(c.case_id for c in self.cases if c.must == "deny")

    @property
    def must_approve_ids(self) -> tuple[str, ...]:
        return tuple(c.case_id for c in self.cases if c.must == "approve")

    def ground_truth_labels(self) -> dict[str, DecisionLabel]:
        return {c.case_id: c.ground_truth.label for c in self.cases}


def parse_suite(doc: dict[str, Any]) -> BenchmarkSuite:
    try:
        suite_id = doc["suite_id"]
        org_seed = int(doc["org_seed"])
        sectors = tuple(doc["sectors"])
        raw_cases = doc["cases"]
    except KeyError as exc:
        raise SuiteError(f"suite document missing key {exc.args[0]!r}") from exc

    cases: list[BenchmarkCase] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_cases):
        where = f"cases[{i}]"
        try:
            case_id = raw["case_id"]
            gt = raw["ground_truth"]
            case = BenchmarkCase(
                case_id=case_id,
                family=raw["family"],
                org=raw["org"],
                request_fields=dict(raw["request"]),
                ground_truth=GroundTruth(
                    label=DecisionLabel.parse(gt["label"]),
                    required_controls=tuple(gt.get("required_controls", ())),
                    expected_regulations=tuple(gt.get("expected_regulations", ())),
                ),
                must=raw.get("must"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SuiteError(f"{where}: {exc}") from exc
        if case.case_id in seen:
            raise SuiteError(f"{where}: duplicate case_id {case.case_id!r}")
        if case.org not in sectors:
            raise SuiteError(f"{where}: org {case.org!r} not in suite sectors {sectors}")
        if case.must not in (None, "deny", "approve"):
            raise SuiteError(f"{where}: must is {case.must!r}, expected deny, approve, or null")
        seen.add(case.case_id)
        cases.append(case)
    return BenchmarkSuite(suite_id=suite_id, org_seed=org_seed, sectors=sectors, cases=tuple(cases))


def read_fixture(name: str) -> dict[str, Any]:
    """Read a packaged benchmark fixture by file name."""
    text = resources.files("accessgov.bench").joinpath(f"fixtures/{name}").read_text("utf-8")
    return json.loads(text)


def load_suite(source: str | Path | None = None) -> BenchmarkSuite:
    """Load a suite from a file, or the packaged core suite when source is None."""
    if source is None:
        return parse_suite(read_fixture("cases_v1.json"))
    return parse_suite(json.loads(Path(source).read_text("utf-8")))
