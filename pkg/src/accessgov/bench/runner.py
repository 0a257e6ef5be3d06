"""Benchmark runner: executes a suite across seeds and collects outcomes.

Each seed shuffles case order, binds the reasoner to that seed, and decides
every case. A controller exception never aborts a run; it is recorded as a
fail-safe Deny and flagged on the case result.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from ..audit import AuditLog
from ..engine.controller import decide
from ..engine.model import DecisionOutcome
from ..reasoner.base import Reasoner
from ..reasoner.rule import RuleReasoner
from ..reasoner.scripted import ScriptedReasoner
from .cases import BenchmarkSuite, load_suite, read_fixture

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = (3, 5, 7, 11, 13)


@dataclass(frozen=True)
class RunConfig:
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    mode: str = "scripted"  # rule | scripted | remote
    fixture: Optional[Any] = None  # dict, path, or packaged fixture file name
    audit_dir: Optional[Path] = None
    audit_log: Optional[AuditLog] = None
    ablate_compliance: bool = False
    remote_factory: Optional[Callable[[], Reasoner]] = None


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    seed: int
    label: str
    raw_label: str
    gate_id: Optional[str]
    control_ids: tuple[str, ...]
    regulation_tags: tuple[str, ...]
    latency_ms: int
    retries: int = 0
    error: Optional[str] = None


@dataclass
class RunResult:
    suite_id: str
    mode: str
    seeds: tuple[int, ...]
    results: list[CaseResult] = field(default_factory=list)
    labels_by_seed: dict[int, dict[str, str]] = field(default_factory=dict)
    first_seed_outcomes: dict[str, Optional[DecisionOutcome]] = field(default_factory=dict)
    raw_labels_first: dict[str, str] = field(default_factory=dict)
    final_labels_first: dict[str, str] = field(default_factory=dict)
    total_retries: int = 0
    errors: list[tuple[int, str, str]] = field(default_factory=list)
    audit_paths: dict[int, Path] = field(default_factory=dict)

    @property
    def latencies_ms(self) -> list[int]:
        return [r.latency_ms for r in self.results]


def _fixture_doc(config: RunConfig) -> dict[str, Any]:
    if isinstance(config.fixture, dict):
        return config.fixture
    if config.fixture is None:
        return read_fixture("scripted_v1.json")
    path = Path(config.fixture)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return read_fixture(str(config.fixture))


def _reasoner_for(config: RunConfig, scripted: Optional[ScriptedReasoner],
                  case_id: str, seed: int, rule: RuleReasoner) -> Reasoner:
    if config.mode == "rule":
        return rule
    if config.mode == "scripted":
        assert scripted is not None
        return scripted.for_case(case_id, seed)
    if config.mode == "remote":
        if config.remote_factory is None:
            raise ValueError("remote mode requires a remote_factory")
        return config.remote_factory()
    raise ValueError(f"unknown benchmark mode {config.mode!r}")


def run_benchmark(suite: Optional[BenchmarkSuite] = None,
                  config: Optional[RunConfig] = None) -> RunResult:
    suite = suite or load_suite()
    config = config or RunConfig()
    orgs = suite.orgs()
    scripted = ScriptedReasoner(_fixture_doc(config)) if config.mode == "scripted" else None

    run = RunResult(suite_id=suite.suite_id, mode=config.mode, seeds=tuple(config.seeds))
    first_seed = config.seeds[0] if config.seeds else None
    for seed in config.seeds:
        rule = RuleReasoner()
        order = list(suite.cases)
        random.Random(seed).shuffle(order)
        seed_log: Optional[AuditLog] = config.audit_log
        if config.audit_dir is not None:
            path = Path(config.audit_dir) / f"audit_seed_{seed}.jsonl"
            seed_log = AuditLog(path)
            run.audit_paths[seed] = path
        labels: dict[str, str] = {}

        for case in order:
            org = orgs[case.org]
            request = case.build_request(seed)
            reasoner = _reasoner_for(config, scripted, case.case_id, seed, rule)
            retries_before = reasoner.retry_count
            outcome: Optional[DecisionOutcome] = None
            error: Optional[str] = None
            try:
                outcome = decide(
                    request,
                    org.policies,
                    org.catalog,
                    reasoner=reasoner,
                    ablate_compliance=config.ablate_compliance,
                )
            except Exception as exc:  # fail safe, never abort the run
                error = f"{type(exc).__name__}: {exc}"
                logger.exception("case %s failed on seed %d; recording fail-safe deny",
                                 case.case_id, seed)
                run.errors.append((seed, case.case_id, error))

            retries = reasoner.retry_count - retries_before
            run.total_retries += retries

            if outcome is not None:
                result = CaseResult(
                    case_id=case.case_id,
                    seed=seed,
                    label=outcome.label.code,
                    raw_label=outcome.raw_label.code,
                    gate_id=outcome.gate_hit.gate_id if outcome.gate_hit else None,
                    control_ids=tuple(c.control_id for c in outcome.controls),
                    regulation_tags=tuple(
                        outcome.rationale.machine_fields.get("regulation_tags", [])
                    ),
                    latency_ms=outcome.latency_ms,
                    retries=retries,
                )
                if seed_log is not None:
                    seed_log.record_decision(
                        request,
                        outcome,
                        model_settings=reasoner.model_settings(),
                        retry_count=retries,
                        org_id=org.org_id,
                        case_id=case.case_id,
                    )
            else:
                result = CaseResult(
                    case_id=case.case_id, seed=seed, label="D", raw_label="D",
                    gate_id=None, control_ids=(), regulation_tags=(), latency_ms=0,
                    retries=retries, error=error,
                )

            run.results.append(result)
            labels[case.case_id] = result.label
            if seed == first_seed:
                run.first_seed_outcomes[case.case_id] = outcome
                run.final_labels_first[case.case_id] = result.label
                run.raw_labels_first[case.case_id] = result.raw_label

        run.labels_by_seed[seed] = labels
    return run
