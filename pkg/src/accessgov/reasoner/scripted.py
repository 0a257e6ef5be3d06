"""Scripted reasoner: replays recorded per-case, per-stage verdicts.

Fixtures make benchmark runs reproducible without any model in the loop and
let the harness replay a captured model transcript bit-for-bit.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

from ..engine.model import AccessRequest, StageStatus
from .base import Reasoner, ReasonerVerdict


class ScriptedFixtureError(ValueError):
    """The fixture document is malformed."""


class ScriptedReasoner(Reasoner):
    """Replays fixture entries keyed by (case_id, stage), with seed overrides."""

    tag = "scripted"

    def __init__(self, fixture: dict[str, Any], case_id: Optional[str] = None,
                 seed: Optional[int] = None):
        super().__init__()
        if "cases" not in fixture:
            raise ScriptedFixtureError("fixture must contain a 'cases' map")
        self._fixture = fixture
        self._case_id = case_id
        self._seed = seed

    @classmethod
    def from_file(cls, source: Union[str, Path]) -> "ScriptedReasoner":
        return cls(json.loads(Path(source).read_text(encoding="utf-8")))

    def for_case(self, case_id: str, seed: Optional[int] = None) -> "ScriptedReasoner":
        """A view of the same fixture bound to one case and run seed."""
        return ScriptedReasoner(self._fixture, case_id=case_id, seed=seed)

    def interpret(
        self,
        stage: str,
        request: AccessRequest,
        policy_snippets: list[str],
        metadata: dict[str, Any],
    ) -> ReasonerVerdict:
        case_id = self._case_id or request.request_id
        entry = self._lookup(case_id, stage)
        if entry is None:
            return ReasonerVerdict(status=None, confidence_note="no scripted entry")
        status = entry.get("status")
        return ReasonerVerdict(
            status=StageStatus(status) if status else None,
            entities=dict(entry.get("entities", {})),
            confidence_note=entry.get("note", "scripted replay"),
            suggested_label=entry.get("suggested_label"),
            citations=list(entry.get("citations", [])),
        )

    def _lookup(self, case_id: str, stage: str) -> Optional[dict[str, Any]]:
        if self._seed is not None:
            overrides = self._fixture.get("seed_overrides", {}).get(str(self._seed), {})
            entry = overrides.get(case_id, {}).get(stage)
            if entry is not None:
                return entry
        return self._fixture.get("cases", {}).get(case_id, {}).get(stage)
