"""Deterministic keyword/attribute reasoner. No model, no network, no state."""

from __future__ import annotations

import re
from typing import Any

from ..engine.model import AccessRequest
from ..engine.purpose import classify_purpose
from .base import Reasoner, ReasonerVerdict


class RuleReasoner(Reasoner):
    """Extracts entities with the shared keyword tables and suggests nothing.

    Leaving status unset makes the stage rubric decide, which keeps rule-mode
    decisions exactly reproducible from the catalog and purpose text alone.
    """

    tag = "rule"

    def interpret(
        self,
        stage: str,
        request: AccessRequest,
        policy_snippets: list[str],
        metadata: dict[str, Any],
    ) -> ReasonerVerdict:
        entities: dict[str, Any] = {}
        if stage == "context":
            category, keyword = classify_purpose(request.purpose)
            entities["purpose_category"] = category.value if category else None
            entities["purpose_clear"] = bool(request.purpose.strip()) and category is not None
            entities["matched_keyword"] = keyword
            entities["retention_days"] = _retention_days(request)
            entities["sharing_scope"] = request.sharing_scope.value
        return ReasonerVerdict(status=None, entities=entities, confidence_note="rule tables")


def _retention_days(request: AccessRequest) -> int | None:
    if request.declared_retention_days is not None:
        return request.declared_retention_days
    match = re.search(r"\b(\d+)\s*day", request.purpose.lower())
    return int(match.group(1)) if match else None
