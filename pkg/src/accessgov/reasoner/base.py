"""Reasoner port: the model-assisted interpretation step behind stages 1, 4, 5.

A reasoner only ever suggests. Gates and aggregation own the final label, so a
lenient or wrong verdict can soften signals but can never bypass a hard gate.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Optional

from ..engine.model import AccessRequest, StageStatus


class ReasonerUnavailable(Exception):
    """Interpretation could not be produced. Maps to a fail-safe deny upstream."""

    def __init__(self, cause: str, detail: str = ""):
        self.cause = cause
        self.detail = detail
        super().__init__(f"{cause}: {detail}" if detail else cause)


@dataclass
class ReasonerVerdict:
    """One stage-level suggestion from a reasoner.

    entities carries extracted values (purpose_category, retention_days,
    sharing_scope, regulation_tags, trigger names, proposed control ids);
    suggested_label is diagnostic only and never decides anything.
    """

    status: Optional[StageStatus] = None
    entities: dict[str, Any] = field(default_factory=dict)
    confidence_note: str = ""
    suggested_label: Optional[str] = None
    citations: list[str] = field(default_factory=list)


class Reasoner(abc.ABC):
    """Interpretation port used by the model-assisted stages."""

    tag = "abstract"

    def __init__(self) -> None:
        self.retry_count = 0

    @abc.abstractmethod
    def interpret(
        self,
        stage: str,
        request: AccessRequest,
        policy_snippets: list[str],
        metadata: dict[str, Any],
    ) -> ReasonerVerdict:
        """Produce a verdict for one stage, or raise ReasonerUnavailable."""

    def model_settings(self) -> dict[str, Any]:
        return {"implementation": self.tag}
