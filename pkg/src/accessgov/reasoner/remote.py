"""Remote model client with conservative decoding and full resilience wrapping."""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..engine.model import AccessRequest, StageStatus
from .base import Reasoner, ReasonerUnavailable, ReasonerVerdict
from .prompt import build_prompt
from .resilience import (
    CallStats,
    CircuitState,
    Clock,
    NonRetryableCallError,
    ResilienceFailure,
    ResiliencePolicy,
    RetryBudget,
    TransientCallError,
    call_with_resilience,
)

MAX_TEMPERATURE = 0.3


@dataclass(frozen=True)
class RemoteModelConfig:
    endpoint: str
    model: str
    temperature: float = 0.0
    prompt_template: str = "stage_v1"
    request_timeout_ms: int = 10_000

    def __post_init__(self) -> None:
        if self.temperature > MAX_TEMPERATURE:
            raise ValueError(
                f"temperature {self.temperature} exceeds the {MAX_TEMPERATURE} ceiling; "
                "decisions must stay reproducible"
            )
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")
        if not self.endpoint:
            raise ValueError("endpoint must be nonempty")

    @classmethod
    def from_env(cls, env: Optional[dict[str, str]] = None) -> "RemoteModelConfig":
        env = dict(os.environ if env is None else env)
        return cls(
            endpoint=env.get("GOV_MODEL_ENDPOINT", ""),
            model=env.get("GOV_MODEL_NAME", "governance-default"),
            temperature=float(env.get("GOV_MODEL_TEMPERATURE", "0.0")),
            prompt_template=env.get("GOV_MODEL_PROMPT_TEMPLATE", "stage_v1"),
            request_timeout_ms=int(env.get("GOV_MODEL_TIMEOUT_MS", "10000")),
        )


def _http_transport(config: RemoteModelConfig) -> Callable[[str], str]:
    def send(prompt: str) -> str:
        import httpx

        try:
            response = httpx.post(
                config.endpoint,
                json={"model": config.model, "temperature": config.temperature, "prompt": prompt},
                timeout=config.request_timeout_ms / 1000.0,
            )
        except httpx.HTTPError as exc:
            raise TransientCallError(str(exc)) from exc
        if response.status_code >= 500:
            raise TransientCallError(f"server error {response.status_code}")
        if response.status_code != 200:
            raise NonRetryableCallError(f"rejected with status {response.status_code}")
        return response.text

    return send


class RemoteReasoner(Reasoner):
    """Calls a remote model endpoint; every failure maps to ReasonerUnavailable."""

    tag = "remote"

    def __init__(
        self,
        config: RemoteModelConfig,
        transport: Optional[Callable[[str], str]] = None,
        policy: Optional[ResiliencePolicy] = None,
        circuit: Optional[CircuitState] = None,
        clock: Optional[Clock] = None,
        rng: Optional[random.Random] = None,
        budget: Optional[RetryBudget] = None,
    ):
        super().__init__()
        self.config = config
        self._transport = transport or _http_transport(config)
        self.policy = policy or ResiliencePolicy(timeout_ms=config.request_timeout_ms)
        self.circuit = circuit or CircuitState()
        self._clock = clock or Clock()
        self._rng = rng or random.Random()
        self._budget = budget

    def interpret(
        self,
        stage: str,
        request: AccessRequest,
        policy_snippets: list[str],
        metadata: dict[str, Any],
    ) -> ReasonerVerdict:
        prompt = build_prompt(stage, policy_snippets, metadata)

        def attempt() -> ReasonerVerdict:
            return _parse_response(self._transport(prompt))

        stats = CallStats()
        result = call_with_resilience(
            attempt,
            policy=self.policy,
            circuit=self.circuit,
            clock=self._clock,
            rng=self._rng,
            budget=self._budget,
            stats=stats,
        )
        self.retry_count += stats.retries
        if isinstance(result, ResilienceFailure):
            raise ReasonerUnavailable(result.cause, result.detail)
        return result

    def model_settings(self) -> dict[str, Any]:
        return {
            "implementation": self.tag,
            "model": self.config.model,
            "temperature": self.config.temperature,
            "prompt_template": self.config.prompt_template,
        }


def _parse_response(text: str) -> ReasonerVerdict:
    """Validate the response schema; anything malformed is non-retryable."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NonRetryableCallError(f"unparseable model response: {exc}") from exc
    if not isinstance(doc, dict):
        raise NonRetryableCallError("model response must be a JSON object")
    unknown = set(doc) - {"status", "entities", "suggested_label", "citations", "note"}
    if unknown:
        raise NonRetryableCallError(f"model response has unknown keys: {sorted(unknown)}")
    status = doc.get("status")
    if status is not None:
        try:
            status = StageStatus(status)
        except ValueError:
            raise NonRetryableCallError(f"unknown status in model response: {status!r}") from None
    entities = doc.get("entities", {})
    if not isinstance(entities, dict):
        raise NonRetryableCallError("entities must be an object")
    return ReasonerVerdict(
        status=status,
        entities=entities,
        confidence_note=str(doc.get("note", "")),
        suggested_label=doc.get("suggested_label"),
        citations=[str(c) for c in doc.get("citations", [])],
    )
