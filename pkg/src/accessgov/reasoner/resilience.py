"""Retry, backoff, budget, and circuit breaker around flaky remote calls.

Time and randomness are injected so every path is testable with a fake clock
and a seeded RNG; no test ever sleeps for real.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional


class TransientCallError(Exception):
    """Retryable failure (timeouts, 5xx-style errors, dropped connections)."""


class NonRetryableCallError(Exception):
    """Permanent failure (malformed response, auth rejection); never retried."""


@dataclass(frozen=True)
class ResilienceFailure:
    """Terminal failure of a resilient call; cause drives the fail-safe mapping."""

    cause: str  # timeout | budget_exhausted | circuit_open | non_retryable
    attempts: int
    elapsed_ms: int
    detail: str = ""


class Clock:
    """Wall clock in milliseconds; replaceable by FakeClock in tests."""

    def now_ms(self) -> float:
        return time.monotonic() * 1000.0

    def sleep_ms(self, ms: float) -> None:
        if ms > 0:
            time.sleep(ms / 1000.0)


class FakeClock(Clock):
    def __init__(self, start_ms: float = 0.0):
        self._now = start_ms
        self.sleeps: list[float] = []

    def now_ms(self) -> float:
        return self._now

    def sleep_ms(self, ms: float) -> None:
        self.sleeps.append(ms)
        self._now += max(ms, 0.0)

    def advance(self, ms: float) -> None:
        self._now += ms


@dataclass
class ResiliencePolicy:
    timeout_ms: int = 10_000
    max_attempts: int = 3
    backoff_base_ms: float = 200.0
    backoff_multiplier: float = 2.0
    jitter_fraction: float = 0.2
    overall_budget_ms: int = 60_000

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if not (0.0 <= self.jitter_fraction < 1.0):
            raise ValueError("jitter_fraction must be in [0, 1)")

    def delay_bounds_ms(self, retry_index: int) -> tuple[float, float]:
        """Inclusive delay envelope before retry number retry_index (0-based)."""
        center = self.backoff_base_ms * (self.backoff_multiplier**retry_index)
        return center * (1.0 - self.jitter_fraction), center * (1.0 + self.jitter_fraction)

    def delay_ms(self, retry_index: int, rng: random.Random) -> float:
        low, high = self.delay_bounds_ms(retry_index)
        return rng.uniform(low, high)


class RetryBudget:
    """Shared pool of retries across calls, refilled every window."""

    def __init__(self, max_retries: int, window_ms: float, clock: Optional[Clock] = None):
        self.max_retries = max_retries
        self.window_ms = window_ms
        self._clock = clock or Clock()
        self._lock = threading.Lock()
        self._window_start = self._clock.now_ms()
        self._used = 0

    def try_take(self) -> bool:
        with self._lock:
            now = self._clock.now_ms()
            if now - self._window_start >= self.window_ms:
                self._window_start = now
                self._used = 0
            if self._used >= self.max_retries:
                return False
            self._used += 1
            return True


class CircuitState:
    """Minimal circuit breaker: closed -> open -> half_open -> closed/open.

    While open, calls short-circuit until open_duration_ms has elapsed; then
    exactly one half-open probe is admitted at a time.
    """

    CLOSED = "closed"
    OPEN = "open"
    HALF_OPEN = "half_open"

    def __init__(self, failure_threshold: int = 5, open_duration_ms: float = 30_000.0,
                 clock: Optional[Clock] = None):
        self.failure_threshold = failure_threshold
        self.open_duration_ms = open_duration_ms
        self._clock = clock or Clock()
        self._lock = threading.Lock()
        self._state = self.CLOSED
        self._consecutive_failures = 0
        self._opened_at = 0.0
        self._probe_in_flight = False

    @property
    def state(self) -> str:
        with self._lock:
            self._maybe_half_open_locked()
            return self._state

    def _maybe_half_open_locked(self) -> None:
        if self._state == self.OPEN:
            if self._clock.now_ms() - self._opened_at >= self.open_duration_ms:
                self._state = self.HALF_OPEN
                self._probe_in_flight = False

    def admit(self) -> bool:
        """Whether a call may proceed right now."""
        with self._lock:
            self._maybe_half_open_locked()
            if self._state == self.CLOSED:
                return True
            if self._state == self.HALF_OPEN and not self._probe_in_flight:
                self._probe_in_flight = True
                return True
            return False

    def record_success(self) -> None:
        with self._lock:
            self._state = self.CLOSED
            self._consecutive_failures = 0
            self._probe_in_flight = False

    def record_failure(self) -> None:
        with self._lock:
            self._maybe_half_open_locked()
            if self._state == self.HALF_OPEN:
                self._trip_locked()
                return
            self._consecutive_failures += 1
            if self._consecutive_failures >= self.failure_threshold:
                self._trip_locked()

    def _trip_locked(self) -> None:
        self._state = self.OPEN
        self._opened_at = self._clock.now_ms()
        self._consecutive_failures = 0
        self._probe_in_flight = False


@dataclass
class CallStats:
    attempts: int = 0
    retries: int = 0
    delays_ms: list[float] = field(default_factory=list)


def call_with_resilience(
    call: Callable[[], Any],
    policy: ResiliencePolicy,
    circuit: CircuitState,
    clock: Optional[Clock] = None,
    rng: Optional[random.Random] = None,
    budget: Optional[RetryBudget] = None,
    stats: Optional[CallStats] = None,
):
    """Run call with retries, jittered backoff, budget, and circuit breaking.

    Returns the call's value on success, otherwise a ResilienceFailure. Raised
    call errors never escape; they are classified and converted.
    """
    clock = clock or Clock()
    rng = rng or random.Random()
    started = clock.now_ms()
    attempts = 0
    last_detail = ""

    while True:
        if not circuit.admit():
            return ResilienceFailure(
                cause="circuit_open",
                attempts=attempts,
                elapsed_ms=int(clock.now_ms() - started),
                detail="circuit breaker is open",
            )
        attempts += 1
        if stats is not None:
            stats.attempts = attempts
        try:
            result = call()
        except NonRetryableCallError as exc:
            circuit.record_failure()
            return ResilienceFailure(
                cause="non_retryable",
                attempts=attempts,
                elapsed_ms=int(clock.now_ms() - started),
                detail=str(exc),
            )
        except TransientCallError as exc:
            circuit.record_failure()
            last_detail = str(exc)
        else:
            circuit.record_success()
            return result

        # Transient failure: decide whether another attempt is allowed.
        elapsed = clock.now_ms() - started
        if attempts >= policy.max_attempts:
            return ResilienceFailure(
                cause="budget_exhausted",
                attempts=attempts,
                elapsed_ms=int(elapsed),
                detail=f"attempt limit reached: {last_detail}",
            )
        if elapsed >= policy.overall_budget_ms:
            return ResilienceFailure(
                cause="timeout",
                attempts=attempts,
                elapsed_ms=int(elapsed),
                detail=f"latency budget exceeded: {last_detail}",
            )
        if budget is not None and not budget.try_take():
            return ResilienceFailure(
                cause="budget_exhausted",
                attempts=attempts,
                elapsed_ms=int(elapsed),
                detail=f"retry budget exhausted: {last_detail}",
            )
        delay = policy.delay_ms(attempts - 1, rng)
        if stats is not None:
            stats.retries += 1
            stats.delays_ms.append(delay)
        clock.sleep_ms(delay)
