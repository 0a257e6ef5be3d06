"""Append-only decision audit log with hash-chained rationale integrity.

Records are written as one JSON object per line. Each record carries a
sha256 digest over the canonical rationale bytes so any consumer, in any
process, can recompute and verify it without trusting the writer.

A log instance assumes a single writer per path; readers may open the same
file concurrently.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .engine.model import AccessRequest, DecisionLabel, DecisionOutcome
from .engine.rationale import canonical_rationale_bytes

logger = logging.getLogger(__name__)

HASH_ALG = "sha256"


class AuditError(Exception):
    pass


class AuditWriteError(AuditError):
    """Raised when a record cannot be persisted and the log is fail-closed."""


def rationale_digest(machine_fields: dict[str, Any], summary: str) -> str:
    return hashlib.sha256(canonical_rationale_bytes(machine_fields, summary)).hexdigest()


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    request_id: str
    requester_id: str
    dataset_id: str
    purpose: str
    decision: str
    raw_label: str
    gate_id: Optional[str]
    controls: tuple[str, ...]
    policy_citations: tuple[str, ...]
    submitted_at: str
    decided_at: str
    latency_ms: int
    retry_count: int
    model_settings: dict[str, Any] = field(default_factory=dict)
    rationale_summary: str = ""
    machine_fields: dict[str, Any] = field(default_factory=dict)
    rationale_hash: str = ""
    hash_alg: str = HASH_ALG
    org_id: str = ""
    case_id: str = ""

    def verify_hash(self) -> bool:
        return self.rationale_hash == rationale_digest(self.machine_fields, self.rationale_summary)

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "request_id": self.request_id,
            "requester_id": self.requester_id,
            "dataset_id": self.dataset_id,
            "purpose": self.purpose,
            "decision": self.decision,
            "raw_label": self.raw_label,
            "gate_id": self.gate_id,
            "controls": list(self.controls),
            "policy_citations": list(self.policy_citations),
            "submitted_at": self.submitted_at,
            "decided_at": self.decided_at,
            "latency_ms": self.latency_ms,
            "retry_count": self.retry_count,
            "model_settings": self.model_settings,
            "rationale_summary": self.rationale_summary,
            "machine_fields": self.machine_fields,
            "rationale_hash": self.rationale_hash,
            "hash_alg": self.hash_alg,
            "org_id": self.org_id,
            "case_id": self.case_id,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> AuditRecord:
        return cls(
            seq=int(doc["seq"]),
            request_id=str(doc["request_id"]),
            requester_id=str(doc["requester_id"]),
            dataset_id=str(doc["dataset_id"]),
            purpose=str(doc["purpose"]),
            decision=str(doc["decision"]),
            raw_label=str(doc["raw_label"]),
            gate_id=doc.get("gate_id"),
            controls=tuple(doc.get("controls", ())),
            policy_citations=tuple(doc.get("policy_citations", ())),
            submitted_at=str(doc["submitted_at"]),
            decided_at=str(doc["decided_at"]),
            latency_ms=int(doc["latency_ms"]),
            retry_count=int(doc.get("retry_count", 0)),
            model_settings=dict(doc.get("model_settings", {})),
            rationale_summary=str(doc.get("rationale_summary", "")),
            machine_fields=dict(doc.get("machine_fields", {})),
            rationale_hash=str(doc.get("rationale_hash", "")),
            hash_alg=str(doc.get("hash_alg", HASH_ALG)),
            org_id=str(doc.get("org_id", "")),
            case_id=str(doc.get("case_id", "")),
        )


def build_record(
    seq: int,
    request: AccessRequest,
    outcome: DecisionOutcome,
    *,
    model_settings: Optional[dict[str, Any]] = None,
    retry_count: int = 0,
    org_id: str = "",
    case_id: str = "",
    decided_at: Optional[datetime] = None,
) -> AuditRecord:
    """Assemble an audit record from a decided request.

    decided_at defaults to now; submitted_at is back-dated by the measured
    engine latency so decided_at - submitted_at == latency_ms holds exactly.
    """
    ended = decided_at or datetime.now(timezone.utc)
    started = ended - timedelta(milliseconds=outcome.latency_ms)
    machine_fields = dict(outcome.rationale.machine_fields)
    summary = outcome.rationale.summary
    return AuditRecord(
        seq=seq,
        request_id=outcome.request_id,
        requester_id=request.requester_id,
        dataset_id=request.dataset_id,
        purpose=request.purpose,
        decision=outcome.label.value,
        raw_label=outcome.raw_label.value,
        gate_id=outcome.gate_hit.gate_id if outcome.gate_hit else None,
        controls=tuple(c.control_id for c in outcome.controls),
        policy_citations=tuple(outcome.rationale.cited_policies),
        submitted_at=started.isoformat(),
        decided_at=ended.isoformat(),
        latency_ms=outcome.latency_ms,
        retry_count=retry_count,
        model_settings=dict(model_settings or {}),
        rationale_summary=summary,
        machine_fields=machine_fields,
        rationale_hash=rationale_digest(machine_fields, summary),
        org_id=org_id,
        case_id=case_id,
    )


class AuditLog:
    """JSONL-backed append-only log with strictly increasing sequence numbers."""

    def __init__(
        self,
        path: str | Path,
        *,
        fail_closed: bool = True,
        on_write_error: Optional[Callable[[Exception], None]] = None,
    ) -> None:
        self.path = Path(path)
        self.fail_closed = fail_closed
        self._on_write_error = on_write_error
        self._lock = threading.Lock()
        self._next_seq = self._scan_next_seq()

    def _scan_next_seq(self) -> int:
        if not self.path.exists():
            return 1
        top = 0
        for record in self._iter_file():
            top = max(top, record.seq)
        return top + 1

    def _iter_file(self) -> Iterator[AuditRecord]:
        try:
            text = self.path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                yield AuditRecord.from_doc(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise AuditError(f"{self.path}:{lineno}: corrupt audit record: {exc}") from exc

    def append(self, record: AuditRecord) -> AuditRecord:
        """Append a record, assigning the next sequence number."""
        with self._lock:
            stamped = replace(record, seq=self._next_seq)
            line = json.dumps(stamped.to_doc(), separators=(",", ":"), sort_keys=True)
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()
            except OSError as exc:
                if self._on_write_error is not None:
                    self._on_write_error(exc)
                if self.fail_closed:
                    raise AuditWriteError(f"could not persist audit record: {exc}") from exc
                logger.warning("audit write failed (fail-open): %s", exc)
                return stamped
            self._next_seq += 1
            return stamped

    def record_decision(
        self,
        request: AccessRequest,
        outcome: DecisionOutcome,
        *,
        model_settings: Optional[dict[str, Any]] = None,
        retry_count: int = 0,
        org_id: str = "",
        case_id: str = "",
    ) -> AuditRecord:
        record = build_record(
            0,
            request,
            outcome,
            model_settings=model_settings,
            retry_count=retry_count,
            org_id=org_id,
            case_id=case_id,
        )
        return self.append(record)

    def records(self) -> list[AuditRecord]:
        return list(self._iter_file())

    def __len__(self) -> int:
        return sum(1 for _ in self._iter_file())

    def query(
        self,
        *,
        request_id: Optional[str] = None,
        requester_id: Optional[str] = None,
        dataset_id: Optional[str] = None,
        decision: Optional[str] = None,
        gate_id: Optional[str] = None,
        case_id: Optional[str] = None,
        since_seq: Optional[int] = None,
        limit: Optional[int] = None,
    ) -> list[AuditRecord]:
        """Return records matching every provided filter, in sequence order."""
        want_decision = DecisionLabel.parse(decision).value if decision else None
        out: list[AuditRecord] = []
        for record in self._iter_file():
            if request_id is not None and record.request_id != request_id:
                continue
            if requester_id is not None and record.requester_id != requester_id:
                continue
            if dataset_id is not None and record.dataset_id != dataset_id:
                continue
            if want_decision is not None and record.decision != want_decision:
                continue
            if gate_id is not None and record.gate_id != gate_id:
                continue
            if case_id is not None and record.case_id != case_id:
                continue
            if since_seq is not None and record.seq < since_seq:
                continue
            out.append(record)
            if limit is not None and len(out) >= limit:
                break
        return out

    def verify_all(self) -> list[int]:
        """Return sequence numbers of records whose rationale digest fails."""
        return [r.seq for r in self._iter_file() if not r.verify_hash()]

    def latency_stats(self, percentiles: Sequence[int] = (50, 95)) -> dict[str, Any]:
        values = [r.latency_ms for r in self._iter_file()]
        stats: dict[str, Any] = {"count": len(values)}
        for p in percentiles:
            key = f"p{int(p)}_ms"
            stats[key] = nearest_rank_percentile(values, p) if values else None
        if values:
            stats["mean_ms"] = sum(values) / len(values)
        else:
            stats["mean_ms"] = None
        return stats

    def export_csv(self, target: str | Path) -> int:
        """Write all records to CSV; returns the number of rows written."""
        rows = list(self._iter_file())
        with Path(target).open("w", encoding="utf-8", newline="") as handle:
            dump_csv(rows, handle)
        return len(rows)


def dump_csv(records: Iterable[AuditRecord], handle: Any) -> int:
    """Write records as CSV to an open text handle; returns the row count."""
    writer = csv.DictWriter(handle, fieldnames=_CSV_COLUMNS)
    writer.writeheader()
    count = 0
    for record in records:
        writer.writerow(_record_to_csv_row(record))
        count += 1
    return count


_CSV_COLUMNS = [
    "seq", "request_id", "requester_id", "dataset_id", "purpose",
    "decision", "raw_label", "gate_id", "controls", "policy_citations",
    "submitted_at", "decided_at", "latency_ms", "retry_count",
    "model_settings", "rationale_summary", "machine_fields",
    "rationale_hash", "hash_alg", "org_id", "case_id",
]


def _record_to_csv_row(record: AuditRecord) -> dict[str, Any]:
    doc = record.to_doc()
    doc["gate_id"] = record.gate_id or ""
    doc["controls"] = "|".join(record.controls)
    doc["policy_citations"] = "|".join(record.policy_citations)
    doc["model_settings"] = json.dumps(record.model_settings, sort_keys=True)
    doc["machine_fields"] = json.dumps(record.machine_fields, sort_keys=True)
    return doc


def load_csv(source: str | Path) -> list[AuditRecord]:
    """Read records back from a CSV export (inverse of AuditLog.export_csv)."""
    out: list[AuditRecord] = []
    with Path(source).open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            doc = dict(row)
            doc["gate_id"] = row["gate_id"] or None
            doc["controls"] = row["controls"].split("|") if row["controls"] else []
            doc["policy_citations"] = (
                row["policy_citations"].split("|") if row["policy_citations"] else []
            )
            doc["model_settings"] = json.loads(row["model_settings"])
            doc["machine_fields"] = json.loads(row["machine_fields"])
            out.append(AuditRecord.from_doc(doc))
    return out


def nearest_rank_percentile(values: Iterable[float], p: float) -> float:
    """Nearest-rank percentile: rank = ceil(p/100 * n) over the sorted values."""
    data = sorted(values)
    if not data:
        raise AuditError("percentile of empty sequence")
    if not 0 < p <= 100:
        raise AuditError(f"percentile must be in (0, 100], got {p}")
    rank = math.ceil(p / 100.0 * len(data))
    return data[max(rank, 1) - 1]
