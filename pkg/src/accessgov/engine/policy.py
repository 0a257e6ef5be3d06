"""Policy documents and the scope-indexed policy store."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Union


class PolicyError(ValueError):
    """Raised when policy documents violate the schema."""


@dataclass(frozen=True)
class Policy:
    """One governance policy. The policy_id doubles as its citation key."""

    policy_id: str
    title: str
    text: str
    scope_tags: tuple[str, ...] = ()
    gate_tags: tuple[str, ...] = ()
    conflicts_with: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.policy_id:
            raise PolicyError("policy_id must be nonempty")

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "policy_id": self.policy_id,
            "title": self.title,
            "text": self.text,
            "scope_tags": list(self.scope_tags),
            "gate_tags": list(self.gate_tags),
        }
        if self.conflicts_with:
            doc["conflicts_with"] = list(self.conflicts_with)
        return doc

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Policy":
        unknown = set(doc) - {
            "policy_id", "title", "text", "scope_tags", "gate_tags", "conflicts_with",
        }
        if unknown:
            raise PolicyError(f"policy document has unknown keys: {sorted(unknown)}")
        return cls(
            policy_id=str(doc.get("policy_id", "")),
            title=str(doc.get("title", "")),
            text=str(doc.get("text", "")),
            scope_tags=tuple(doc.get("scope_tags", [])),
            gate_tags=tuple(doc.get("gate_tags", [])),
            conflicts_with=tuple(doc.get("conflicts_with", [])),
        )


class PolicyStore:
    """Immutable-by-convention collection of policies with scope lookups.

    A policy whose scope_tags include "all" applies to every dataset.
    """

    def __init__(self, policies: Iterable[Policy] = ()):
        self._policies: list[Policy] = []
        self._by_id: dict[str, Policy] = {}
        for policy in policies:
            if policy.policy_id in self._by_id:
                raise PolicyError(f"duplicate policy_id: {policy.policy_id}")
            self._policies.append(policy)
            self._by_id[policy.policy_id] = policy

    def __len__(self) -> int:
        return len(self._policies)

    def __iter__(self):
        return iter(self._policies)

    def get(self, policy_id: str) -> Optional[Policy]:
        return self._by_id.get(policy_id)

    @property
    def ids(self) -> list[str]:
        return [p.policy_id for p in self._policies]

    def relevant_to(self, scope_tags: Iterable[str]) -> list[Policy]:
        """Policies whose scope intersects the given tags (or org-wide ones)."""
        tags = set(scope_tags)
        out = []
        for policy in self._policies:
            scope = set(policy.scope_tags)
            if "all" in scope or scope & tags:
                out.append(policy)
        return out

    def citing_gate(self, gate_id: str) -> Optional[Policy]:
        for policy in self._policies:
            if gate_id in policy.gate_tags:
                return policy
        return None

    def to_doc(self) -> list[dict[str, Any]]:
        return [p.to_doc() for p in self._policies]

    @classmethod
    def from_docs(cls, docs: Iterable[dict[str, Any]]) -> "PolicyStore":
        return cls(Policy.from_doc(d) for d in docs)


def load_policies(source: Union[str, Path]) -> PolicyStore:
    """Load a policy store from a JSON file holding a list of policy documents."""
    raw = json.loads(Path(source).read_text(encoding="utf-8"))
    docs = raw["policies"] if isinstance(raw, dict) else raw
    return PolicyStore.from_docs(docs)


def dump_policies(store: PolicyStore) -> str:
    return json.dumps({"policies": store.to_doc()}, indent=2, ensure_ascii=False)
