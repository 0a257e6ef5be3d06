"""Prompt assembly for the remote reasoner.

Prompts may contain policy text and schema-level metadata only. The builder
projects metadata through an allowlist and refuses anything that looks like
row-level data, so a misconfigured caller fails loudly instead of leaking.
"""

from __future__ import annotations

import json
from typing import Any

from ..catalog.model import Dataset, UserRecord
from ..engine.model import AccessRequest

# Keys whose values would be row-level data rather than schema metadata.
RAW_VALUE_KEYS = frozenset(
    {"raw_values", "sample_rows", "sample_values", "cell_values", "records", "rows", "row_data"}
)

ALLOWED_METADATA_KEYS = frozenset(
    {
        "dataset_id",
        "dataset_name",
        "sensitivity",
        "region",
        "field_names",
        "field_categories",
        "scope_tags",
        "allowed_purposes",
        "allowed_departments",
        "max_retention_days",
        "requester_role",
        "requester_department",
        "requester_clearance",
        "purpose",
        "declared_retention_days",
        "sharing_scope",
        "destination_region",
        "external_party",
        "prior_signals",
    }
)


class PromptLeakageError(ValueError):
    """Metadata contained a raw-value field; the prompt was not built."""


def metadata_for_prompt(
    request: AccessRequest, dataset: Dataset | None, user: UserRecord | None
) -> dict[str, Any]:
    """Project request/catalog objects onto the prompt-safe metadata shape."""
    meta: dict[str, Any] = {
        "purpose": request.purpose,
        "declared_retention_days": request.declared_retention_days,
        "sharing_scope": request.sharing_scope.value,
        "destination_region": request.destination_region,
        "external_party": request.external_party,
    }
    if dataset is not None:
        meta.update(
            {
                "dataset_id": dataset.dataset_id,
                "dataset_name": dataset.name,
                "sensitivity": dataset.sensitivity.value,
                "region": dataset.region,
                "field_names": [f.name for f in dataset.fields],
                "field_categories": sorted(c.value for c in dataset.categories),
                "scope_tags": list(dataset.scope_tags),
                "allowed_purposes": list(dataset.allowed_purposes),
                "max_retention_days": dataset.max_retention_days,
            }
        )
    if user is not None:
        meta.update(
            {
                "requester_role": user.role,
                "requester_department": user.department,
                "requester_clearance": user.clearance.value,
            }
        )
    return meta


def _scan_for_raw_values(value: Any, path: str) -> None:
    if isinstance(value, dict):
        for key, child in value.items():
            if str(key).lower() in RAW_VALUE_KEYS:
                raise PromptLeakageError(f"raw-value field {path}.{key} may not enter a prompt")
            _scan_for_raw_values(child, f"{path}.{key}")
    elif isinstance(value, (list, tuple)):
        for i, child in enumerate(value):
            _scan_for_raw_values(child, f"{path}[{i}]")


def build_prompt(stage: str, policy_snippets: list[str], metadata: dict[str, Any]) -> str:
    """Render the stage prompt; raises PromptLeakageError on unsafe metadata."""
    unknown = set(metadata) - ALLOWED_METADATA_KEYS
    raw_keys = {k for k in unknown if str(k).lower() in RAW_VALUE_KEYS}
    if raw_keys:
        raise PromptLeakageError(f"raw-value fields may not enter a prompt: {sorted(raw_keys)}")
    if unknown:
        raise PromptLeakageError(f"metadata keys outside the allowlist: {sorted(unknown)}")
    _scan_for_raw_values(metadata, "metadata")

    lines = [
        f"Stage: {stage}",
        "Task: interpret the access request against the policies and metadata below.",
        "Respond with JSON: {\"status\", \"entities\", \"suggested_label\", \"citations\"}.",
        "",
        "Policies:",
    ]
    for snippet in policy_snippets:
        lines.append(f"- {snippet}")
    lines.append("")
    lines.append("Request metadata:")
    lines.append(json.dumps(metadata, sort_keys=True, ensure_ascii=False, default=str))
    return "\n".join(lines)
