"""Deterministic keyword classifier for stated business purposes.

Gates and the rule-based reasoner share this table so that gate decisions
never depend on model output. Categories are scanned in a fixed order and the
first category with a matching keyword wins.
"""

from __future__ import annotations

import re
from typing import Optional

from .model import PurposeCategory

PURPOSE_KEYWORDS: dict[PurposeCategory, tuple[str, ...]] = {
    PurposeCategory.ANALYTICS_MODELING: (
        "train",
        "model",
        "churn",
        "predict",
        "forecast",
        "machine learning",
        "analytics",
    ),
    PurposeCategory.REPORTING: (
        "report",
        "dashboard",
        "trend",
        "kpi",
        "summary",
        "board deck",
        "metrics review",
    ),
    PurposeCategory.MARKETING: (
        "marketing",
        "campaign",
        "promotion",
        "outreach",
        "advertising",
    ),
    PurposeCategory.COMPLIANCE_AUDIT: (
        "audit",
        "compliance",
        "sox",
        "regulatory",
        "evidence",
    ),
    PurposeCategory.INCIDENT_RESPONSE: (
        "incident",
        "outage",
        "urgent",
        "emergency",
        "breach",
        "hotfix",
    ),
    PurposeCategory.DATA_SUBJECT_REQUEST: (
        "data subject",
        "dsar",
        "gdpr",
        "erasure",
        "portability",
        "subject access",
    ),
    PurposeCategory.OPERATIONS: (
        "operations",
        "maintenance",
        "testing",
        "support",
        "monitoring",
        "capacity",
    ),
}


def classify_purpose(purpose: str) -> tuple[Optional[PurposeCategory], Optional[str]]:
    """Return (category, matched keyword), or (None, None) when nothing matches."""
    text = purpose.lower()
    for category, keywords in PURPOSE_KEYWORDS.items():
        for keyword in keywords:
            if re.search(rf"\b{re.escape(keyword)}\b", text):
                return category, keyword
    return None, None


def purpose_is_clear(purpose: str) -> bool:
    """A purpose is clear when it is nonempty and classifies to a category."""
    if not purpose.strip():
        return False
    category, _ = classify_purpose(purpose)
    return category is not None
