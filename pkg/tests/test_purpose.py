from __future__ import annotations

import re

import pytest

from accessgov.engine.model import PurposeCategory
from accessgov.engine.purpose import PURPOSE_KEYWORDS, classify_purpose, purpose_is_clear


def _oracle(text: str):
    """Reference classifier: same tables, naive scan in declared order."""
    lowered = text.lower()
    for category, keywords in PURPOSE_KEYWORDS.items():
        for keyword in keywords:
            if re.search(rf"\b{re.escape(keyword)}\b", lowered):
                return category, keyword
    return None, None


SAMPLES = [
    "Train a churn model for Q4 retention analysis",
    "Monthly analytics review of public product adoption metrics",
    "Support operations dashboard for weekly ticket volumes",
    "Board deck on product profit margins",
    "Q4 marketing campaign audience planning",
    "Quarterly SOX audit evidence collection",
    "Urgent incident fix for medication dosing outage",
    "GDPR data subject request export for patient portability",
    "Historical sales trend analysis for annual planning",
    "Need all customer data for a cross-team project",
    "Routine maintenance window for the billing cluster",
    "",
    "just need it",
    "FORECAST revenue per region",
]


@pytest.mark.parametrize("text", SAMPLES)
def test_matches_reference_scan(text):
    assert classify_purpose(text) == _oracle(text)


def test_first_matching_category_wins():
    # "model" (analytics) appears before "report" (reporting) in table order,
    # regardless of word position in the sentence.
    category, keyword = classify_purpose("report on the new model rollout")
    assert category is PurposeCategory.ANALYTICS_MODELING
    assert keyword == "model"


def test_word_boundaries_respected():
    # "analysis" must not match the keyword "analytics".
    category, _ = classify_purpose("sales trend analysis")
    assert category is PurposeCategory.REPORTING  # via "trend"
    assert classify_purpose("remodeling the kitchen") == (None, None)


def test_clear_requires_text_and_category():
    assert purpose_is_clear("Quarterly budget variance summary")
    assert not purpose_is_clear("")
    assert not purpose_is_clear("   ")
    assert not purpose_is_clear("need access please")


def test_every_category_has_keywords():
    assert set(PURPOSE_KEYWORDS) == set(PurposeCategory)
    assert all(keywords for keywords in PURPOSE_KEYWORDS.values())
