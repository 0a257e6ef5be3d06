from __future__ import annotations

from datetime import datetime, timezone
from typing import Optional

import pytest

from accessgov.catalog.synth import generate_synthetic_org
from accessgov.engine.model import AccessRequest, SharingScope

SUBMITTED = datetime(2024, 6, 1, 9, 0, 0, tzinfo=timezone.utc)


def make_request(
    requester_id: str,
    dataset_id: str,
    purpose: str,
    *,
    request_id: str = "req-1",
    retention: Optional[int] = None,
    sharing: str = "internal",
    destination_region: Optional[str] = None,
    external_party: Optional[str] = None,
) -> AccessRequest:
    return AccessRequest(
        request_id=request_id,
        requester_id=requester_id,
        dataset_id=dataset_id,
        purpose=purpose,
        submitted_at=SUBMITTED,
        declared_retention_days=retention,
        sharing_scope=SharingScope(sharing),
        destination_region=destination_region,
        external_party=external_party,
    )


@pytest.fixture(scope="session")
def tech_org():
    return generate_synthetic_org("technology", 7)


@pytest.fixture(scope="session")
def fin_org():
    return generate_synthetic_org("finance", 7)


@pytest.fixture(scope="session")
def hc_org():
    return generate_synthetic_org("healthcare", 7)
