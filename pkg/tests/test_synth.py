from __future__ import annotations

import pytest

from accessgov.catalog.load import dump_org
from accessgov.catalog.model import CatalogError, FieldCategory, SensitivityLabel
from accessgov.catalog.synth import SECTORS, generate_synthetic_org
from accessgov.engine.gates import default_gate_registry


@pytest.mark.parametrize("sector", SECTORS)
def test_generation_is_deterministic(sector):
    first = dump_org(generate_synthetic_org(sector, 7))
    second = dump_org(generate_synthetic_org(sector, 7))
    assert first == second


@pytest.mark.parametrize("sector", SECTORS)
def test_seed_changes_cosmetics_not_structure(sector):
    a = generate_synthetic_org(sector, 1)
    b = generate_synthetic_org(sector, 2)
    assert a.org_id != b.org_id
    assert set(a.catalog.datasets) == set(b.catalog.datasets)
    assert set(a.catalog.users) == set(b.catalog.users)
    assert [p.policy_id for p in a.policies] == [p.policy_id for p in b.policies]


@pytest.mark.parametrize("sector", SECTORS)
def test_every_sensitivity_level_present(sector):
    org = generate_synthetic_org(sector, 7)
    present = {d.sensitivity for d in org.catalog.datasets.values()}
    assert present == set(SensitivityLabel)


@pytest.mark.parametrize("sector", SECTORS)
def test_structural_minimums(sector):
    org = generate_synthetic_org(sector, 7)
    assert len(org.catalog.sod_rules) >= 2
    assert len(org.policies) >= 6
    assert any(not u.active for u in org.catalog.users.values())


@pytest.mark.parametrize("sector", SECTORS)
def test_every_gate_is_covered_by_some_policy(sector):
    org = generate_synthetic_org(sector, 7)
    covered = {tag for p in org.policies for tag in p.gate_tags}
    assert set(default_gate_registry().ids) <= covered


def test_sector_specific_content():
    fin = generate_synthetic_org("finance", 7)
    assert any(
        d.sensitivity is SensitivityLabel.RESTRICTED and FieldCategory.FINANCIAL in d.categories
        for d in fin.catalog.datasets.values()
    )
    hc = generate_synthetic_org("healthcare", 7)
    assert any(FieldCategory.HEALTH in d.categories for d in hc.catalog.datasets.values())


def test_unknown_sector_rejected():
    with pytest.raises(CatalogError):
        generate_synthetic_org("agriculture", 7)
