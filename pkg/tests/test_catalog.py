from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from accessgov.catalog.load import (
    CatalogLoadError,
    dump_org,
    load_catalog_csv,
    load_datasets_csv,
    load_org,
    load_users_csv,
    parse_org,
)
from accessgov.catalog.model import (
    AgreementsRegistry,
    CatalogError,
    Dataset,
    DatasetField,
    ExternalParty,
    FieldCategory,
    MetadataCatalog,
    SensitivityLabel,
    SoDRule,
    UserRecord,
    effective_sensitivity,
)


def _field(name="f", category=FieldCategory.OPERATIONAL, label=SensitivityLabel.INTERNAL):
    return DatasetField(name=name, category=category, label=label)


def _dataset(dataset_id="d1", sensitivity=SensitivityLabel.INTERNAL, fields=None, **kwargs):
    return Dataset(
        dataset_id=dataset_id,
        name=dataset_id,
        sensitivity=sensitivity,
        region="us",
        fields=tuple(fields or [_field()]),
        max_retention_days=kwargs.pop("max_retention_days", 90),
        **kwargs,
    )


class TestSensitivityLabel:
    def test_total_order(self):
        order = [
            SensitivityLabel.PUBLIC,
            SensitivityLabel.INTERNAL,
            SensitivityLabel.CONFIDENTIAL,
            SensitivityLabel.RESTRICTED,
        ]
        for lower, higher in zip(order, order[1:]):
            assert lower < higher
            assert higher >= lower

    def test_parse_accepts_case_variants(self):
        assert SensitivityLabel.parse("restricted") is SensitivityLabel.RESTRICTED
        assert SensitivityLabel.parse("Public") is SensitivityLabel.PUBLIC

    def test_parse_rejects_unknown(self):
        with pytest.raises(CatalogError):
            SensitivityLabel.parse("top_secret")


class TestDatasetInvariants:
    def test_dataset_sensitivity_must_cover_fields(self):
        with pytest.raises(CatalogError):
            _dataset(
                sensitivity=SensitivityLabel.INTERNAL,
                fields=[_field(label=SensitivityLabel.RESTRICTED)],
            )

    def test_equal_sensitivity_is_allowed(self):
        ds = _dataset(
            sensitivity=SensitivityLabel.CONFIDENTIAL,
            fields=[_field(label=SensitivityLabel.CONFIDENTIAL)],
        )
        assert ds.sensitivity is SensitivityLabel.CONFIDENTIAL

    def test_retention_must_be_positive(self):
        with pytest.raises(CatalogError):
            _dataset(max_retention_days=0)

    def test_labels_missing_detected(self):
        ds = _dataset(
            sensitivity=SensitivityLabel.CONFIDENTIAL,
            fields=[DatasetField(name="x", category=FieldCategory.PII, label=None)],
        )
        assert ds.labels_missing()


class TestSoD:
    def test_self_pair_rejected(self):
        with pytest.raises(CatalogError):
            SoDRule(rule_id="r", a="same", b="same")

    def test_match_is_unordered(self):
        rule = SoDRule(rule_id="r", a="payment_initiator", b="payment_approvals")
        assert rule.matches("payment_initiator", "payment_approvals")
        assert rule.matches("payment_approvals", "payment_initiator")
        assert not rule.matches("payment_initiator", "other_dataset")


class TestAgreements:
    def test_unknown_party_defaults_to_no_agreements(self):
        reg = AgreementsRegistry()
        assert reg.has_dsa("ghost") is False
        assert reg.has_dpa("ghost") is False
        assert reg.dpo_approval_on_file("us", "mars") is False

    def test_known_party_flags(self):
        reg = AgreementsRegistry(
            parties={"p": ExternalParty(party_id="p", kind="processor", has_dsa=True)}
        )
        assert reg.has_dsa("p") is True
        assert reg.has_dpa("p") is False
        assert reg.is_processor("p") is True


class TestEffectiveSensitivity:
    def _catalog(self, *datasets):
        return MetadataCatalog(datasets={d.dataset_id: d for d in datasets})

    def test_max_label_wins(self):
        cat = self._catalog(
            _dataset("a", SensitivityLabel.INTERNAL),
            _dataset(
                "b",
                SensitivityLabel.RESTRICTED,
                fields=[_field(label=SensitivityLabel.RESTRICTED)],
            ),
        )
        label, _ = effective_sensitivity(cat, ["a", "b"])
        assert label is SensitivityLabel.RESTRICTED

    def test_pii_location_composition_flag(self):
        cat = self._catalog(
            _dataset(
                "combo",
                SensitivityLabel.CONFIDENTIAL,
                fields=[
                    _field("email", FieldCategory.PII, SensitivityLabel.CONFIDENTIAL),
                    _field("geo", FieldCategory.LOCATION, SensitivityLabel.INTERNAL),
                ],
            )
        )
        _, flags = effective_sensitivity(cat, ["combo"])
        assert "pii_location" in flags

    def test_quasi_identifier_flag_needs_three_fields(self):
        fields = [
            _field("city", FieldCategory.LOCATION),
            _field("zip", FieldCategory.LOCATION),
            _field("shift", FieldCategory.OPERATIONAL),
        ]
        cat = self._catalog(_dataset("qi", SensitivityLabel.INTERNAL, fields=fields))
        _, flags = effective_sensitivity(cat, ["qi"])
        assert "quasi_identifier_set" in flags

        cat2 = self._catalog(_dataset("qi2", SensitivityLabel.INTERNAL, fields=fields[:2]))
        _, flags2 = effective_sensitivity(cat2, ["qi2"])
        assert "quasi_identifier_set" not in flags2

    @given(st.data())
    def test_adding_datasets_never_lowers_label(self, data):
        labels = list(SensitivityLabel)
        datasets = [
            _dataset(
                f"d{i}",
                sensitivity=data.draw(st.sampled_from(labels)),
                fields=[_field(label=SensitivityLabel.PUBLIC)],
            )
            for i in range(4)
        ]
        cat = self._catalog(*datasets)
        ids = [d.dataset_id for d in datasets]
        subset = data.draw(st.lists(st.sampled_from(ids), min_size=1, max_size=4, unique=True))
        superset = list(dict.fromkeys(subset + ids))
        small, _ = effective_sensitivity(cat, subset)
        big, _ = effective_sensitivity(cat, superset)
        assert big >= small


class TestOrgDocument:
    def test_round_trip(self, tech_org):
        doc = json.loads(dump_org(tech_org))
        again = parse_org(doc)
        assert dump_org(again) == dump_org(tech_org)

    def test_load_org_from_file(self, tmp_path, hc_org):
        path = tmp_path / "org.json"
        path.write_text(dump_org(hc_org), encoding="utf-8")
        loaded = load_org(path)
        assert loaded.org_id == hc_org.org_id
        assert set(loaded.catalog.datasets) == set(hc_org.catalog.datasets)

    def test_rejects_every_bad_record_atomically(self, tech_org):
        doc = json.loads(dump_org(tech_org))
        doc["datasets"][0]["sensitivity"] = "bogus"
        doc["users"][1]["clearance"] = "also_bogus"
        with pytest.raises(CatalogLoadError) as err:
            parse_org(doc)
        message = str(err.value)
        assert "datasets[0]" in message
        assert "users[1]" in message

    def test_rejects_unknown_keys(self, tech_org):
        doc = json.loads(dump_org(tech_org))
        doc["datasets"][0]["surprise"] = 1
        with pytest.raises(CatalogLoadError):
            parse_org(doc)

    def test_duplicate_dataset_ids_rejected(self, tech_org):
        doc = json.loads(dump_org(tech_org))
        doc["datasets"].append(dict(doc["datasets"][0]))
        with pytest.raises(CatalogLoadError) as err:
            parse_org(doc)
        assert "duplicate" in str(err.value)


class TestCsvLoaders:
    DATASET_ROWS = [
        "dataset_id,name,sensitivity,region,max_retention_days,scope_tags,allowed_purposes,allowed_departments,field_name,field_category,field_label",
        "d1,Dataset One,Confidential,us,90,pii|crm,reporting,finance,email,pii,Confidential",
        "d1,Dataset One,Confidential,us,90,pii|crm,reporting,finance,amount,financial,Internal",
        "d2,Dataset Two,Public,us,30,metrics,reporting|analytics_modeling,,views,public_metric,Public",
    ]
    USER_ROWS = [
        "user_id,display_name,role,department,clearance,active",
        "u1,Someone,analyst,finance,Confidential,true",
        "u2,Another,auditor,audit,Internal,false",
    ]

    def test_datasets_csv(self, tmp_path):
        path = tmp_path / "datasets.csv"
        path.write_text("\n".join(self.DATASET_ROWS) + "\n", encoding="utf-8")
        datasets = load_datasets_csv(path)
        by_id = {d.dataset_id: d for d in datasets}
        assert set(by_id) == {"d1", "d2"}
        assert by_id["d1"].scope_tags == ("pii", "crm")
        assert len(by_id["d1"].fields) == 2
        assert by_id["d2"].allowed_purposes == ("reporting", "analytics_modeling")

    def test_datasets_csv_reports_row_numbers(self, tmp_path):
        rows = list(self.DATASET_ROWS)
        rows[2] = rows[2].replace("financial", "made_up_category")
        path = tmp_path / "datasets.csv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        with pytest.raises(CatalogLoadError) as err:
            load_datasets_csv(path)
        assert "row 3" in str(err.value)

    def test_datasets_csv_sensitivity_consistency(self, tmp_path):
        rows = list(self.DATASET_ROWS)
        rows[2] = rows[2].replace("d1,Dataset One,Confidential", "d1,Dataset One,Internal")
        path = tmp_path / "datasets.csv"
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        with pytest.raises(CatalogLoadError):
            load_datasets_csv(path)

    def test_users_csv(self, tmp_path):
        path = tmp_path / "users.csv"
        path.write_text("\n".join(self.USER_ROWS) + "\n", encoding="utf-8")
        users = load_users_csv(path)
        assert users[0].user_id == "u1"
        assert users[0].clearance is SensitivityLabel.CONFIDENTIAL
        assert users[1].active is False

    def test_directory_loader(self, tmp_path):
        (tmp_path / "datasets.csv").write_text("\n".join(self.DATASET_ROWS) + "\n", "utf-8")
        (tmp_path / "users.csv").write_text("\n".join(self.USER_ROWS) + "\n", "utf-8")
        catalog = load_catalog_csv(tmp_path)
        assert set(catalog.datasets) == {"d1", "d2"}
        assert set(catalog.users) == {"u1", "u2"}


def test_user_record_clearance_is_label():
    user = UserRecord(
        user_id="u",
        display_name="U",
        role="analyst",
        department="x",
        clearance=SensitivityLabel.RESTRICTED,
    )
    assert user.clearance >= SensitivityLabel.CONFIDENTIAL
