"""Catalog and org loading from JSON and CSV documents.

Loading is atomic: every record is validated first and a single failure
anywhere rejects the whole load, with each offending record named by its
location (JSON path or CSV row number).

JSON org document layout:
  org_id, sector
  datasets[]: dataset_id, name, sensitivity, region, max_retention_days?,
              scope_tags[], allowed_purposes[], allowed_departments[],
              fields[]: name, category, label
  users[]: user_id, display_name, role, department, clearance, active
  sod_rules[]: rule_id, a, b, citation?
  agreements: parties[]: party_id, kind, has_dsa, has_dpa
              region_pairs[]: from_region, to_region, dpo_approval_on_file
  policies[]: policy documents (see engine.policy)

CSV variants cover the catalog sections. datasets.csv is one row per field
with dataset-level columns repeated; list columns are pipe-joined.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from ..engine.model import PurposeCategory
from ..engine.policy import PolicyStore
from .model import (
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
)

_DATASET_KEYS = {
    "dataset_id", "name", "sensitivity", "region", "max_retention_days",
    "scope_tags", "allowed_purposes", "allowed_departments", "fields",
}
_FIELD_KEYS = {"name", "category", "label"}
_USER_KEYS = {"user_id", "display_name", "role", "department", "clearance", "active"}
_SOD_KEYS = {"rule_id", "a", "b", "citation"}
_PARTY_KEYS = {"party_id", "kind", "has_dsa", "has_dpa"}
_REGION_KEYS = {"from_region", "to_region", "dpo_approval_on_file"}


class CatalogLoadError(CatalogError):
    """Validation failures for a whole load; nothing was applied."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        lines = "; ".join(f"{loc}: {msg}" for loc, msg in errors)
        super().__init__(f"catalog load rejected ({len(errors)} error(s)): {lines}")


class _Collector:
    def __init__(self) -> None:
        self.errors: list[tuple[str, str]] = []

    def add(self, location: str, message: str) -> None:
        self.errors.append((location, message))

    def raise_if_any(self) -> None:
        if self.errors:
            raise CatalogLoadError(self.errors)


@dataclass
class OrgSpec:
    """A loaded organization: catalog plus its policy store."""

    org_id: str
    sector: str
    catalog: MetadataCatalog
    policies: PolicyStore

    def to_doc(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "org_id": self.org_id,
            "sector": self.sector,
            "datasets": [_dataset_doc(d) for d in self.catalog.datasets.values()],
            "users": [_user_doc(u) for u in self.catalog.users.values()],
            "sod_rules": [
                {"rule_id": r.rule_id, "a": r.a, "b": r.b, "citation": r.citation}
                for r in self.catalog.sod_rules
            ],
            "agreements": {
                "parties": [
                    {"party_id": p.party_id, "kind": p.kind, "has_dsa": p.has_dsa, "has_dpa": p.has_dpa}
                    for p in self.catalog.agreements.parties.values()
                ],
                "region_pairs": [
                    {"from_region": fr, "to_region": to, "dpo_approval_on_file": ok}
                    for (fr, to), ok in self.catalog.agreements.region_pairs.items()
                ],
            },
            "policies": self.policies.to_doc(),
        }


def _dataset_doc(d: Dataset) -> dict[str, Any]:
    return {
        "dataset_id": d.dataset_id,
        "name": d.name,
        "sensitivity": d.sensitivity.value,
        "region": d.region,
        "max_retention_days": d.max_retention_days,
        "scope_tags": list(d.scope_tags),
        "allowed_purposes": list(d.allowed_purposes),
        "allowed_departments": list(d.allowed_departments),
        "fields": [
            {"name": f.name, "category": f.category.value,
             "label": f.label.value if f.label else None}
            for f in d.fields
        ],
    }


def _user_doc(u: UserRecord) -> dict[str, Any]:
    return {
        "user_id": u.user_id,
        "display_name": u.display_name,
        "role": u.role,
        "department": u.department,
        "clearance": u.clearance.value,
        "active": u.active,
    }


def _parse_dataset(doc: dict[str, Any], loc: str, errors: _Collector) -> Optional[Dataset]:
    unknown = set(doc) - _DATASET_KEYS
    if unknown:
        errors.add(loc, f"unknown keys: {sorted(unknown)}")
        return None
    try:
        sensitivity = SensitivityLabel.parse(doc.get("sensitivity", ""))
    except CatalogError as exc:
        errors.add(f"{loc}.sensitivity", str(exc))
        return None
    fields: list[DatasetField] = []
    for i, fdoc in enumerate(doc.get("fields", [])):
        floc = f"{loc}.fields[{i}]"
        unknown_f = set(fdoc) - _FIELD_KEYS
        if unknown_f:
            errors.add(floc, f"unknown keys: {sorted(unknown_f)}")
            return None
        try:
            category = FieldCategory.parse(fdoc.get("category", ""))
        except CatalogError as exc:
            errors.add(f"{floc}.category", str(exc))
            return None
        label_raw = fdoc.get("label")
        label = None
        if label_raw is not None:
            try:
                label = SensitivityLabel.parse(label_raw)
            except CatalogError as exc:
                errors.add(f"{floc}.label", str(exc))
                return None
        fields.append(DatasetField(name=str(fdoc.get("name", "")), category=category, label=label))
    for purpose in doc.get("allowed_purposes", []):
        try:
            PurposeCategory(purpose)
        except ValueError:
            errors.add(f"{loc}.allowed_purposes", f"unknown purpose category: {purpose!r}")
            return None
    try:
        return Dataset(
            dataset_id=str(doc.get("dataset_id", "")),
            name=str(doc.get("name", "")),
            sensitivity=sensitivity,
            region=str(doc.get("region", "")),
            fields=tuple(fields),
            scope_tags=tuple(doc.get("scope_tags", [])),
            allowed_purposes=tuple(doc.get("allowed_purposes", [])),
            allowed_departments=tuple(doc.get("allowed_departments", [])),
            max_retention_days=doc.get("max_retention_days"),
        )
    except CatalogError as exc:
        errors.add(loc, str(exc))
        return None


def _parse_user(doc: dict[str, Any], loc: str, errors: _Collector) -> Optional[UserRecord]:
    unknown = set(doc) - _USER_KEYS
    if unknown:
        errors.add(loc, f"unknown keys: {sorted(unknown)}")
        return None
    try:
        clearance = SensitivityLabel.parse(doc.get("clearance", ""))
    except CatalogError as exc:
        errors.add(f"{loc}.clearance", str(exc))
        return None
    try:
        return UserRecord(
            user_id=str(doc.get("user_id", "")),
            display_name=str(doc.get("display_name", "")),
            role=str(doc.get("role", "")),
            department=str(doc.get("department", "")),
            clearance=clearance,
            active=bool(doc.get("active", True)),
        )
    except CatalogError as exc:
        errors.add(loc, str(exc))
        return None


def parse_catalog(doc: dict[str, Any]) -> MetadataCatalog:
    """Build a MetadataCatalog from the catalog sections of an org document."""
    errors = _Collector()
    datasets: dict[str, Dataset] = {}
    for i, ddoc in enumerate(doc.get("datasets", [])):
        ds = _parse_dataset(ddoc, f"datasets[{i}]", errors)
        if ds is not None:
            if ds.dataset_id in datasets:
                errors.add(f"datasets[{i}]", f"duplicate dataset_id {ds.dataset_id!r}")
            datasets[ds.dataset_id] = ds
    users: dict[str, UserRecord] = {}
    for i, udoc in enumerate(doc.get("users", [])):
        user = _parse_user(udoc, f"users[{i}]", errors)
        if user is not None:
            if user.user_id in users:
                errors.add(f"users[{i}]", f"duplicate user_id {user.user_id!r}")
            users[user.user_id] = user
    sod_rules: list[SoDRule] = []
    seen_pairs: set[frozenset[str]] = set()
    for i, sdoc in enumerate(doc.get("sod_rules", [])):
        loc = f"sod_rules[{i}]"
        unknown = set(sdoc) - _SOD_KEYS
        if unknown:
            errors.add(loc, f"unknown keys: {sorted(unknown)}")
            continue
        try:
            rule = SoDRule(
                rule_id=str(sdoc.get("rule_id", "")),
                a=str(sdoc.get("a", "")),
                b=str(sdoc.get("b", "")),
                citation=str(sdoc.get("citation", "")),
            )
        except CatalogError as exc:
            errors.add(loc, str(exc))
            continue
        pair = frozenset((rule.a, rule.b))
        if pair in seen_pairs:
            errors.add(loc, f"duplicate sod pair {sorted(pair)}")
            continue
        seen_pairs.add(pair)
        sod_rules.append(rule)
    agreements = AgreementsRegistry()
    adoc = doc.get("agreements", {})
    for i, pdoc in enumerate(adoc.get("parties", [])):
        loc = f"agreements.parties[{i}]"
        unknown = set(pdoc) - _PARTY_KEYS
        if unknown:
            errors.add(loc, f"unknown keys: {sorted(unknown)}")
            continue
        try:
            agreements.upsert_party(
                ExternalParty(
                    party_id=str(pdoc.get("party_id", "")),
                    kind=str(pdoc.get("kind", "recipient")),
                    has_dsa=bool(pdoc.get("has_dsa", False)),
                    has_dpa=bool(pdoc.get("has_dpa", False)),
                )
            )
        except CatalogError as exc:
            errors.add(loc, str(exc))
    for i, rdoc in enumerate(adoc.get("region_pairs", [])):
        loc = f"agreements.region_pairs[{i}]"
        unknown = set(rdoc) - _REGION_KEYS
        if unknown:
            errors.add(loc, f"unknown keys: {sorted(unknown)}")
            continue
        agreements.region_pairs[(str(rdoc.get("from_region", "")), str(rdoc.get("to_region", "")))] = bool(
            rdoc.get("dpo_approval_on_file", False)
        )
    errors.raise_if_any()
    return MetadataCatalog(
        datasets=datasets, users=users, sod_rules=tuple(sod_rules), agreements=agreements
    )


def parse_org(doc: dict[str, Any]) -> OrgSpec:
    """Parse a full org document (catalog plus policies) atomically."""
    catalog = parse_catalog(doc)
    policies = PolicyStore.from_docs(doc.get("policies", []))
    return OrgSpec(
        org_id=str(doc.get("org_id", "")),
        sector=str(doc.get("sector", "")),
        catalog=catalog,
        policies=policies,
    )


def load_org(source: Union[str, Path]) -> OrgSpec:
    return parse_org(json.loads(Path(source).read_text(encoding="utf-8")))


def dump_org(org: OrgSpec) -> str:
    return json.dumps(org.to_doc(), indent=2, ensure_ascii=False)


# CSV section loaders ---------------------------------------------------------

def _split(raw: str) -> list[str]:
    return [part for part in raw.split("|") if part]


def load_datasets_csv(source: Union[str, Path]) -> list[Dataset]:
    """datasets.csv: one row per field, dataset columns repeated."""
    errors = _Collector()
    grouped: dict[str, dict[str, Any]] = {}
    with open(source, newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.DictReader(fh), start=2):
            loc = f"{Path(source).name}:row {row_no}"
            dataset_id = (row.get("dataset_id") or "").strip()
            if not dataset_id:
                errors.add(loc, "dataset_id is empty")
                continue
            entry = grouped.setdefault(
                dataset_id,
                {
                    "dataset_id": dataset_id,
                    "name": row.get("name", ""),
                    "sensitivity": row.get("sensitivity", ""),
                    "region": row.get("region", ""),
                    "max_retention_days": int(row["max_retention_days"])
                    if (row.get("max_retention_days") or "").strip()
                    else None,
                    "scope_tags": _split(row.get("scope_tags", "")),
                    "allowed_purposes": _split(row.get("allowed_purposes", "")),
                    "allowed_departments": _split(row.get("allowed_departments", "")),
                    "fields": [],
                    "_loc": loc,
                },
            )
            if entry["sensitivity"] != row.get("sensitivity", ""):
                errors.add(loc, f"dataset {dataset_id}: inconsistent sensitivity across rows")
            field_doc = {
                "name": (row.get("field_name") or "").strip(),
                "category": (row.get("field_category") or "").strip(),
                "label": (row.get("field_label") or "").strip() or None,
            }
            # Validate per physical row so errors point at the offending line,
            # not at the first row of the dataset group.
            field_ok = True
            if not field_doc["name"]:
                errors.add(f"{loc}.field_name", "field_name is empty")
                field_ok = False
            try:
                FieldCategory.parse(field_doc["category"])
            except CatalogError as exc:
                errors.add(f"{loc}.field_category", str(exc))
                field_ok = False
            if field_doc["label"] is not None:
                try:
                    SensitivityLabel.parse(field_doc["label"])
                except CatalogError as exc:
                    errors.add(f"{loc}.field_label", str(exc))
                    field_ok = False
            if field_ok:
                entry["fields"].append(field_doc)
    datasets = []
    for entry in grouped.values():
        loc = entry.pop("_loc")
        ds = _parse_dataset(entry, loc, errors)
        if ds is not None:
            datasets.append(ds)
    errors.raise_if_any()
    return datasets


def load_users_csv(source: Union[str, Path]) -> list[UserRecord]:
    errors = _Collector()
    users = []
    with open(source, newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.DictReader(fh), start=2):
            loc = f"{Path(source).name}:row {row_no}"
            doc = {
                "user_id": row.get("user_id", ""),
                "display_name": row.get("display_name", ""),
                "role": row.get("role", ""),
                "department": row.get("department", ""),
                "clearance": row.get("clearance", ""),
                "active": (row.get("active", "true").strip().lower() in ("true", "1", "yes")),
            }
            user = _parse_user(doc, loc, errors)
            if user is not None:
                users.append(user)
    errors.raise_if_any()
    return users


def load_catalog_csv(directory: Union[str, Path]) -> MetadataCatalog:
    """Load a catalog from CSV section files in a directory.

    Expects datasets.csv and users.csv; sod_rules.csv, agreements_parties.csv,
    and agreements_regions.csv are optional.
    """
    directory = Path(directory)
    errors = _Collector()
    datasets = {d.dataset_id: d for d in load_datasets_csv(directory / "datasets.csv")}
    users = {u.user_id: u for u in load_users_csv(directory / "users.csv")}
    sod_rules: list[SoDRule] = []
    sod_path = directory / "sod_rules.csv"
    if sod_path.exists():
        with open(sod_path, newline="", encoding="utf-8") as fh:
            for row_no, row in enumerate(csv.DictReader(fh), start=2):
                loc = f"sod_rules.csv:row {row_no}"
                try:
                    sod_rules.append(
                        SoDRule(
                            rule_id=row.get("rule_id", ""),
                            a=row.get("a", ""),
                            b=row.get("b", ""),
                            citation=row.get("citation", ""),
                        )
                    )
                except CatalogError as exc:
                    errors.add(loc, str(exc))
    agreements = AgreementsRegistry()
    parties_path = directory / "agreements_parties.csv"
    if parties_path.exists():
        with open(parties_path, newline="", encoding="utf-8") as fh:
            for row_no, row in enumerate(csv.DictReader(fh), start=2):
                loc = f"agreements_parties.csv:row {row_no}"
                try:
                    agreements.upsert_party(
                        ExternalParty(
                            party_id=row.get("party_id", ""),
                            kind=row.get("kind", "recipient"),
                            has_dsa=row.get("has_dsa", "").strip().lower() in ("true", "1", "yes"),
                            has_dpa=row.get("has_dpa", "").strip().lower() in ("true", "1", "yes"),
                        )
                    )
                except CatalogError as exc:
                    errors.add(loc, str(exc))
    regions_path = directory / "agreements_regions.csv"
    if regions_path.exists():
        with open(regions_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                agreements.region_pairs[(row.get("from_region", ""), row.get("to_region", ""))] = (
                    row.get("dpo_approval_on_file", "").strip().lower() in ("true", "1", "yes")
                )
    errors.raise_if_any()
    return MetadataCatalog(
        datasets=datasets, users=users, sod_rules=tuple(sod_rules), agreements=agreements
    )
