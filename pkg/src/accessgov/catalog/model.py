"""Metadata catalog: datasets, users, separation-of-duties rules, agreements.

The catalog holds schema-level metadata only (names, labels, flags). It never
stores row-level data values, so nothing sensitive can leak out of it into
prompts or rationales.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional


class CatalogError(ValueError):
    """Raised when catalog content violates the schema or its invariants."""


class SensitivityLabel(str, Enum):
    """Ordered sensitivity scale. Public < Internal < Confidential < Restricted."""

    PUBLIC = "Public"
    INTERNAL = "Internal"
    CONFIDENTIAL = "Confidential"
    RESTRICTED = "Restricted"

    @property
    def rank(self) -> int:
        return _SENSITIVITY_ORDER.index(self)

    def __lt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, SensitivityLabel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, SensitivityLabel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, SensitivityLabel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, SensitivityLabel):
            return NotImplemented
        return self.rank >= other.rank

    @classmethod
    def parse(cls, raw: str) -> "SensitivityLabel":
        for label in cls:
            if label.value.lower() == str(raw).strip().lower():
                return label
        raise CatalogError(f"unknown sensitivity label: {raw!r}")


_SENSITIVITY_ORDER = [
    SensitivityLabel.PUBLIC,
    SensitivityLabel.INTERNAL,
    SensitivityLabel.CONFIDENTIAL,
    SensitivityLabel.RESTRICTED,
]


class FieldCategory(str, Enum):
    PII = "pii"
    FINANCIAL = "financial"
    HEALTH = "health"
    LOCATION = "location"
    PUBLIC_METRIC = "public_metric"
    OPERATIONAL = "operational"

    @classmethod
    def parse(cls, raw: str) -> "FieldCategory":
        try:
            return cls(str(raw).strip().lower())
        except ValueError:
            raise CatalogError(f"unknown field category: {raw!r}") from None


# Field categories that act as quasi-identifiers when several appear together.
QUASI_IDENTIFIER_CATEGORIES = frozenset({FieldCategory.LOCATION, FieldCategory.OPERATIONAL})


@dataclass(frozen=True)
class DatasetField:
    name: str
    category: FieldCategory
    label: Optional[SensitivityLabel]


@dataclass(frozen=True)
class Dataset:
    """Schema-level description of one governed dataset."""

    dataset_id: str
    name: str
    sensitivity: SensitivityLabel
    region: str
    fields: tuple[DatasetField, ...]
    scope_tags: tuple[str, ...] = ()
    allowed_purposes: tuple[str, ...] = ()
    allowed_departments: tuple[str, ...] = ()
    max_retention_days: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.dataset_id:
            raise CatalogError("dataset_id must be nonempty")
        labelled = [f.label for f in self.fields if f.label is not None]
        if labelled and max(l.rank for l in labelled) > self.sensitivity.rank:
            raise CatalogError(
                f"dataset {self.dataset_id}: sensitivity {self.sensitivity.value} is below "
                "the maximum field label"
            )
        if self.max_retention_days is not None and self.max_retention_days <= 0:
            raise CatalogError(f"dataset {self.dataset_id}: max_retention_days must be positive")

    @property
    def categories(self) -> frozenset[FieldCategory]:
        return frozenset(f.category for f in self.fields)

    @property
    def pii_present(self) -> bool:
        return FieldCategory.PII in self.categories

    def labels_missing(self) -> bool:
        return any(f.label is None for f in self.fields)


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    display_name: str
    role: str
    department: str
    clearance: SensitivityLabel
    active: bool = True

    def __post_init__(self) -> None:
        if not self.user_id:
            raise CatalogError("user_id must be nonempty")


@dataclass(frozen=True)
class SoDRule:
    """Unordered conflicting pair of a role/permission and a dataset/permission."""

    rule_id: str
    a: str
    b: str
    citation: str = ""

    def __post_init__(self) -> None:
        if not self.rule_id:
            raise CatalogError("sod rule_id must be nonempty")
        if self.a == self.b:
            raise CatalogError(f"sod rule {self.rule_id}: pair members must differ")

    def matches(self, role: str, dataset_id: str) -> bool:
        return {role, dataset_id} == {self.a, self.b}


@dataclass(frozen=True)
class ExternalParty:
    party_id: str
    kind: str  # "recipient" or "processor"
    has_dsa: bool = False
    has_dpa: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("recipient", "processor"):
            raise CatalogError(f"party {self.party_id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class RegionPairApproval:
    from_region: str
    to_region: str
    dpo_approval_on_file: bool = False


@dataclass
class AgreementsRegistry:
    """Data sharing / processing agreements and DPO transfer approvals.

    Lookups for unknown parties or region pairs return False; absence of an
    agreement is never an error, it is a denial signal.
    """

    parties: dict[str, ExternalParty] = field(default_factory=dict)
    region_pairs: dict[tuple[str, str], bool] = field(default_factory=dict)

    def has_dsa(self, party_id: Optional[str]) -> bool:
        if not party_id:
            return False
        party = self.parties.get(party_id)
        return bool(party and party.has_dsa)

    def has_dpa(self, party_id: Optional[str]) -> bool:
        if not party_id:
            return False
        party = self.parties.get(party_id)
        return bool(party and party.has_dpa)

    def is_processor(self, party_id: Optional[str]) -> bool:
        if not party_id:
            return False
        party = self.parties.get(party_id)
        return bool(party and party.kind == "processor")

    def dpo_approval_on_file(self, from_region: str, to_region: str) -> bool:
        return self.region_pairs.get((from_region, to_region), False)

    def upsert_party(self, party: ExternalParty) -> None:
        self.parties[party.party_id] = party


@dataclass
class MetadataCatalog:
    """Read-only handle over datasets, users, SoD rules, and agreements."""

    datasets: dict[str, Dataset] = field(default_factory=dict)
    users: dict[str, UserRecord] = field(default_factory=dict)
    sod_rules: tuple[SoDRule, ...] = ()
    agreements: AgreementsRegistry = field(default_factory=AgreementsRegistry)

    def get_dataset(self, dataset_id: str) -> Optional[Dataset]:
        return self.datasets.get(dataset_id)

    def get_user(self, user_id: str) -> Optional[UserRecord]:
        return self.users.get(user_id)

    def check_sod(self, user: UserRecord, dataset_id: str) -> Optional[SoDRule]:
        """First SoD rule violated by this user/dataset pairing, if any."""
        for rule in self.sod_rules:
            if rule.matches(user.role, dataset_id):
                return rule
        return None


def effective_sensitivity(
    catalog: MetadataCatalog, dataset_ids: Iterable[str]
) -> tuple[SensitivityLabel, list[str]]:
    """Sensitivity of the composed set of datasets plus composition flags.

    The effective label is the maximum over constituent field labels and
    dataset labels. Composition flags mark risk that only appears when
    categories are combined: pii with location, pii with financial, and
    quasi-identifier accumulations of three or more fields.
    """
    ids = list(dataset_ids)
    datasets = []
    for dataset_id in ids:
        ds = catalog.get_dataset(dataset_id)
        if ds is None:
            raise CatalogError(f"unknown dataset: {dataset_id}")
        datasets.append(ds)
    if not datasets:
        raise CatalogError("effective_sensitivity requires at least one dataset")

    label = max((ds.sensitivity for ds in datasets), key=lambda s: s.rank)
    categories: set[FieldCategory] = set()
    quasi_fields = 0
    for ds in datasets:
        categories |= ds.categories
        quasi_fields += sum(1 for f in ds.fields if f.category in QUASI_IDENTIFIER_CATEGORIES)

    flags: list[str] = []
    if FieldCategory.PII in categories and FieldCategory.LOCATION in categories:
        flags.append("pii_location")
    if FieldCategory.PII in categories and FieldCategory.FINANCIAL in categories:
        flags.append("pii_financial")
    if quasi_fields >= 3:
        flags.append("quasi_identifier_set")
    return label, flags
