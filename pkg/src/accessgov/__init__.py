"""Policy-aware access decision engine with audit, benchmarking, and a service API."""

from __future__ import annotations

from .catalog.model import (
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
from .catalog.load import CatalogLoadError, OrgSpec, dump_org, load_org, parse_org
from .catalog.synth import generate_synthetic_org
from .engine.controller import decide
from .engine.model import (
    AccessRequest,
    Control,
    DecisionLabel,
    DecisionOutcome,
    GateHit,
    Rationale,
    RequestValidationError,
    SharingScope,
    Stage,
    StageStatus,
    StageVerdict,
)
from .engine.policy import Policy, PolicyError, PolicyStore, load_policies
from .engine.registry import (
    ControlRegistry,
    GateRegistry,
    RegistryError,
    load_control_registry,
    load_gate_registry,
)

__version__ = "0.1.0"

__all__ = [
    "AccessRequest",
    "AgreementsRegistry",
    "CatalogError",
    "CatalogLoadError",
    "Control",
    "ControlRegistry",
    "Dataset",
    "DatasetField",
    "DecisionLabel",
    "DecisionOutcome",
    "ExternalParty",
    "FieldCategory",
    "GateHit",
    "GateRegistry",
    "MetadataCatalog",
    "OrgSpec",
    "Policy",
    "PolicyError",
    "PolicyStore",
    "Rationale",
    "RegistryError",
    "RequestValidationError",
    "SensitivityLabel",
    "SharingScope",
    "SoDRule",
    "Stage",
    "StageStatus",
    "StageVerdict",
    "UserRecord",
    "decide",
    "dump_org",
    "effective_sensitivity",
    "generate_synthetic_org",
    "load_control_registry",
    "load_gate_registry",
    "load_org",
    "load_policies",
    "parse_org",
    "__version__",
]
