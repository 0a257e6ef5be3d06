"""Closed control registry and declarative gate definitions.

Both registries load from versioned JSON documents. Control ids form a closed
set: stages and fixtures may only reference controls that exist here, and a
trigger signal is mitigable exactly when some registered control lists it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional, Union

from .model import Control


class RegistryError(ValueError):
    """Raised when a registry document is malformed or references unknown ids."""


class ControlRegistry:
    def __init__(self, controls: Iterable[Control], mitigation_map: dict[str, list[str]]):
        self._controls: dict[str, Control] = {}
        for control in controls:
            if control.control_id in self._controls:
                raise RegistryError(f"duplicate control_id: {control.control_id}")
            self._controls[control.control_id] = control
        self._mitigation_map = {k: list(v) for k, v in mitigation_map.items()}

    def __contains__(self, control_id: str) -> bool:
        return control_id in self._controls

    def __iter__(self):
        return iter(self._controls.values())

    def get(self, control_id: str) -> Control:
        try:
            return self._controls[control_id]
        except KeyError:
            raise RegistryError(f"unknown control_id: {control_id}") from None

    def mitigable(self, trigger: str) -> bool:
        return trigger in self._mitigation_map

    def controls_for(self, trigger: str) -> list[Control]:
        return [self._controls[cid] for cid in self._mitigation_map.get(trigger, [])]

    def to_doc(self) -> dict[str, Any]:
        controls = []
        for control in self._controls.values():
            controls.append(
                {
                    "control_id": control.control_id,
                    "kind": control.kind,
                    "description": control.description,
                    "params": dict(control.params),
                    "mitigates": [
                        t for t, cids in self._mitigation_map.items() if control.control_id in cids
                    ],
                }
            )
        return {"schema_version": 1, "controls": controls}


@dataclass(frozen=True)
class GateRule:
    """Declarative shell of one gate; the predicate is bound by gate_id in code."""

    gate_id: str
    message: str
    citation: str = ""


class GateRegistry:
    def __init__(self, gates: Iterable[GateRule]):
        self._gates: list[GateRule] = []
        seen: set[str] = set()
        for gate in gates:
            if gate.gate_id in seen:
                raise RegistryError(f"duplicate gate_id: {gate.gate_id}")
            seen.add(gate.gate_id)
            self._gates.append(gate)

    def __iter__(self):
        return iter(self._gates)

    def __len__(self) -> int:
        return len(self._gates)

    @property
    def ids(self) -> list[str]:
        return [g.gate_id for g in self._gates]

    def get(self, gate_id: str) -> Optional[GateRule]:
        for gate in self._gates:
            if gate.gate_id == gate_id:
                return gate
        return None

    def subset(self, gate_ids: Iterable[str]) -> "GateRegistry":
        wanted = list(gate_ids)
        return GateRegistry(g for g in self._gates if g.gate_id in wanted)

    def to_doc(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "gates": [
                {"gate_id": g.gate_id, "message": g.message, **({"citation": g.citation} if g.citation else {})}
                for g in self._gates
            ],
        }


def _read_packaged(name: str) -> dict[str, Any]:
    data = resources.files("accessgov.engine").joinpath("data").joinpath(name)
    return json.loads(data.read_text(encoding="utf-8"))


def parse_control_registry(doc: dict[str, Any]) -> ControlRegistry:
    controls = []
    mitigation_map: dict[str, list[str]] = {}
    for entry in doc.get("controls", []):
        unknown = set(entry) - {"control_id", "kind", "description", "params", "mitigates"}
        if unknown:
            raise RegistryError(f"control document has unknown keys: {sorted(unknown)}")
        control = Control(
            control_id=str(entry["control_id"]),
            kind=str(entry.get("kind", entry["control_id"])),
            description=str(entry.get("description", "")),
            params=tuple(sorted(dict(entry.get("params", {})).items())),
        )
        controls.append(control)
        for trigger in entry.get("mitigates", []):
            mitigation_map.setdefault(str(trigger), []).append(control.control_id)
    return ControlRegistry(controls, mitigation_map)


def load_control_registry(source: Union[str, Path, None] = None) -> ControlRegistry:
    if source is None:
        return parse_control_registry(_read_packaged("controls_v1.json"))
    return parse_control_registry(json.loads(Path(source).read_text(encoding="utf-8")))


def parse_gate_registry(doc: dict[str, Any]) -> GateRegistry:
    gates = []
    for entry in doc.get("gates", []):
        unknown = set(entry) - {"gate_id", "message", "citation"}
        if unknown:
            raise RegistryError(f"gate document has unknown keys: {sorted(unknown)}")
        gates.append(
            GateRule(
                gate_id=str(entry["gate_id"]),
                message=str(entry.get("message", "")),
                citation=str(entry.get("citation", "")),
            )
        )
    return GateRegistry(gates)


def load_gate_registry(source: Union[str, Path, None] = None) -> GateRegistry:
    if source is None:
        return parse_gate_registry(_read_packaged("gates_v1.json"))
    return parse_gate_registry(json.loads(Path(source).read_text(encoding="utf-8")))
