"""Scenario files: JSON schema, validation with JSON pointers, and the
ProtocolSpec / VariableSpec wire formats."""

from __future__ import annotations

from typing import Any

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from .errors import ValidationError
from .mediators import FAMILIES, build_bmv_phase, build_cnot_relay, build_nonlocal_demo
from .nonclassicality import VariableSpec
from .pauli import PauliOp, SiteLayout
from .specs import ProtocolSpec, Stage, StepSpec
from .states import DensityState, basis_state, matrix_from_pairs, matrix_to_pairs

VERSION = 1
DEMOS = {
    "cnot-relay": build_cnot_relay,
    "bmv-phase": build_bmv_phase,
    "nonlocal-cz": build_nonlocal_demo,
}
PAYLOADS = ("protocol", "campaign", "variables", "demo")

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_LOCAL_STATE = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {
            "type": "object",
            "required": ["matrix"],
            "properties": {"matrix": {"type": "array", "items": _PAIR, "minItems": 1}},
            "additionalProperties": False,
        },
    ]
}
_STEP = {
    "type": "object",
    "required": ["acts_on"],
    "properties": {
        "acts_on": {"type": "array", "items": {"type": "string"}, "minItems": 1, "maxItems": 2},
        "gate": {"type": "string"},
        "angle": {"type": "number"},
        "hamiltonian": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [{"type": "string"}, _PAIR], "minItems": 2, "maxItems": 2},
        },
    },
    "oneOf": [{"required": ["gate"]}, {"required": ["hamiltonian"]}],
    "additionalProperties": False,
}
PROTOCOL_SCHEMA = {
    "type": "object",
    "required": ["sites", "s_plus", "s_minus", "stages"],
    "properties": {
        "name": {"type": "string"},
        "sites": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "dim"],
                "properties": {"label": {"type": "string", "minLength": 1}, "dim": {"type": "integer", "minimum": 2}},
                "additionalProperties": False,
            },
            "minItems": 1,
        },
        "mediator": {"type": "string"},
        "classical_sites": {"type": "array", "items": {"type": "string"}},
        "s_plus": {"type": "array", "items": _LOCAL_STATE},
        "s_minus": {"type": "array", "items": _LOCAL_STATE},
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "sites", "steps"],
                "properties": {
                    "label": {"type": "string"},
                    "sites": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "steps": {"type": "array", "items": _STEP},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}
VARIABLE_SCHEMA = {
    "type": "object",
    "required": ["dim", "attributes"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "attributes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["label", "vectors"],
                "properties": {
                    "label": {"type": "string"},
                    "vectors": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _PAIR}},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}
CAMPAIGN_SCHEMA = {
    "type": "object",
    "required": ["family", "samples", "seed"],
    "properties": {
        "family": {"enum": list(FAMILIES)},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "n_steps": {"type": "integer", "minimum": 1},
        "thresholds": {
            "type": "object",
            "properties": {"negativity": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}
SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version"],
    "properties": {
        "version": {"const": VERSION},
        "protocol": PROTOCOL_SCHEMA,
        "campaign": CAMPAIGN_SCHEMA,
        "variables": {"type": "array", "minItems": 1, "items": VARIABLE_SCHEMA},
        "demo": {"enum": sorted(DEMOS)},
    },
    "additionalProperties": False,
}

_VALIDATOR = Draft202012Validator(SCENARIO_SCHEMA)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def validate_scenario(data: Any) -> dict:
    """Schema check plus the exactly-one-payload rule. Raises
    :class:`ValidationError` carrying the JSON pointer of the offending field."""
    err = best_match(_VALIDATOR.iter_errors(data))
    if err is not None:
        raise ValidationError(err.message, pointer=_pointer(err.absolute_path))
    kinds = [k for k in PAYLOADS if k in data]
    if len(kinds) != 1:
        raise ValidationError(f"scenario needs exactly one of {list(PAYLOADS)}, found {kinds}", pointer="/")
    return data


def payload_kind(data: dict) -> str:
    return next(k for k in PAYLOADS if k in data)


def _rebase(exc: ValidationError, pointer: str) -> ValidationError:
    if exc.pointer is not None:
        return exc
    return ValidationError(str(exc), pointer=pointer)


def _local_from_json(item, dim: int) -> DensityState:
    if isinstance(item, str):
        return basis_state(item, dim)
    return DensityState(matrix_from_pairs(item["matrix"], dim), (dim,))


def _step_from_json(item: dict, layout: SiteLayout) -> StepSpec:
    h = item.get("hamiltonian")
    if h is not None:
        h = PauliOp.from_text(layout, h)
    return StepSpec(tuple(item["acts_on"]), item.get("gate"), item.get("angle"), h)


def protocol_from_dict(data: dict, base: str = "/protocol") -> ProtocolSpec:
    """Build a ProtocolSpec from its JSON form (assumed schema-valid)."""
    try:
        layout = SiteLayout(tuple((s["label"], s["dim"]) for s in data["sites"]))
    except ValidationError as exc:
        raise _rebase(exc, f"{base}/sites") from None
    locals_ = {}
    for which in ("s_plus", "s_minus"):
        items = data[which]
        if len(items) != len(layout.sites):
            raise ValidationError(f"needs one local state per site ({len(layout.sites)})", pointer=f"{base}/{which}")
        out = []
        for i, (item, (_, dim)) in enumerate(zip(items, layout.sites)):
            try:
                out.append(_local_from_json(item, dim))
            except ValidationError as exc:
                raise _rebase(exc, f"{base}/{which}/{i}") from None
        locals_[which] = tuple(out)
    stages = []
    for i, st in enumerate(data["stages"]):
        steps = []
        for k, item in enumerate(st["steps"]):
            try:
                steps.append(_step_from_json(item, layout))
            except ValidationError as exc:
                raise _rebase(exc, f"{base}/stages/{i}/steps/{k}") from None
        try:
            stages.append(Stage(st["label"], tuple(st["sites"]), tuple(steps)))
        except ValidationError as exc:
            raise _rebase(exc, f"{base}/stages/{i}") from None
    try:
        return ProtocolSpec(
            layout,
            locals_["s_plus"],
            locals_["s_minus"],
            tuple(stages),
            mediator=data.get("mediator", "M"),
            classical_sites=frozenset(data.get("classical_sites", [data.get("mediator", "M")])),
            name=data.get("name", ""),
        )
    except ValidationError as exc:
        raise _rebase(exc, base) from None


def _step_to_dict(step: StepSpec) -> dict:
    out: dict = {"acts_on": list(step.acts_on)}
    if step.gate is not None:
        out["gate"] = step.gate
    else:
        out["hamiltonian"] = step.hamiltonian.to_pairs()
    if step.angle is not None:
        out["angle"] = step.angle
    return out


def protocol_to_dict(spec: ProtocolSpec) -> dict:
    return {
        "name": spec.name,
        "sites": [{"label": label, "dim": dim} for label, dim in spec.layout.sites],
        "mediator": spec.mediator,
        "classical_sites": sorted(spec.classical_sites),
        "s_plus": [{"matrix": matrix_to_pairs(s.matrix)} for s in spec.s_plus],
        "s_minus": [{"matrix": matrix_to_pairs(s.matrix)} for s in spec.s_minus],
        "stages": [
            {"label": st.label, "sites": list(st.sites), "steps": [_step_to_dict(s) for s in st.steps]}
            for st in spec.stages
        ],
    }


def variables_from_json(items: list, base: str = "/variables") -> list[VariableSpec]:
    out = []
    for i, item in enumerate(items):
        try:
            out.append(VariableSpec.from_dict(item))
        except ValidationError as exc:
            raise _rebase(exc, f"{base}/{i}") from None
    return out
