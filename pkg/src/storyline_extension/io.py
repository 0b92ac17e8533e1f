"""JSON file formats for instances, extension problems and layouts.

Serialization is canonical: keys sorted, characters sorted, meetings
sorted by (begin, end, members), layouts listed for every instant from 1.
"""
from __future__ import annotations

import json
from typing import Any

import jsonschema

from .model import (
    ExtensionProblem,
    InvalidInstanceError,
    InvalidProblemError,
    Layout,
    Meeting,
    StorylineInstance,
    validate_extension_problem,
    validate_instance,
)

__all__ = [
    "FormatError",
    "INSTANCE_SCHEMA",
    "LAYOUT_SCHEMA",
    "PROBLEM_SCHEMA",
    "detect_kind",
    "parse_instance",
    "parse_layout",
    "parse_problem",
    "serialize_instance",
    "serialize_layout",
    "serialize_problem",
]

_ids = {"type": "array", "items": {"type": "string"}}

INSTANCE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["characters", "meetings"],
    "additionalProperties": False,
    "properties": {
        "characters": _ids,
        "meetings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["members", "begin", "end"],
                "additionalProperties": False,
                "properties": {
                    "members": _ids,
                    "begin": {"type": "integer"},
                    "end": {"type": "integer"},
                },
            },
        },
    },
}

LAYOUT_SCHEMA: dict[str, Any] = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["t", "order"],
        "additionalProperties": False,
        "properties": {"t": {"type": "integer", "minimum": 1}, "order": _ids},
    },
}

PROBLEM_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["instance", "chi", "fixed_characters", "fixed_layout"],
    "additionalProperties": False,
    "properties": {
        "instance": INSTANCE_SCHEMA,
        "chi": {"type": "integer"},
        "fixed_characters": _ids,
        "fixed_layout": LAYOUT_SCHEMA,
    },
}


class FormatError(ValueError):
    """Malformed file: bad JSON or a document that does not fit the schema."""

    def __init__(self, message: str, code: str = "SYNTAX"):
        self.code = code
        super().__init__(f"{code}: {message}")


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _check(doc: Any, schema: dict[str, Any]) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise FormatError(f"at {where}: {exc.message}", code="SCHEMA") from None


def _dump(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def detect_kind(text: str) -> str:
    """'problem', 'instance' or 'layout'."""
    doc = _load(text)
    if isinstance(doc, list):
        return "layout"
    if isinstance(doc, dict) and "instance" in doc:
        return "problem"
    if isinstance(doc, dict) and "meetings" in doc:
        return "instance"
    raise FormatError("not an instance, problem or layout document", code="SCHEMA")


# ---------------------------------------------------------------- documents


def _instance_doc(instance: StorylineInstance) -> dict[str, Any]:
    return {
        "characters": sorted(instance.characters),
        "meetings": [
            {"members": sorted(m.members), "begin": m.begin, "end": m.end}
            for m in instance.meetings
        ],
    }


def _instance_from(doc: dict[str, Any]) -> StorylineInstance:
    chars = doc["characters"]
    if len(set(chars)) != len(chars):
        raise FormatError("duplicate character id in characters", code="SCHEMA")
    meetings = tuple(Meeting(frozenset(m["members"]), m["begin"], m["end"]) for m in doc["meetings"])
    return StorylineInstance(frozenset(chars), meetings)


def _layout_doc(layout: Layout) -> list[dict[str, Any]]:
    return [{"t": t, "order": list(layout.order(t))} for t in range(1, layout.tau + 1)]


def _layout_from(doc: list[dict[str, Any]]) -> Layout:
    orders: dict[int, tuple[str, ...]] = {}
    for entry in doc:
        if entry["t"] in orders:
            raise FormatError(f"instant {entry['t']} listed twice", code="SCHEMA")
        orders[entry["t"]] = tuple(entry["order"])
    return Layout.from_mapping(orders)


# ---------------------------------------------------------------- public API


def serialize_instance(instance: StorylineInstance) -> str:
    return _dump(_instance_doc(instance))


def parse_instance(text: str, *, validate: bool = True) -> StorylineInstance:
    doc = _load(text)
    _check(doc, INSTANCE_SCHEMA)
    instance = _instance_from(doc)
    if validate:
        report = validate_instance(instance)
        if report:
            raise InvalidInstanceError(report)
    return instance


def serialize_layout(layout: Layout) -> str:
    return _dump(_layout_doc(layout))


def parse_layout(text: str) -> Layout:
    doc = _load(text)
    _check(doc, LAYOUT_SCHEMA)
    return _layout_from(doc)


def serialize_problem(problem: ExtensionProblem) -> str:
    return _dump(
        {
            "instance": _instance_doc(problem.full),
            "chi": problem.chi,
            "fixed_characters": sorted(problem.fixed_characters),
            "fixed_layout": _layout_doc(problem.fixed_layout),
        }
    )


def parse_problem(text: str, *, validate: bool = True) -> ExtensionProblem:
    """Parse a problem file; semantic problems raise with machine-readable codes."""
    doc = _load(text)
    _check(doc, PROBLEM_SCHEMA)
    problem = ExtensionProblem(
        full=_instance_from(doc["instance"]),
        chi=doc["chi"],
        fixed_characters=frozenset(doc["fixed_characters"]),
        fixed_layout=_layout_from(doc["fixed_layout"]),
    )
    if validate:
        try:
            report = validate_extension_problem(problem)
        except ValueError as exc:  # e.g. fixed characters left without meetings
            raise FormatError(str(exc), code="SUB_STORYLINE") from None
        if report:
            raise InvalidProblemError(report)
    return problem
