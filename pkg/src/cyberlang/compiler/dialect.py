"""Domain dialects: slot inventories plus per-target rendering rules."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional

from ..core.dimensions import DIMENSIONS, Dimension
from ..core.values import Quantity, type_name
from ..errors import DialectError
from ..fdsg.ast import Cyberstatement
from ..resources import data_path, schema_errors

PLACEHOLDER_RE = re.compile(r"\{([PSTC])\.([a-z][a-z0-9-]*)(?:\|([a-z]+))?\}")
FILTERS = {
    "capitalize": lambda s: s[:1].upper() + s[1:],
    "upper": str.upper,
    "lower": str.lower,
}

SlotName = tuple[Dimension, str]


def parse_slot_name(text: str) -> SlotName:
    dim, _, key = text.partition(".")
    return Dimension(dim), key


def slot_text(slot: SlotName) -> str:
    return f"{slot[0].value}.{slot[1]}"


class SlotType(NamedTuple):
    type: str
    unit: Optional[str] = None


class Template(NamedTuple):
    text: str
    requires: frozenset


class RobotRule(NamedTuple):
    requires: tuple
    cmd: str
    args: Mapping[str, str]

    @property
    def dimension(self) -> Dimension:
        return self.requires[0][0]


class Violation(NamedTuple):
    kind: str  # unknown-key | wrong-type | wrong-unit
    dimension: Dimension
    key: str
    message: str

    def __str__(self):
        return f"{self.kind} {self.dimension.value}.{self.key}: {self.message}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "slot": f"{self.dimension.value}.{self.key}", "message": self.message}


def placeholders(template: str) -> list[tuple[SlotName, Optional[str]]]:
    return [((Dimension(m.group(1)), m.group(2)), m.group(3)) for m in PLACEHOLDER_RE.finditer(template)]


@dataclass(frozen=True)
class Dialect:
    name: str
    allowed_slots: Mapping[Dimension, Mapping[str, SlotType]]
    nl_templates: tuple[Template, ...]
    robot_rules: tuple[RobotRule, ...]
    twin_paths: Mapping[SlotName, str]

    def __post_init__(self):
        allowed = {d: MappingProxyType(dict(self.allowed_slots.get(d, {}))) for d in DIMENSIONS}
        object.__setattr__(self, "allowed_slots", MappingProxyType(allowed))
        object.__setattr__(self, "twin_paths", MappingProxyType(dict(self.twin_paths)))
        for t in self.nl_templates:
            stray = re.sub(PLACEHOLDER_RE, "", t.text)
            if "{" in stray or "}" in stray:
                raise DialectError(f"malformed placeholder in template {t.text!r}")
            for slot, flt in placeholders(t.text):
                if flt is not None and flt not in FILTERS:
                    raise DialectError(f"unknown filter {flt!r} in template {t.text!r}")
                if slot not in t.requires:
                    raise DialectError(f"template uses {slot_text(slot)} without requiring it")
            self._check_allowed(t.requires, "template")
        for r in self.robot_rules:
            self._check_allowed(r.requires, f"robot rule {r.cmd!r}")
            if len({d for d, _ in r.requires}) != 1:
                raise DialectError(f"robot rule {r.cmd!r} must draw its slots from one dimension")
            for arg in r.args.values():
                for slot, _ in placeholders(arg):
                    if slot not in r.requires:
                        raise DialectError(f"robot rule {r.cmd!r} uses {slot_text(slot)} without requiring it")
        self._check_allowed(self.twin_paths, "twin path")

    def _check_allowed(self, slots, where: str):
        for dim, key in slots:
            if key not in self.allowed_slots[dim]:
                raise DialectError(f"{where} names {dim.value}.{key}, which the dialect does not allow")

    def admits(self, dim: Dimension, key: str) -> bool:
        return key in self.allowed_slots[dim]

    # -- file form --
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "allowed_slots": {
                d.value: {k: ({"type": t.type, "unit": t.unit} if t.unit else {"type": t.type})
                          for k, t in self.allowed_slots[d].items()}
                for d in DIMENSIONS if self.allowed_slots[d]
            },
            "nl_templates": [
                {"template": t.text, "requires": sorted(slot_text(s) for s in t.requires)}
                for t in self.nl_templates
            ],
            "robot_rules": [
                {"requires": [slot_text(s) for s in r.requires], "cmd": r.cmd, "args": dict(r.args)}
                for r in self.robot_rules
            ],
            "twin_paths": {slot_text(s): p for s, p in self.twin_paths.items()},
        }

    @classmethod
    def from_dict(cls, data) -> "Dialect":
        errors = schema_errors("dialect", data)
        if errors:
            raise DialectError("invalid dialect: " + "; ".join(errors))
        allowed = {
            Dimension(d): {k: SlotType(v["type"], v.get("unit")) for k, v in slots.items()}
            for d, slots in data["allowed_slots"].items()
        }
        for d, slots in allowed.items():
            for k, t in slots.items():
                if (t.type == "quantity") != (t.unit is not None):
                    raise DialectError(f"{d.value}.{k}: a unit goes with, and only with, type quantity")
        return cls(
            name=data["name"],
            allowed_slots=allowed,
            nl_templates=tuple(
                Template(t["template"], frozenset(parse_slot_name(s) for s in t["requires"]))
                for t in data["nl_templates"]
            ),
            robot_rules=tuple(
                RobotRule(tuple(parse_slot_name(s) for s in r["requires"]), r["cmd"], MappingProxyType(dict(r["args"])))
                for r in data["robot_rules"]
            ),
            twin_paths={parse_slot_name(s): p for s, p in data["twin_paths"].items()},
        )

    @classmethod
    def load(cls, path) -> "Dialect":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DialectError(f"{path}: {exc}") from None
        return cls.from_dict(data)


BUNDLED_DIALECT = "emergency-response.dialect.json"


def bundled_dialect() -> Dialect:
    return Dialect.load(data_path(BUNDLED_DIALECT))


def validate_against_dialect(stmt: Cyberstatement, dialect: Dialect) -> list[Violation]:
    """Every slot checked against the dialect; an empty list means the statement is admitted."""
    out: list[Violation] = []
    for dim, key, value in stmt.iter_slots():
        expected = dialect.allowed_slots[dim].get(key)
        if expected is None:
            out.append(Violation("unknown-key", dim, key, f"dialect {dialect.name!r} has no slot {dim.value}.{key}"))
            continue
        actual = type_name(value)
        if actual != expected.type:
            out.append(Violation("wrong-type", dim, key, f"expected {expected.type}, got {actual}"))
        elif isinstance(value, Quantity) and value.unit != expected.unit:
            out.append(Violation("wrong-unit", dim, key, f"expected unit {expected.unit}, got {value.unit}"))
    return out
