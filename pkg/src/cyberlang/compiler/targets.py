"""Compilation of one statement into the four recipient surface forms.

machine-json is the lossless pivot; the other three targets are projections
that keep only what their recipients can act on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

from ..canonical import pretty_json
from ..core.dimensions import DIMENSIONS, Dimension
from ..core.values import canonical_print_value, format_decimal, value_from_json, value_to_json
from ..errors import (
    DialectViolation,
    EmptyCompilation,
    InvalidStatement,
    InvalidValue,
    NoApplicableTemplate,
    SchemaViolation,
)
from ..fdsg.ast import (
    Blend,
    ComponentBlock,
    Cyberstatement,
    IntegrationOperator,
    Parallel,
    Precedence,
    parallel_classes,
    precedence_levels,
)
from ..ids import new_uuid
from ..resources import schema_errors
from .dialect import FILTERS, PLACEHOLDER_RE, Dialect, validate_against_dialect

MACHINE_JSON_FORMAT = "cyberlanguage/machine-json@1"
TS_PLACEHOLDER = "$ts"


class TargetProfile(str, Enum):
    HUMAN_NL = "human-nl"
    MACHINE_JSON = "machine-json"
    ROBOT_CMD = "robot-cmd"
    TWIN_UPDATE = "twin-update"


@dataclass(frozen=True)
class CompiledForm:
    target: TargetProfile
    payload: Any
    source_statement_id: str

    def render(self) -> str:
        """Wire text: the sentence itself, or pretty JSON for structured targets."""
        if self.target is TargetProfile.HUMAN_NL:
            return self.payload
        return pretty_json(self.payload)

    def to_dict(self) -> dict:
        return {"target": self.target.value, "payload": self.payload,
                "source_statement_id": self.source_statement_id}


# -- machine-json ---------------------------------------------------------------

def _directive_items(d) -> list[list[str]]:
    if isinstance(d, Precedence):
        return [["prec", d.higher.value, d.lower.value]]
    if isinstance(d, Parallel):
        return [["par", d.a.value, d.b.value]]
    return [["blend", dim.value, format_decimal(w)] for dim, w in d.entries]


def to_machine_json(stmt: Cyberstatement) -> dict:
    doc: dict = {"format": MACHINE_JSON_FORMAT}
    for dim, block in stmt.blocks.items():
        doc[dim.value] = {
            "order": list(block.slots),
            "slots": {k: value_to_json(v) for k, v in block.slots.items()},
        }
    doc["omega"] = [item for d in stmt.omega for item in _directive_items(d)]
    return doc


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise SchemaViolation(f"duplicate member {key!r}")
        seen[key] = value
    return seen


def decompile_machine_json(doc: Union[str, bytes, dict], ids=None) -> Cyberstatement:
    """Rebuild a statement from a machine-json document (text or parsed)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc, object_pairs_hook=_reject_duplicates)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"not JSON: {exc}") from None
    errors = schema_errors("machine-json", doc)
    if errors:
        raise SchemaViolation("; ".join(errors))
    try:
        blocks = {}
        for dim in DIMENSIONS:
            sub = doc.get(dim.value)
            if sub is None:
                continue
            if set(sub["order"]) != set(sub["slots"]):
                raise SchemaViolation(f"{dim.value}: order and slots name different keys")
            blocks[dim] = ComponentBlock(dim, [(k, value_from_json(sub["slots"][k])) for k in sub["order"]])
        directives: list = []
        blend_at, blend = None, []
        for kind, a, b in doc.get("omega", []):
            if kind == "prec":
                directives.append(Precedence(Dimension(a), Dimension(b)))
            elif kind == "par":
                directives.append(Parallel(Dimension(a), Dimension(b)))
            else:
                if blend_at is None:
                    blend_at = len(directives)
                    directives.append(None)
                blend.append((Dimension(a), b))
        if blend_at is not None:
            directives[blend_at] = Blend(tuple(blend))
        return Cyberstatement(blocks, IntegrationOperator(tuple(directives)), (ids or new_uuid)())
    except (InvalidStatement, InvalidValue) as exc:
        raise SchemaViolation(str(exc)) from None


# -- projections ------------------------------------------------------------------

def _fill(template: str, stmt: Cyberstatement) -> str:
    def sub(m):
        text = canonical_print_value(stmt.slot(Dimension(m.group(1)), m.group(2)))
        return FILTERS[m.group(3)](text) if m.group(3) else text
    return PLACEHOLDER_RE.sub(sub, template)


def _present_slots(stmt: Cyberstatement) -> set:
    return {(d, k) for d, k, _ in stmt.iter_slots()}


def to_human_nl(stmt: Cyberstatement, dialect: Dialect) -> str:
    have = _present_slots(stmt)
    for t in dialect.nl_templates:
        if t.requires <= have:
            return _fill(t.text, stmt)
    raise NoApplicableTemplate(f"no {dialect.name!r} template fits slots {sorted(f'{d.value}.{k}' for d, k in have)}")


def concurrent_groups(stmt: Cyberstatement) -> dict[Dimension, int]:
    """Group id per dimension in a parallel class of two or more present dimensions."""
    classes = parallel_classes(stmt.omega, stmt.present)
    groups: dict[frozenset, int] = {}
    for dim in stmt.present:
        cls = classes[dim]
        if len(cls) > 1 and cls not in groups:
            groups[cls] = len(groups) + 1
    return {d: groups[classes[d]] for d in stmt.present if classes[d] in groups}


def to_robot_cmd(stmt: Cyberstatement, dialect: Dialect) -> list[dict]:
    have = _present_slots(stmt)
    levels = precedence_levels(stmt.omega, stmt.present)
    groups = concurrent_groups(stmt)
    chosen = [(levels[r.dimension], i, r) for i, r in enumerate(dialect.robot_rules) if set(r.requires) <= have]
    if not chosen:
        raise EmptyCompilation("no robot rule applies to this statement")
    return [
        {"cmd": r.cmd, "args": {n: _fill(v, stmt) for n, v in r.args.items()},
         "concurrent_group": groups.get(r.dimension)}
        for _, _, r in sorted(chosen, key=lambda x: (x[0], x[1]))
    ]


def to_twin_update(stmt: Cyberstatement, dialect: Dialect) -> list[dict]:
    out = [
        {"path": dialect.twin_paths[(d, k)], "value": canonical_print_value(v), "ts": TS_PLACEHOLDER}
        for d, k, v in stmt.iter_slots() if (d, k) in dialect.twin_paths
    ]
    if not out:
        raise EmptyCompilation("no slot of this statement has a digital-twin path")
    return out


def compile_statement(stmt: Cyberstatement, target: Union[TargetProfile, str], dialect: Dialect) -> CompiledForm:
    """Compile ``stmt`` for one recipient type; the dialect must admit the statement."""
    target = TargetProfile(target)
    violations = validate_against_dialect(stmt, dialect)
    if violations:
        raise DialectViolation(violations)
    if target is TargetProfile.MACHINE_JSON:
        payload: Any = to_machine_json(stmt)
    elif target is TargetProfile.HUMAN_NL:
        payload = to_human_nl(stmt, dialect)
    elif target is TargetProfile.ROBOT_CMD:
        payload = to_robot_cmd(stmt, dialect)
    else:
        payload = to_twin_update(stmt, dialect)
    return CompiledForm(target, payload, stmt.statement_id)


compile = compile_statement  # noqa: A001 - public name used by the toolkit API
