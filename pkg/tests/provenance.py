"""Value-provenance scan for compiled payloads.

A payload is sound when every scalar it carries is either drawn from a slot
of the source statement or is a literal of the dialect (command names, twin
paths, template text) or of the fixed machine-json layout.
"""

from __future__ import annotations

import re

from cyberlang.compiler import TargetProfile
from cyberlang.compiler.dialect import FILTERS, PLACEHOLDER_RE
from cyberlang.core import Dimension, canonical_print_value, value_to_json
from cyberlang.core.values import format_decimal

LAYOUT_LITERALS = {"cyberlanguage/machine-json@1", "prec", "par", "blend", "P", "S", "T", "C", "$ts"}


def _leaves(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield k
            yield from _leaves(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _leaves(v)
    elif obj is not None:
        yield obj


def statement_atoms(stmt) -> set[str]:
    """Everything a structured payload may legitimately copy from the statement."""
    out = set()
    for d, k, v in stmt.iter_slots():
        out.add(k)
        out.add(canonical_print_value(v))
        out.update(str(x) for x in value_to_json(v).values())
    for d in stmt.omega:
        for dim, w in getattr(d, "entries", ()):
            out.add(format_decimal(w))
    return out


def dialect_literals(dialect) -> set[str]:
    out = set(dialect.twin_paths.values())
    for r in dialect.robot_rules:
        out.add(r.cmd)
        out.update(r.args)
    for slots in dialect.allowed_slots.values():
        for t in slots.values():
            out.add(t.type)
            if t.unit:
                out.add(t.unit)
    return out


def _nl_is_sound(text, stmt, dialect) -> bool:
    have = {(d, k) for d, k, _ in stmt.iter_slots()}
    for t in dialect.nl_templates:
        if not set(t.requires) <= have:
            continue
        pattern, pos = "", 0
        for m in PLACEHOLDER_RE.finditer(t.text):
            pattern += re.escape(t.text[pos:m.start()])
            raw = canonical_print_value(stmt.slot(Dimension(m.group(1)), m.group(2)))
            shown = FILTERS[m.group(3)](raw) if m.group(3) else raw
            pattern += re.escape(shown)
            pos = m.end()
        pattern += re.escape(t.text[pos:])
        if re.fullmatch(pattern, text, flags=re.S):
            return True
    return False


def foreign_values(form, stmt, dialect) -> list:
    """Scalars in ``form`` that come from neither the statement nor the dialect."""
    if form.target is TargetProfile.HUMAN_NL:
        return [] if _nl_is_sound(form.payload, stmt, dialect) else [form.payload]
    allowed = statement_atoms(stmt) | dialect_literals(dialect) | LAYOUT_LITERALS
    allowed |= {"format", "omega", "order", "slots", "type", "value", "unit",
                "cmd", "args", "concurrent_group", "path", "ts"}
    bad = []
    for leaf in _leaves(form.payload):
        if isinstance(leaf, bool):
            bad.append(leaf)
        elif isinstance(leaf, int):
            # concurrent group numbers are the only integers a payload carries
            if form.target is not TargetProfile.ROBOT_CMD or leaf < 1:
                bad.append(leaf)
        elif leaf not in allowed:
            bad.append(leaf)
    return bad
