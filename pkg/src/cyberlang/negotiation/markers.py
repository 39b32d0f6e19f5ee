from __future__ import annotations

from dataclasses import replace
from types import MappingProxyType

from ..errors import UnknownStatement
from ..semantics.meaning import CONTEXT, Conflict, ResolvedMeaning, Slot
from .messages import MetaMarker


def apply_meta_marker(meaning: ResolvedMeaning, marker: MetaMarker) -> ResolvedMeaning:
    """Re-read one dimension of a resolved statement as the marker says.

    Displaced values are kept as conflicts won by the marker; every other
    dimension is returned untouched.
    """
    if marker.target_statement_id != meaning.statement_id:
        raise UnknownStatement(marker.target_statement_id)
    if not marker.overrides:
        return meaning
    dim = marker.dimension
    slots = dict(meaning.resolved.get(dim, {}))
    conflicts = list(meaning.conflicts)
    for key, value in marker.overrides.items():
        old = slots.get(key)
        if old is not None and old.value != value:
            conflicts.append(Conflict(dim, key, old.value, value, CONTEXT))
        slots[key] = Slot(value, CONTEXT)
    resolved = dict(meaning.resolved)
    resolved[dim] = MappingProxyType(slots)
    ordered = {d: resolved[d] for d in sorted(resolved, key=lambda d: d.order)}
    return replace(meaning, resolved=MappingProxyType(ordered), conflicts=tuple(conflicts))
