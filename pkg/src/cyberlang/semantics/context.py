"""Immutable snapshots of the four dimension states."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from ..canonical import pretty_json, write_text_lf
from ..core.dimensions import DIMENSIONS, Dimension
from ..core.values import KEY_RE, SemanticValue, VALUE_TYPES, canonical_print_value, parse_value
from ..errors import InvalidContext, InvalidValue

AUTHORITATIVE_SUFFIX = "!"


@dataclass(frozen=True)
class ContextSnapshot:
    """Real-time state of every dimension at one instant.

    ``authoritative`` lists ``(dimension, key)`` slots that may override an
    expression when their dimension outranks the others under precedence.
    """

    timestamp: int = 0
    states: Mapping[Dimension, Mapping[str, SemanticValue]] = field(default_factory=dict)
    authoritative: frozenset = frozenset()

    def __post_init__(self):
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int):
            raise InvalidContext(f"timestamp must be integer milliseconds, got {self.timestamp!r}")
        states = {}
        for dim in DIMENSIONS:
            raw = self.states.get(dim, {}) if isinstance(self.states, Mapping) else None
            if raw is None or not isinstance(raw, Mapping):
                raise InvalidContext(f"state for {dim.value} must be a mapping")
            for key, value in raw.items():
                if not isinstance(key, str) or not KEY_RE.fullmatch(key):
                    raise InvalidContext(f"bad context key {dim.value}.{key!r}")
                if not isinstance(value, VALUE_TYPES):
                    raise InvalidContext(f"{dim.value}.{key} is not a semantic value: {value!r}")
            states[dim] = MappingProxyType(dict(raw))
        unknown = set(self.states) - set(DIMENSIONS)
        if unknown:
            raise InvalidContext(f"unknown dimensions in context: {unknown}")
        auth = frozenset(self.authoritative)
        for dim, key in auth:
            if key not in states.get(dim, {}):
                raise InvalidContext(f"authoritative flag on missing slot {dim.value}.{key}")
        object.__setattr__(self, "states", MappingProxyType(states))
        object.__setattr__(self, "authoritative", auth)

    @classmethod
    def empty(cls, timestamp: int = 0) -> "ContextSnapshot":
        return cls(timestamp)

    def is_authoritative(self, dim: Dimension, key: str) -> bool:
        return (dim, key) in self.authoritative

    def values(self, dim: Dimension) -> Iterable[SemanticValue]:
        return self.states[dim].values()

    def updated(self, timestamp: int, changes: Mapping[Dimension, Mapping[str, SemanticValue]],
                authoritative: Iterable = ()) -> "ContextSnapshot":
        """A new snapshot with ``changes`` merged over this one."""
        states = {d: dict(self.states[d]) for d in DIMENSIONS}
        for dim, slots in changes.items():
            states[dim].update(slots)
        return ContextSnapshot(timestamp, states, self.authoritative | frozenset(authoritative))

    # -- file form --
    def to_dict(self) -> dict:
        out: dict = {"timestamp": self.timestamp}
        for dim in DIMENSIONS:
            out[dim.value] = {
                key + (AUTHORITATIVE_SUFFIX if (dim, key) in self.authoritative else ""):
                    canonical_print_value(v)
                for key, v in self.states[dim].items()
            }
        return out

    @classmethod
    def from_dict(cls, data) -> "ContextSnapshot":
        if not isinstance(data, Mapping):
            raise InvalidContext("context must be a JSON object")
        extra = set(data) - {"timestamp", "P", "S", "T", "C"}
        if extra:
            raise InvalidContext(f"unexpected context fields: {sorted(extra)}")
        states: dict = {}
        auth = set()
        for dim in DIMENSIONS:
            raw = data.get(dim.value, {})
            if not isinstance(raw, Mapping):
                raise InvalidContext(f"{dim.value} state must be an object")
            slots = {}
            for key, text in raw.items():
                if key.endswith(AUTHORITATIVE_SUFFIX):
                    key = key[:-1]
                    auth.add((dim, key))
                if key in slots:
                    raise InvalidContext(f"{dim.value}.{key} given twice")
                if not isinstance(text, str):
                    raise InvalidContext(f"{dim.value}.{key} must be canonical value text")
                try:
                    slots[key] = parse_value(text)
                except InvalidValue as exc:
                    raise InvalidContext(f"{dim.value}.{key}: {exc}") from None
            states[dim] = slots
        return cls(data.get("timestamp", 0), states, frozenset(auth))

    def to_json(self) -> str:
        return pretty_json(self.to_dict())

    @classmethod
    def load(cls, path) -> "ContextSnapshot":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidContext(f"{path}: {exc}") from None
        return cls.from_dict(data)

    def save(self, path) -> None:
        write_text_lf(path, self.to_json())


def context_from_slots(timestamp: int = 0, authoritative: Optional[Iterable] = None, **dims) -> ContextSnapshot:
    """Shorthand: ``context_from_slots(P={"altitude": Quantity(40, "m")})``."""
    return ContextSnapshot(timestamp, {Dimension(k): v for k, v in dims.items()}, frozenset(authoritative or ()))
