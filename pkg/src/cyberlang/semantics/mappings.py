"""Cyber-mediated mapping tables and their compositions.

Each non-cyber dimension has one bijective table into the cyber namespace
(CP for physical, CS for social, CT for thinking). Cross-dimension maps are
never stored; they are composed through the cyber layer: to go from X to Y,
map forward through X's table and then backward through Y's table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from ..canonical import write_text_lf
from ..core.dimensions import NON_CYBER, Dimension
from ..core.signs import Cybersign
from ..core.values import Reference
from ..errors import InvalidValue, NonBijectiveTable, UnmappedReference


class MappingKind(Enum):
    CP = "CP"
    CS = "CS"
    CT = "CT"

    @property
    def dimension(self) -> Dimension:
        return Dimension(self.value[1])

    @classmethod
    def for_dimension(cls, dim: Dimension) -> "MappingKind":
        if dim is Dimension.C:
            raise ValueError("the cyber dimension has no mapping table of its own")
        return cls("C" + dim.value)


RefLike = Union[Reference, str]


def _ref(x: RefLike) -> Reference:
    return x if isinstance(x, Reference) else Reference(x)


class MappingTable:
    """Finite bijection between one dimension's references and cyber references."""

    def __init__(self, kind: MappingKind, pairs: Iterable[tuple[RefLike, RefLike]] = ()):
        self.kind = kind
        fwd: dict[Reference, Reference] = {}
        inv: dict[Reference, Reference] = {}
        ns = kind.dimension.namespace
        for d, c in pairs:
            d, c = _ref(d), _ref(c)
            if d.namespace != ns:
                raise InvalidValue(f"{kind.value} domain reference {d} is not in namespace {ns}:")
            if c.namespace != "c":
                raise InvalidValue(f"{kind.value} image {c} is not in namespace c:")
            if d in fwd:
                raise NonBijectiveTable(f"{kind.value}: {d} mapped twice")
            if c in inv:
                raise NonBijectiveTable(f"{kind.value}: {c} is the image of both {inv[c]} and {d}")
            fwd[d], inv[c] = c, d
        self._fwd = MappingProxyType(fwd)
        self._inv = MappingProxyType(inv)

    @property
    def pairs(self) -> frozenset[tuple[Reference, Reference]]:
        return frozenset(self._fwd.items())

    def forward(self, ref: RefLike) -> Reference:
        ref = _ref(ref)
        try:
            return self._fwd[ref]
        except KeyError:
            raise UnmappedReference(self.kind.value, ref.term) from None

    def inverse(self, ref: RefLike) -> Reference:
        ref = _ref(ref)
        try:
            return self._inv[ref]
        except KeyError:
            raise UnmappedReference(self.kind.value, ref.term) from None

    def __len__(self):
        return len(self._fwd)

    def __eq__(self, other):
        if not isinstance(other, MappingTable):
            return NotImplemented
        return self.kind == other.kind and dict(self._fwd) == dict(other._fwd)

    def sorted_pairs(self) -> list[list[str]]:
        return sorted([d.term, c.term] for d, c in self._fwd.items())


@dataclass(frozen=True)
class MappingRegistry:
    cp: MappingTable = None
    cs: MappingTable = None
    ct: MappingTable = None

    def __post_init__(self):
        for kind in MappingKind:
            attr = kind.value.lower()
            if getattr(self, attr) is None:
                object.__setattr__(self, attr, MappingTable(kind))

    def table(self, kind: Union[MappingKind, str]) -> MappingTable:
        kind = MappingKind(kind) if isinstance(kind, str) else kind
        return getattr(self, kind.value.lower())

    @classmethod
    def from_pairs(cls, cp=(), cs=(), ct=()) -> "MappingRegistry":
        return cls(MappingTable(MappingKind.CP, cp), MappingTable(MappingKind.CS, cs),
                   MappingTable(MappingKind.CT, ct))

    def to_dict(self) -> dict:
        return {k.value.lower(): self.table(k).sorted_pairs() for k in MappingKind}

    def to_json(self) -> str:
        """Canonical file form: sorted keys, sorted pairs, one pair per line."""
        lines = ["{"]
        kinds = sorted(k.value.lower() for k in MappingKind)
        for n, key in enumerate(kinds):
            pairs = self.table(key.upper()).sorted_pairs()
            body = ",\n".join("    " + json.dumps(p, ensure_ascii=False) for p in pairs)
            tail = "," if n < len(kinds) - 1 else ""
            lines.append(f'  "{key}": [\n{body}\n  ]{tail}' if pairs else f'  "{key}": []{tail}')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "MappingRegistry":
        if not isinstance(data, Mapping):
            raise InvalidValue("mapping registry must be a JSON object")
        unknown = set(data) - {"cp", "cs", "ct"}
        if unknown:
            raise InvalidValue(f"unknown mapping tables: {sorted(unknown)}")
        try:
            return cls.from_pairs(*[[tuple(p) for p in data.get(k, [])] for k in ("cp", "cs", "ct")])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidValue):
                raise
            raise InvalidValue(f"malformed mapping pairs: {exc}") from None

    @classmethod
    def load(cls, path) -> "MappingRegistry":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path) -> None:
        write_text_lf(path, self.to_json())


def map_forward(registry: MappingRegistry, kind: Union[MappingKind, str], domain_ref: RefLike) -> Reference:
    table = registry.table(kind)
    ref = _ref(domain_ref)
    if ref.namespace != table.kind.dimension.namespace:
        raise InvalidValue(f"{ref} does not belong to the domain of {table.kind.value}")
    return table.forward(ref)


def map_inverse(registry: MappingRegistry, kind: Union[MappingKind, str], cyber_ref: RefLike) -> Reference:
    table = registry.table(kind)
    ref = _ref(cyber_ref)
    if ref.namespace != "c":
        raise InvalidValue(f"{ref} is not a cyber reference")
    return table.inverse(ref)


def map_derived(registry: MappingRegistry, source: Dimension, target: Dimension, ref: RefLike) -> Reference:
    """Cross-dimension map composed through the cyber layer.

    ``map_derived(reg, P, S, x) == map_inverse(reg, CS, map_forward(reg, CP, x))``.
    A failure names the hop (1 = into cyber, 2 = out of cyber).
    """
    if source not in NON_CYBER or target not in NON_CYBER or source == target:
        raise ValueError("derived maps connect two distinct non-cyber dimensions")
    src_kind = MappingKind.for_dimension(source)
    dst_kind = MappingKind.for_dimension(target)
    try:
        cyber = map_forward(registry, src_kind, ref)
    except UnmappedReference as exc:
        raise UnmappedReference(src_kind.value, exc.ref, hop=1) from None
    try:
        return map_inverse(registry, dst_kind, cyber)
    except UnmappedReference as exc:
        raise UnmappedReference(dst_kind.value, exc.ref, hop=2) from None


class Verdict(str, Enum):
    COHERENT = "coherent"
    INCOHERENT = "incoherent"
    UNVERIFIABLE = "unverifiable"


@dataclass(frozen=True)
class FusionReport:
    sign: Cybersign
    verdicts: Mapping[Dimension, Verdict]
    images: Mapping[Dimension, Reference | None]

    @property
    def coherent(self) -> bool:
        return all(v is Verdict.COHERENT for v in self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "lambda": self.sign.lam,
            "coherent": self.coherent,
            "verdicts": {d.value: v.value for d, v in self.verdicts.items()},
        }


def check_fusion(registry: MappingRegistry, sign: Cybersign) -> FusionReport:
    """Do the P, S and T dyads all map onto the sign's own cyber dyad?"""
    target = sign.signified(Dimension.C)
    verdicts, images = {}, {}
    for dim in NON_CYBER:
        try:
            image = map_forward(registry, MappingKind.for_dimension(dim), sign.signified(dim))
        except UnmappedReference:
            verdicts[dim], images[dim] = Verdict.UNVERIFIABLE, None
            continue
        images[dim] = image
        verdicts[dim] = Verdict.COHERENT if image == target else Verdict.INCOHERENT
    return FusionReport(sign, MappingProxyType(verdicts), MappingProxyType(images))
