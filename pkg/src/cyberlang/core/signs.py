"""Cybersigns and the sign repository (layer 2)."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from ..canonical import digest, pretty_json, write_text_lf
from ..errors import DuplicateSign, InvalidDyadNamespace, InvalidSign, InvalidValue
from .dimensions import DIMENSIONS, Dimension
from .values import Reference


@dataclass(frozen=True)
class DimensionalDyad:
    """A dimensional signifier paired with its signified reference."""

    signifier: str
    signified: Reference

    def __post_init__(self):
        if isinstance(self.signified, str):
            object.__setattr__(self, "signified", Reference(self.signified))
        if not isinstance(self.signifier, str):
            raise InvalidSign("dyad signifier must be text")


class Cybersign:
    """Surface signifier ``lam`` bound to one dyad per dimension.

    Immutable; equality and hashing cover ``lam`` and all four dyads.
    """

    __slots__ = ("_lam", "_dyads")

    def __init__(self, lam: str, dyads: Mapping[Dimension, DimensionalDyad]):
        if not isinstance(lam, str) or not lam:
            raise InvalidSign("a Cybersign needs a non-empty linguistic signifier")
        missing = [d.value for d in DIMENSIONS if d not in dyads]
        if missing or len(dyads) != 4:
            raise InvalidSign(f"Cybersign {lam!r} is missing dyads for {missing}")
        for dim, dyad in dyads.items():
            if dyad.signified.namespace != dim.namespace:
                raise InvalidDyadNamespace(
                    f"{dim.value}-dyad of {lam!r} points outside the "
                    f"{dim.namespace}: namespace ({dyad.signified.term})"
                )
        self._lam = lam
        self._dyads = MappingProxyType({d: dyads[d] for d in DIMENSIONS})

    @property
    def lam(self) -> str:
        return self._lam

    @property
    def dyads(self) -> Mapping[Dimension, DimensionalDyad]:
        return self._dyads

    def dyad(self, dim: Dimension) -> DimensionalDyad:
        return self._dyads[dim]

    def signified(self, dim: Dimension) -> Reference:
        return self._dyads[dim].signified

    def _key(self):
        return (self._lam, tuple(self._dyads[d] for d in DIMENSIONS))

    def __eq__(self, other):
        if not isinstance(other, Cybersign):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        refs = ", ".join(f"{d.value}={self._dyads[d].signified.term}" for d in DIMENSIONS)
        return f"Cybersign({self._lam!r}; {refs})"

    def to_record(self) -> dict:
        return {
            "lambda": self._lam,
            "dyads": {
                d.value: {"signifier": dy.signifier, "signified": dy.signified.term}
                for d, dy in self._dyads.items()
            },
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Cybersign":
        try:
            dyads = {
                Dimension.parse(k): DimensionalDyad(v["signifier"], Reference(v["signified"]))
                for k, v in rec["dyads"].items()
            }
            return cls(rec["lambda"], dyads)
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidSign(f"malformed sign record: {exc}") from None
        except InvalidValue as exc:
            raise InvalidSign(str(exc)) from None

    @property
    def digest(self) -> str:
        return sign_digest(self)


def sign_digest(sign: Cybersign) -> str:
    """SHA-256 of the canonical sign record."""
    return digest(sign.to_record())


def make_sign(lam: str, refs: Mapping[str, str], signifiers: Mapping[str, str] | None = None) -> Cybersign:
    """Shorthand: ``make_sign("danger", {"P": "p:hazard/obstacle", ...})``.

    Dyad signifiers default to the last path segment of the reference.
    """
    signifiers = signifiers or {}
    dyads = {}
    for k, ref in refs.items():
        dim = Dimension.parse(k)
        sig = signifiers.get(k, ref.split(":", 1)[-1].rsplit("/", 1)[-1])
        dyads[dim] = DimensionalDyad(sig, Reference(ref))
    return Cybersign(lam, dyads)


class SignRegistry:
    """Insertion-ordered multimap from surface signifier to sign senses.

    Writers take a lock and publish a fresh snapshot (copy on write), so readers
    never see a half-applied registration.
    """

    def __init__(self, signs: Iterable[Cybersign] = ()):
        self._lock = threading.Lock()
        self._entries: Mapping[str, tuple[Cybersign, ...]] = {}
        for s in signs:
            self.register(s)

    def register(self, sign: Cybersign) -> "SignRegistry":
        if not isinstance(sign, Cybersign):
            raise InvalidSign(f"not a Cybersign: {sign!r}")
        with self._lock:
            senses = self._entries.get(sign.lam, ())
            if sign in senses:
                raise DuplicateSign(f"{sign!r} is already registered")
            entries = dict(self._entries)
            entries[sign.lam] = senses + (sign,)
            self._entries = entries
        return self

    def lookup(self, lam: str) -> list[Cybersign]:
        return list(self._entries.get(lam, ()))

    def __contains__(self, lam: str) -> bool:
        return lam in self._entries

    def __len__(self) -> int:
        return sum(len(v) for v in self._entries.values())

    def __iter__(self) -> Iterator[Cybersign]:
        for senses in self._entries.values():
            yield from senses

    def snapshot(self) -> "SignRegistry":
        clone = SignRegistry()
        clone._entries = self._entries
        return clone

    def to_json(self) -> str:
        return pretty_json([s.to_record() for s in self])

    @classmethod
    def from_json(cls, text: str) -> "SignRegistry":
        data = json.loads(text)
        if not isinstance(data, list):
            raise InvalidSign("sign registry file must hold a JSON array")
        return cls(Cybersign.from_record(rec) for rec in data)

    @classmethod
    def load(cls, path) -> "SignRegistry":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path) -> None:
        write_text_lf(path, self.to_json())


def register_sign(registry: SignRegistry, sign: Cybersign) -> SignRegistry:
    return registry.register(sign)


def lookup_signs(registry: SignRegistry, lam: str) -> list[Cybersign]:
    return registry.lookup(lam)
