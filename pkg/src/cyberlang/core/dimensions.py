from __future__ import annotations

from enum import Enum


class Dimension(Enum):
    """The four communicative dimensions.

    Members are declared in canonical printing order, so iterating the enum
    (or sorting by :attr:`order`) yields P, S, T, C.
    """

    P = "P"  # physical
    S = "S"  # social
    T = "T"  # thinking / cognitive
    C = "C"  # cyber

    @property
    def order(self) -> int:
        return _ORDER[self]

    @property
    def namespace(self) -> str:
        """Reference prefix owned by this dimension, e.g. ``"p"``."""
        return self.value.lower()

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Dimension):
            return NotImplemented
        return self.order < other.order

    @classmethod
    def parse(cls, text: str) -> "Dimension":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown dimension {text!r}") from None


_ORDER = {d: i for i, d in enumerate(Dimension)}

DIMENSIONS: tuple[Dimension, ...] = tuple(Dimension)
NON_CYBER: tuple[Dimension, ...] = (Dimension.P, Dimension.S, Dimension.T)
