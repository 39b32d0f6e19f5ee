"""Typed slot values and their canonical text forms.

Canonical text grammar (one lexeme, no surrounding whitespace)::

    identifier   [A-Za-z][A-Za-z0-9_-]*          A7, path-optimize-v3
    text         JSON string literal             "hello world"
    reference    [pstc]:<path>                   p:hazard/obstacle
    probability  digits '.' digits, in [0, 1]    0.92, 1.0
    number       [+-]?digits('.' digits)?        50, -2.5, +0.25
    quantity     number immediately + unit code  50m, 1800s

A bare decimal with a fractional part in [0, 1] reads as a probability, so a
plain number in that range is printed with an explicit ``+`` sign. This keeps
printing injective and ``parse_value(print_value(v)) == v`` for every value.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Union

from ..errors import InvalidValue, UnknownUnit

UNIT_CODES: frozenset[str] = frozenset({"m", "s", "kg", "Hz", "deg", "pct", "none"})

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
KEY_RE = re.compile(r"[a-z][a-z0-9-]*")
REFERENCE_RE = re.compile(r"[pstc]:[A-Za-z0-9_][A-Za-z0-9_./-]*")
NUMBER_RE = re.compile(r"[+-]?[0-9]+(?:\.[0-9]+)?")
UNIT_RE = re.compile(r"[A-Za-z]+")


def _decimal(x: Union[Decimal, int, str]) -> Decimal:
    if isinstance(x, bool):
        raise InvalidValue("booleans are not decimals")
    if isinstance(x, float):
        # floats go through repr so 0.92 stays 0.92
        x = repr(x)
    try:
        d = Decimal(x)
    except (InvalidOperation, TypeError):
        raise InvalidValue(f"not a decimal: {x!r}") from None
    if not d.is_finite():
        raise InvalidValue(f"not a finite decimal: {x!r}")
    if d.is_zero():
        d = Decimal(0)
    return d


def format_decimal(d: Decimal) -> str:
    """Fixed-point text with trailing fractional zeros removed (exact)."""
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


@dataclass(frozen=True)
class Identifier:
    text: str

    def __post_init__(self):
        if not isinstance(self.text, str) or not IDENT_RE.fullmatch(self.text):
            raise InvalidValue(f"invalid identifier: {self.text!r}")


@dataclass(frozen=True)
class Text:
    text: str

    def __post_init__(self):
        if not isinstance(self.text, str):
            raise InvalidValue("text value must be a string")


@dataclass(frozen=True)
class Number:
    value: Decimal

    def __post_init__(self):
        object.__setattr__(self, "value", _decimal(self.value))


@dataclass(frozen=True)
class Quantity:
    magnitude: Decimal
    unit: str

    def __post_init__(self):
        object.__setattr__(self, "magnitude", _decimal(self.magnitude))
        if self.unit not in UNIT_CODES:
            raise UnknownUnit(f"unknown unit code {self.unit!r}")
        if self.unit == "none":
            raise InvalidValue("dimensionless magnitudes must be Number, not Quantity(x, none)")


@dataclass(frozen=True)
class Probability:
    value: Decimal

    def __post_init__(self):
        v = _decimal(self.value)
        if not (0 <= v <= 1):
            raise InvalidValue(f"probability out of [0, 1]: {v}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Reference:
    term: str

    def __post_init__(self):
        if not isinstance(self.term, str) or not REFERENCE_RE.fullmatch(self.term):
            raise InvalidValue(f"invalid reference: {self.term!r}")

    @property
    def namespace(self) -> str:
        return self.term[0]

    def __str__(self) -> str:
        return self.term


SemanticValue = Union[Identifier, Text, Number, Quantity, Probability, Reference]
VALUE_TYPES = (Identifier, Text, Number, Quantity, Probability, Reference)

TYPE_NAMES = {
    Identifier: "identifier",
    Text: "text",
    Number: "number",
    Quantity: "quantity",
    Probability: "probability",
    Reference: "reference",
}
TYPES_BY_NAME = {v: k for k, v in TYPE_NAMES.items()}


def type_name(value: SemanticValue) -> str:
    return TYPE_NAMES[type(value)]


def canonical_print_value(v: SemanticValue) -> str:
    if isinstance(v, Identifier):
        return v.text
    if isinstance(v, Text):
        return json.dumps(v.text, ensure_ascii=False)
    if isinstance(v, Reference):
        return v.term
    if isinstance(v, Quantity):
        return format_decimal(v.magnitude) + v.unit
    if isinstance(v, Probability):
        s = format_decimal(v.value)
        return s if "." in s else s + ".0"
    if isinstance(v, Number):
        s = format_decimal(v.value)
        if "." in s and not s.startswith("-") and v.value <= 1:
            return "+" + s
        return s
    raise TypeError(f"not a semantic value: {v!r}")


def classify_number(text: str) -> Union[Number, Probability]:
    """Number or probability for a bare decimal lexeme (see module docstring)."""
    d = _decimal(text)
    if "." in text and text[0] not in "+-" and 0 <= d <= 1:
        return Probability(d)
    return Number(d)


_GREEK_PREFIXES = ("GREEK SMALL LETTER ", "GREEK CAPITAL LETTER ")


def transliterate(word: str) -> str:
    """ASCII surface form of an identifier typed with non-ASCII letters.

    Greek letters become their names (``α`` -> ``alpha``); other letters lose
    their diacritics via NFKD. Raises ``InvalidValue`` when that is not enough.
    """
    out = []
    for ch in word:
        if ch.isascii():
            out.append(ch)
            continue
        name = unicodedata.name(ch, "")
        for prefix in _GREEK_PREFIXES:
            if name.startswith(prefix):
                letter = name[len(prefix):].lower().replace(" ", "")
                out.append(letter.capitalize() if "CAPITAL" in prefix else letter)
                break
        else:
            stripped = "".join(
                c for c in unicodedata.normalize("NFKD", ch) if not unicodedata.combining(c)
            )
            if not stripped.isascii() or not stripped:
                raise InvalidValue(f"cannot transliterate {ch!r}")
            out.append(stripped)
    return "".join(out)


def parse_value(text: str) -> SemanticValue:
    """Inverse of :func:`canonical_print_value`; also accepts Unicode identifiers."""
    if not isinstance(text, str) or not text:
        raise InvalidValue("empty value text")
    if text[0] == '"':
        try:
            decoded, end = json.decoder.scanstring(text, 1)
        except ValueError as exc:
            raise InvalidValue(f"bad string literal: {exc}") from None
        if end != len(text):
            raise InvalidValue(f"trailing characters after string literal in {text!r}")
        return Text(decoded)
    if REFERENCE_RE.fullmatch(text):
        return Reference(text)
    m = NUMBER_RE.match(text)
    if m:
        rest = text[m.end():]
        if not rest:
            return classify_number(text)
        if UNIT_RE.fullmatch(rest):
            if rest not in UNIT_CODES:
                raise UnknownUnit(f"unknown unit code {rest!r}")
            return Quantity(_decimal(m.group()), rest)
        raise InvalidValue(f"malformed numeric value {text!r}")
    if IDENT_RE.fullmatch(text):
        return Identifier(text)
    if text[0].isalpha():
        return Identifier(transliterate(text))
    raise InvalidValue(f"unrecognised value {text!r}")


def value_to_json(v: SemanticValue) -> dict:
    """Typed JSON object used by the machine-json interlingua."""
    if isinstance(v, Quantity):
        return {"type": "quantity", "value": format_decimal(v.magnitude), "unit": v.unit}
    if isinstance(v, (Number, Probability)):
        return {"type": type_name(v), "value": format_decimal(v.value)}
    if isinstance(v, Identifier):
        return {"type": "identifier", "value": v.text}
    if isinstance(v, Text):
        return {"type": "text", "value": v.text}
    if isinstance(v, Reference):
        return {"type": "reference", "value": v.term}
    raise TypeError(f"not a semantic value: {v!r}")


def value_from_json(obj: dict) -> SemanticValue:
    kind = obj.get("type")
    raw = obj.get("value")
    if kind == "quantity":
        return Quantity(_decimal(raw), obj.get("unit"))
    if kind == "number":
        return Number(_decimal(raw))
    if kind == "probability":
        return Probability(_decimal(raw))
    if kind == "identifier":
        return Identifier(raw)
    if kind == "text":
        return Text(raw)
    if kind == "reference":
        return Reference(raw)
    raise InvalidValue(f"unknown value type {kind!r}")
