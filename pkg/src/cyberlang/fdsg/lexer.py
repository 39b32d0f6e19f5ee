"""Tokenizer for FDSG source text.

Unicode operators and their ASCII aliases map to the same token kinds::

    ⊕Ω  +O    OMEGA
    ≻   >     PREC
    ∥ ‖ ||    PAR

The lexer tracks where it is inside a bracket so that a bare letter is a
dimension (``[P:``), a slot key (``[P: sector=``) or an identifier value
(``sector=A7``) as appropriate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from ..core.dimensions import Dimension
from ..core.values import (
    IDENT_RE,
    KEY_RE,
    NUMBER_RE,
    REFERENCE_RE,
    UNIT_CODES,
    UNIT_RE,
    Identifier,
    Quantity,
    Text,
    Reference,
    classify_number,
    transliterate,
)
from ..errors import InvalidValue, LexError
from .diagnostics import ParseDiagnostic, SourceMap, Span


class TokenKind(str, Enum):
    LBRACKET = "LBRACKET"
    RBRACKET = "RBRACKET"
    COLON = "COLON"
    COMMA = "COMMA"
    EQ = "EQ"
    TILDE = "TILDE"
    DIM = "DIM"
    OMEGA = "OMEGA"
    PREC = "PREC"
    PAR = "PAR"
    KEY = "KEY"
    IDENT = "IDENT"
    TEXT = "TEXT"
    NUMBER = "NUMBER"
    QUANTITY = "QUANTITY"
    REFERENCE = "REFERENCE"
    INVALID = "INVALID"  # a value lexeme that already produced a diagnostic


VALUE_KINDS = frozenset({
    TokenKind.IDENT, TokenKind.TEXT, TokenKind.NUMBER, TokenKind.QUANTITY,
    TokenKind.REFERENCE, TokenKind.INVALID,
})

_PUNCT = {
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    ":": TokenKind.COLON,
    ",": TokenKind.COMMA,
    "=": TokenKind.EQ,
    "~": TokenKind.TILDE,
    ">": TokenKind.PREC,
    "≻": TokenKind.PREC,
    "∥": TokenKind.PAR,
    "‖": TokenKind.PAR,
}

# lexer modes
_OUTSIDE, _HEAD, _KEY, _VALUE, _AFTER, _DIRECTIVE, _WEIGHT = range(7)


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    value: Any = None

    def __repr__(self):
        return f"{self.kind.value}({self.text})"


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-"


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.map = SourceMap(source)
        self.pos = 0
        self.mode = _OUTSIDE
        self.in_omega = False
        self.tokens: list[Token] = []
        self.diags: list[ParseDiagnostic] = []

    def error(self, start: int, length: int, code: str, message: str, severity="error"):
        self.diags.append(ParseDiagnostic(severity, self.map.span(start, length), message, code))

    def emit(self, kind: TokenKind, start: int, end: int, value: Any = None, text: Optional[str] = None):
        if text is None:
            text = self.src[start:end]
        self.tokens.append(Token(kind, text, self.map.span(start, end - start), value))
        self.pos = end

    def run(self):
        src = self.src
        n = len(src)
        while self.pos < n:
            ch = src[self.pos]
            if ch.isspace():
                self.pos += 1
                continue
            if ch == "#":
                nl = src.find("\n", self.pos)
                self.pos = n if nl < 0 else nl
                continue
            self.step(ch)
        return self.tokens, self.diags

    def step(self, ch: str):
        src, i = self.src, self.pos
        if ch == "[":
            self.emit(TokenKind.LBRACKET, i, i + 1)
            self.mode, self.in_omega = _HEAD, False
            return
        if ch == "]":
            self.emit(TokenKind.RBRACKET, i, i + 1)
            self.mode, self.in_omega = _OUTSIDE, False
            return
        if ch == ":":
            self.emit(TokenKind.COLON, i, i + 1)
            self.mode = _DIRECTIVE if self.in_omega else _KEY
            return
        if ch == ",":
            self.emit(TokenKind.COMMA, i, i + 1)
            self.mode = _DIRECTIVE if self.in_omega else _KEY
            return
        if ch == "=":
            self.emit(TokenKind.EQ, i, i + 1)
            self.mode = _VALUE
            return
        if ch == "~":
            self.emit(TokenKind.TILDE, i, i + 1)
            self.mode = _WEIGHT
            return
        if src.startswith("||", i):
            self.emit(TokenKind.PAR, i, i + 2, text="||")
            return
        if ch in _PUNCT:
            kind = _PUNCT[ch]
            self.emit(kind, i, i + 1, text=">" if kind is TokenKind.PREC else "||")
            return
        if src.startswith("⊕Ω", i) or (self.mode == _HEAD and src.startswith("+O", i)):
            self.emit(TokenKind.OMEGA, i, i + 2, text="+O")
            self.mode, self.in_omega = _AFTER, True
            return
        if ch == '"':
            self.lex_text(i)
            return
        if self.mode == _VALUE:
            self.lex_value(i)
            return
        if self.mode == _WEIGHT:
            m = NUMBER_RE.match(src, i)
            if m and not (m.end() < len(src) and _is_word_char(src[m.end()])):
                self.emit(TokenKind.NUMBER, i, m.end(), value=m.group())
                self.mode = _AFTER
                return
        if ch.isdigit() or (ch in "+-" and i + 1 < len(src) and src[i + 1].isdigit()):
            m = NUMBER_RE.match(src, i)
            self.emit(TokenKind.NUMBER, i, m.end(), value=m.group())
            return
        if _is_word_char(ch) and not ch.isdigit() and ch != "-":
            self.lex_word(i)
            return
        self.error(i, 1, "UnexpectedCharacter", f"unexpected character {ch!r}")
        self.pos = i + 1

    def word_end(self, i: int) -> int:
        j = i
        while j < len(self.src) and _is_word_char(self.src[j]):
            j += 1
        return j

    def lex_word(self, i: int):
        j = self.word_end(i)
        word = self.src[i:j]
        if self.mode in (_HEAD, _DIRECTIVE):
            if word in ("P", "S", "T", "C"):
                self.emit(TokenKind.DIM, i, j, value=Dimension(word))
                if self.mode == _HEAD:
                    self.mode = _AFTER
                return
            self.error(i, j - i, "UnknownDimension", f"expected one of P, S, T, C; found {word!r}")
            self.pos = j
            return
        if self.mode == _KEY:
            if not KEY_RE.fullmatch(word):
                self.error(i, j - i, "InvalidKey",
                           f"slot key {word!r} must match [a-z][a-z0-9-]*")
            self.emit(TokenKind.KEY, i, j, value=word)
            return
        # outside any slot context: let the parser complain about placement
        self.emit(TokenKind.IDENT, i, j, value=None)

    def lex_text(self, i: int):
        try:
            decoded, end = json.decoder.scanstring(self.src, i + 1)
        except ValueError as exc:
            nl = self.src.find("\n", i)
            end = len(self.src) if nl < 0 else nl
            self.error(i, end - i, "UnterminatedString", f"bad string literal: {exc.msg}")
            self.emit(TokenKind.INVALID, i, end)
            self.mode = _AFTER
            return
        self.emit(TokenKind.TEXT, i, end, value=Text(decoded))
        self.mode = _AFTER

    def lex_value(self, i: int):
        src = self.src
        self.mode = _AFTER
        m = REFERENCE_RE.match(src, i)
        if m and src[i] in "pstc" and src[i + 1] == ":":
            self.emit(TokenKind.REFERENCE, i, m.end(), value=Reference(m.group()))
            return
        m = NUMBER_RE.match(src, i)
        if m:
            end = m.end()
            u = UNIT_RE.match(src, end)
            stop = self.word_end(end)
            if u is None and stop == end:
                self.emit(TokenKind.NUMBER, i, end, value=classify_number(m.group()))
                return
            if u is not None and u.end() == stop:
                unit = u.group()
                if unit not in UNIT_CODES:
                    self.error(end, stop - end, "UnknownUnit",
                               f"unknown unit {unit!r}; expected one of {sorted(UNIT_CODES - {'none'})}")
                elif unit == "none":
                    self.error(i, stop - i, "InvalidValue", "dimensionless magnitude must be a plain number")
                else:
                    self.emit(TokenKind.QUANTITY, i, stop, value=Quantity(m.group(), unit))
                    return
            else:
                self.error(i, stop - i, "InvalidValue", f"malformed value {src[i:stop]!r}")
            self.emit(TokenKind.INVALID, i, stop)
            return
        if src[i].isalpha():
            j = self.word_end(i)
            word = src[i:j]
            if not word.isascii():
                try:
                    ascii_word = transliterate(word)
                except InvalidValue as exc:
                    self.error(i, j - i, "UnsupportedCharacter", str(exc))
                    self.emit(TokenKind.INVALID, i, j)
                    return
                self.error(i, j - i, "NormalizedIdentifier",
                           f"{word!r} normalised to {ascii_word!r}", severity="warning")
                word = ascii_word
            if not IDENT_RE.fullmatch(word):
                self.error(i, j - i, "InvalidValue", f"malformed identifier {word!r}")
                self.emit(TokenKind.INVALID, i, j)
                return
            self.emit(TokenKind.IDENT, i, j, value=Identifier(word), text=word)
            return
        self.mode = _VALUE
        self.error(i, 1, "UnexpectedCharacter", f"unexpected character {src[i]!r} where a value belongs")
        self.pos = i + 1


def tokenize(source: str) -> tuple[list[Token], list[ParseDiagnostic]]:
    """Tokens plus every lexical diagnostic; never raises on bad input."""
    return _Lexer(source).run()


def lex(source: str) -> list[Token]:
    tokens, diags = tokenize(source)
    if any(d.severity == "error" for d in diags):
        raise LexError([d for d in diags if d.severity == "error"])
    return tokens
