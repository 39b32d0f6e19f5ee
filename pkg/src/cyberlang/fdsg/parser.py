"""Recursive-descent parser for FDSG statements.

Grammar (after operator aliasing)::

    stmt      := block+ omega?
    block     := '[' DIM ':' pair (',' pair)* ']'
    pair      := KEY '=' value
    omega     := '[' '+O' ':' directive (',' directive)* ']'
    directive := DIM '>' DIM | DIM '||' DIM | DIM '~' NUMBER

The parser recovers at bracket boundaries so one pass reports every error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from ..core.dimensions import Dimension
from ..errors import InvalidStatement, ParseError
from ..ids import new_uuid
from .ast import (
    Blend,
    ComponentBlock,
    Cyberstatement,
    IntegrationOperator,
    Parallel,
    Precedence,
    omega_problems,
)
from .diagnostics import ParseDiagnostic, SourceMap, Span
from .lexer import VALUE_KINDS, Token, TokenKind, tokenize

IdSource = Callable[[], str]


@dataclass
class ParseResult:
    statement: Optional[Cyberstatement]
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def ok(self) -> bool:
        return self.statement is not None and not self.errors


class _Recover(Exception):
    pass


@dataclass
class _Block:
    dim: Dimension
    span: Span
    pairs: list[tuple[Token, object]]
    broken: bool = False


class _Parser:
    def __init__(self, tokens: list[Token], smap: SourceMap):
        self.toks = tokens
        self.i = 0
        self.map = smap
        self.diags: list[ParseDiagnostic] = []

    # -- helpers --
    def peek(self) -> Optional[Token]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, span: Span, code: str, message: str):
        self.diags.append(ParseDiagnostic("error", span, message, code))

    def here(self) -> Span:
        tok = self.peek()
        return tok.span if tok else self.map.end_span()

    def expect(self, kind: TokenKind, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind:
            found = f"{tok.text!r}" if tok else "end of input"
            code = "UnterminatedBlock" if tok is None else "UnexpectedToken"
            self.error(self.here(), code, f"expected {what}, found {found}")
            raise _Recover
        return self.advance()

    def recover(self):
        """Skip to just past the next ']' (or up to the next '[')."""
        while (tok := self.peek()) is not None:
            if tok.kind is TokenKind.RBRACKET:
                self.advance()
                return
            if tok.kind is TokenKind.LBRACKET:
                return
            self.advance()

    # -- grammar --
    def statement(self):
        blocks: list[_Block] = []
        omegas: list[tuple[Span, list]] = []
        while (tok := self.peek()) is not None:
            if tok.kind is not TokenKind.LBRACKET:
                self.error(tok.span, "UnexpectedToken", f"expected '[', found {tok.text!r}")
                self.advance()
                self.recover()
                continue
            open_tok = self.advance()
            head = self.peek()
            self.partial = None
            try:
                if head is not None and head.kind is TokenKind.DIM:
                    block = self.block(open_tok)
                    if omegas:
                        self.error(block.span, "OmegaNotLast", "the integration block must come last")
                    blocks.append(block)
                elif head is not None and head.kind is TokenKind.OMEGA:
                    span, directives = self.omega(open_tok)
                    if omegas:
                        self.error(span, "DuplicateOmega", "only one integration block is allowed")
                    omegas.append((span, directives))
                elif head is not None and head.kind is TokenKind.RBRACKET:
                    self.error(open_tok.span, "EmptyBlock", "empty brackets")
                    self.advance()
                else:
                    self.error(self.here(), "UnexpectedToken",
                               "expected a dimension (P, S, T, C) or '+O' after '['")
                    raise _Recover
            except _Recover:
                if self.partial is not None:
                    blocks.append(self.partial)
                self.recover()
        return blocks, omegas

    def block(self, open_tok: Token) -> _Block:
        dim_tok = self.advance()
        block = _Block(dim_tok.value, open_tok.span, [])
        self.partial = block
        try:
            self.expect(TokenKind.COLON, "':'")
            if (tok := self.peek()) is not None and tok.kind is TokenKind.RBRACKET:
                self.error(tok.span, "EmptyBlock", f"{block.dim.value}-block has no slots")
                block.broken = True
                self.advance()
                return block
            while True:
                key = self.expect(TokenKind.KEY, "a slot key")
                self.expect(TokenKind.EQ, "'='")
                val = self.peek()
                if val is None or val.kind not in VALUE_KINDS or val.value is None and val.kind is not TokenKind.INVALID:
                    found = f"{val.text!r}" if val else "end of input"
                    self.error(self.here(), "ExpectedValue", f"expected a value, found {found}")
                    raise _Recover
                self.advance()
                if val.kind is TokenKind.INVALID:
                    block.broken = True
                else:
                    block.pairs.append((key, val.value))
                sep = self.peek()
                if sep is not None and sep.kind is TokenKind.COMMA:
                    self.advance()
                    continue
                self.expect(TokenKind.RBRACKET, "',' or ']'")
                return block
        except _Recover:
            block.broken = True
            raise

    def omega(self, open_tok: Token) -> tuple[Span, list]:
        self.advance()  # OMEGA
        directives: list[tuple[Span, object]] = []
        self.expect(TokenKind.COLON, "':'")
        while True:
            first = self.expect(TokenKind.DIM, "a dimension")
            op = self.peek()
            if op is not None and op.kind is TokenKind.PREC:
                self.advance()
                other = self.expect(TokenKind.DIM, "a dimension after '>'")
                directives.append((first.span, Precedence(first.value, other.value)))
            elif op is not None and op.kind is TokenKind.PAR:
                self.advance()
                other = self.expect(TokenKind.DIM, "a dimension after '||'")
                directives.append((first.span, Parallel(first.value, other.value)))
            elif op is not None and op.kind is TokenKind.TILDE:
                self.advance()
                w = self.expect(TokenKind.NUMBER, "a blend weight")
                directives.append((first.span, (first.value, w.value)))
            else:
                self.error(self.here(), "UnexpectedToken", "expected '>', '||' or '~' in a directive")
                raise _Recover
            sep = self.peek()
            if sep is not None and sep.kind is TokenKind.COMMA:
                self.advance()
                continue
            self.expect(TokenKind.RBRACKET, "',' or ']'")
            return open_tok.span, directives


def _merge_blends(directives: list[tuple[Span, object]]) -> list[tuple[Span, object]]:
    """Fold every ``X~w`` into one Blend placed where the first one was written."""
    out: list[tuple[Span, object]] = []
    entries: list = []
    slot = None
    for span, d in directives:
        if isinstance(d, tuple):
            if slot is None:
                slot = len(out)
                out.append((span, None))
            entries.append(d)
        else:
            out.append((span, d))
    if slot is not None:
        out[slot] = (out[slot][0], Blend(tuple(entries)))
    return out


def _build(tokens, lex_diags, smap: SourceMap, ids: Optional[IdSource]) -> ParseResult:
    p = _Parser(tokens, smap)
    p.diags.extend(lex_diags)
    blocks, omegas = p.statement()
    diags = p.diags

    if not blocks and not any(d.severity == "error" for d in diags):
        span = omegas[0][0] if omegas else smap.span(0, min(1, len(smap.source)))
        diags.append(ParseDiagnostic("error", span, "a statement needs at least one dimension block",
                                     "EmptyStatement"))

    seen_dims: dict[Dimension, _Block] = {}
    component_blocks: list[ComponentBlock] = []
    for b in blocks:
        if b.dim in seen_dims:
            diags.append(ParseDiagnostic("error", b.span, f"second {b.dim.value}-block", "DuplicateDimensionBlock"))
            continue
        seen_dims[b.dim] = b
        keys: set[str] = set()
        for key_tok, _ in b.pairs:
            if key_tok.value in keys:
                diags.append(ParseDiagnostic("error", key_tok.span,
                                             f"{b.dim.value}.{key_tok.value} given twice", "DuplicateKey"))
            keys.add(key_tok.value)
        if not b.broken and b.pairs and len(keys) == len(b.pairs):
            component_blocks.append(ComponentBlock(b.dim, [(k.value, v) for k, v in b.pairs]))

    directives: list = []
    if omegas:
        merged = _merge_blends(omegas[0][1])
        directives = [d for _, d in merged]
        present = seen_dims.keys() if seen_dims else None
        for idx, code, msg in omega_problems(directives, present):
            diags.append(ParseDiagnostic("error", merged[idx][0], msg, code))

    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)
    try:
        stmt = Cyberstatement(
            {b.dimension: b for b in component_blocks},
            IntegrationOperator(tuple(directives)),
            (ids or new_uuid)(),
        )
    except InvalidStatement as exc:  # defensive: invariants the checks above missed
        diags.append(ParseDiagnostic("error", smap.span(0, 1), str(exc), exc.code))
        return ParseResult(None, diags)
    return ParseResult(stmt, diags)


def analyze(source: str, ids: Optional[IdSource] = None) -> ParseResult:
    """Parse one statement, returning the AST (if valid) and all diagnostics."""
    tokens, lex_diags = tokenize(source)
    return _build(tokens, lex_diags, SourceMap(source), ids)


def parse(source: str, ids: Optional[IdSource] = None) -> Cyberstatement:
    """Parse one statement or raise :class:`ParseError` carrying diagnostics."""
    result = analyze(source, ids)
    if not result.ok:
        raise ParseError(result.errors)
    return result.statement


def _paragraphs(source: str, tokens: list[Token], diags: list[ParseDiagnostic]) -> Iterator[tuple[list, list]]:
    lines = source.split("\n")
    para_of_line = []
    para, prev_blank = 0, True
    for line in lines:
        blank = not line.strip()
        if not blank and prev_blank and para_of_line:
            para += 1
        para_of_line.append(para)
        prev_blank = blank
    groups: dict[int, tuple[list, list]] = {}
    for t in tokens:
        groups.setdefault(para_of_line[t.span.line - 1], ([], []))[0].append(t)
    for d in diags:
        groups.setdefault(para_of_line[d.span.line - 1], ([], []))[1].append(d)
    for key in sorted(groups):
        yield groups[key]


def analyze_document(source: str, ids: Optional[IdSource] = None) -> list[ParseResult]:
    """Parse a ``.cyl`` document: one statement per blank-line separated paragraph."""
    smap = SourceMap(source)
    tokens, lex_diags = tokenize(source)
    results = []
    for toks, diags in _paragraphs(source, tokens, lex_diags):
        if not toks and not any(d.severity == "error" for d in diags):
            continue
        results.append(_build(toks, diags, smap, ids))
    return results
