"""Layer 3: lexer, parser, AST and canonical printer for FDSG statements."""

from .ast import (
    ABSENT,
    Blend,
    ComponentBlock,
    Cyberstatement,
    IntegrationOperator,
    Parallel,
    Precedence,
    maximal_dimensions,
    parallel_classes,
    precedence_closure,
    precedence_levels,
    project,
)
from .diagnostics import ParseDiagnostic, Span
from .lexer import Token, TokenKind, lex, tokenize
from .parser import ParseResult, analyze, analyze_document, parse
from .printer import print_canonical

__all__ = [
    "ABSENT", "Blend", "ComponentBlock", "Cyberstatement", "IntegrationOperator",
    "Parallel", "Precedence", "maximal_dimensions", "parallel_classes",
    "precedence_closure", "precedence_levels", "project",
    "ParseDiagnostic", "Span", "Token", "TokenKind", "lex", "tokenize",
    "ParseResult", "analyze", "analyze_document", "parse", "print_canonical",
]
