"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations

from typing import Any, Optional, Sequence


class CyberlangError(Exception):
    """Base class for all toolkit errors."""

    code = "Error"


# -- layer 2: values and signs -------------------------------------------------

class InvalidValue(CyberlangError, ValueError):
    code = "InvalidValue"


class UnknownUnit(InvalidValue):
    code = "UnknownUnit"


class InvalidSign(CyberlangError, ValueError):
    code = "InvalidSign"


class InvalidDyadNamespace(InvalidSign):
    code = "InvalidDyadNamespace"


class DuplicateSign(CyberlangError):
    code = "DuplicateSign"


# -- layer 3: grammar ----------------------------------------------------------

class ParseError(CyberlangError):
    """Raised when a source text yields at least one error diagnostic."""

    code = "ParseError"

    def __init__(self, diagnostics: Sequence[Any]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse failed")

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics if d.severity == "error"]


class LexError(ParseError):
    code = "LexError"


class InvalidStatement(CyberlangError, ValueError):
    """A programmatically built statement violates an AST invariant."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


# -- layer 4: semantics --------------------------------------------------------

class UnmappedReference(CyberlangError, KeyError):
    code = "UnmappedReference"

    def __init__(self, kind: str, ref: str, hop: Optional[int] = None):
        self.kind = kind
        self.ref = ref
        self.hop = hop
        where = f" (hop {hop})" if hop is not None else ""
        super().__init__(f"{ref} is not mapped in table {kind}{where}")

    def __str__(self) -> str:
        return self.args[0]


class NonBijectiveTable(CyberlangError, ValueError):
    code = "NonBijectiveTable"


class InconsistentDirectives(CyberlangError, ValueError):
    code = "InconsistentDirectives"


class InvalidContext(CyberlangError, ValueError):
    code = "InvalidContext"


class AmbiguityError(CyberlangError):
    """Disambiguation of a slot value ended in a tie.

    ``candidates`` holds every argmax sense; the negotiation layer opens a
    session from this object.
    """

    code = "Ambiguity"

    def __init__(self, statement_id: str, dimension: Any, key: str, lam: str,
                 candidates: Sequence[Any]):
        self.statement_id = statement_id
        self.dimension = dimension
        self.key = key
        self.lam = lam
        self.candidates = list(candidates)
        super().__init__(
            f"{dimension.value}.{key}={lam} is ambiguous between "
            f"{len(self.candidates)} senses"
        )


# -- layer 5: compiler ---------------------------------------------------------

class DialectError(CyberlangError, ValueError):
    code = "DialectError"


class NoApplicableTemplate(CyberlangError):
    code = "NoApplicableTemplate"


class EmptyCompilation(CyberlangError):
    code = "EmptyCompilation"


class SchemaViolation(CyberlangError, ValueError):
    code = "SchemaViolation"


class DialectViolation(CyberlangError):
    code = "DialectViolation"

    def __init__(self, violations: Sequence[Any]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


# -- negotiation ---------------------------------------------------------------

class ProtocolViolation(CyberlangError):
    code = "ProtocolViolation"


class DigestMismatch(ProtocolViolation):
    code = "DigestMismatch"


class UnknownStatement(CyberlangError, KeyError):
    code = "UnknownStatement"


# -- layer 1: bus --------------------------------------------------------------

class FrameError(CyberlangError, ValueError):
    code = "FrameError"


class BadMagic(FrameError):
    code = "BadMagic"


class UnsupportedVersion(FrameError):
    code = "UnsupportedVersion"


class UnknownMessageType(FrameError):
    code = "UnknownMessageType"


class OversizePayload(FrameError):
    code = "OversizePayload"


class UnknownPublisher(CyberlangError, KeyError):
    code = "UnknownPublisher"


class ScriptError(CyberlangError):
    code = "ScriptError"

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        prefix = f"event {index}: " if index is not None else ""
        super().__init__(prefix + message)


class IoFailure(CyberlangError, OSError):
    code = "IoFailure"
