from __future__ import annotations

from dataclasses import dataclass
from typing import Literal


@dataclass(frozen=True)
class Span:
    """1-based line/column plus the absolute character offset."""

    line: int
    column: int
    length: int
    offset: int = 0

    def in_bounds(self, source: str) -> bool:
        return 0 <= self.offset and self.offset + self.length <= len(source)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Literal["error", "warning"]
    span: Span
    message: str
    code: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity}[{self.code}]: {self.message}"


class SourceMap:
    """Offset -> (line, column) lookup for one source text."""

    def __init__(self, source: str):
        self.source = source
        self._starts = [0]
        for i, ch in enumerate(source):
            if ch == "\n":
                self._starts.append(i + 1)

    def span(self, offset: int, length: int = 1) -> Span:
        n = len(self.source)
        if n == 0:
            return Span(1, 1, 0, 0)
        offset = min(max(offset, 0), n - 1) if offset >= n else offset
        length = max(0, min(length, n - offset))
        lo, hi = 0, len(self._starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return Span(lo + 1, offset - self._starts[lo] + 1, length, offset)

    def end_span(self) -> Span:
        """Span of the last non-whitespace character (for end-of-input errors)."""
        stripped = self.source.rstrip()
        if not stripped:
            return self.span(0, len(self.source) and 1)
        return self.span(len(stripped) - 1, 1)

    def line_of(self, offset: int) -> int:
        return self.span(offset, 0).line
