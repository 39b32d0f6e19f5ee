"""Quadruple-annotated corpus records and their JSONL export."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from ..canonical import canonical_json
from ..errors import IoFailure, SchemaViolation
from ..resources import schema_errors

SCHEMA = "corpus-record"


@dataclass(frozen=True)
class CorpusRecord:
    tick: int
    statement_id: str
    publisher: str
    statement: str
    components: dict  # dimension -> {key: canonical value text}, all four present
    context: dict
    resolution: dict
    negotiation: Optional[list] = None
    deliveries: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusRecord":
        errors = schema_errors(SCHEMA, data)
        if errors:
            raise SchemaViolation("; ".join(errors))
        return cls(**data)

    def to_line(self) -> str:
        return canonical_json(self.to_dict())


def corpus_text(records: Iterable[CorpusRecord]) -> str:
    return "".join(r.to_line() + "\n" for r in records)


def export_corpus(records: Iterable[CorpusRecord], destination) -> Path:
    """Write one key-sorted JSON record per line with LF endings."""
    records = list(records)
    for r in records:
        errors = schema_errors(SCHEMA, r.to_dict())
        if errors:
            raise SchemaViolation(f"record at tick {r.tick}: " + "; ".join(errors))
    path = Path(destination)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(corpus_text(records))
    except OSError as exc:
        raise IoFailure(f"cannot write corpus to {path}: {exc}") from None
    return path


def import_corpus(source) -> list[CorpusRecord]:
    try:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read corpus {source}: {exc}") from None
    out = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(CorpusRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line {n}: not JSON: {exc}") from None
        except SchemaViolation as exc:
            raise SchemaViolation(f"line {n}: {exc}") from None
    return out


def validate_corpus(source) -> list[tuple[int, str]]:
    """(line number, problem) for every invalid line; empty when the file is valid."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read corpus {source}: {exc}") from None
    problems = []
    for n, line in enumerate(text.split("\n"), 1):
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append((n, f"not JSON: {exc}"))
            continue
        errors = schema_errors(SCHEMA, data)
        problems.extend((n, e) for e in errors)
        if not errors and canonical_json(data) != line:
            problems.append((n, "line is not in canonical key-sorted form"))
    if "\r" in text:
        problems.append((0, "CR characters found; lines must end with LF"))
    return problems
