"""Adaptive interpretation priors learned from negotiation outcomes."""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from ..canonical import canonical_json, sha256_hex
from ..core.dimensions import DIMENSIONS
from ..core.signs import Cybersign
from ..semantics.context import ContextSnapshot

BOOST_SCALE = Fraction(1, 2)


class LedgerRecord(NamedTuple):
    context_signature: str
    lam: str
    chosen_sign_digest: str
    count: int

    def to_dict(self) -> dict:
        return {"signature": self.context_signature, "lambda": self.lam,
                "digest": self.chosen_sign_digest, "count": self.count}


def context_signature(ctx: ContextSnapshot) -> str:
    """Hash of the context's shape: which (dimension, key) slots exist, not their values."""
    shape = sorted([d.value, k] for d in DIMENSIONS for k in ctx.states[d])
    return sha256_hex(canonical_json(shape))


class InterpretationLedger:
    """Counts of which sense won for a lambda under a given context shape.

    Writes are serialised by a lock; with ``path`` set every update is also
    appended to a JSONL file, whose last line per key is authoritative.
    """

    def __init__(self, records: Iterable[LedgerRecord] = (), path: Optional[Path] = None):
        self._lock = threading.Lock()
        self._counts: dict[tuple[str, str, str], int] = {}
        for r in records:
            if r.count <= 0:
                raise ValueError("ledger counts must be positive")
            self._counts[(r.context_signature, r.lam, r.chosen_sign_digest)] = r.count
        self.path = Path(path) if path else None

    @property
    def records(self) -> list[LedgerRecord]:
        return [LedgerRecord(*k, c) for k, c in sorted(self._counts.items())]

    def count(self, signature: str, lam: str, digest: str) -> int:
        return self._counts.get((signature, lam, digest), 0)

    def total(self, signature: str, lam: str) -> int:
        return sum(c for (s, l, _), c in self._counts.items() if s == signature and l == lam)

    def __len__(self):
        return len(self._counts)

    def increment(self, signature: str, lam: str, digest: str) -> LedgerRecord:
        with self._lock:
            key = (signature, lam, digest)
            self._counts[key] = self._counts.get(key, 0) + 1
            rec = LedgerRecord(*key, self._counts[key])
            if self.path is not None:
                with self.path.open("a", encoding="utf-8", newline="\n") as fh:
                    fh.write(canonical_json(rec.to_dict()) + "\n")
            return rec

    @classmethod
    def load(cls, path) -> "InterpretationLedger":
        path = Path(path)
        latest: dict = {}
        if path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    d = json.loads(line)
                    latest[(d["signature"], d["lambda"], d["digest"])] = d["count"]
        return cls((LedgerRecord(*k, c) for k, c in latest.items()), path=path)


def record_outcome(ledger: InterpretationLedger, ctx: ContextSnapshot, lam: str,
                   chosen: Cybersign) -> InterpretationLedger:
    ledger.increment(context_signature(ctx), lam, chosen.digest)
    return ledger


def prior_boost(ledger: InterpretationLedger, ctx: ContextSnapshot, lam: str,
                candidates: Sequence[Cybersign]) -> dict[str, float]:
    """``0.5 * count / (1 + total)`` per candidate digest; always in [0, 0.5)."""
    if not candidates:
        raise ValueError("prior_boost needs at least one candidate")
    sig = context_signature(ctx)
    total = ledger.total(sig, lam)
    return {
        c.digest: float(BOOST_SCALE * Fraction(ledger.count(sig, lam, c.digest), 1 + total))
        for c in candidates
    }
