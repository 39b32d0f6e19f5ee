"""Meaning evaluation: a statement overlaid on the current context."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Protocol, Sequence, Union

from ..canonical import digest
from ..core.dimensions import DIMENSIONS, Dimension
from ..core.signs import Cybersign, SignRegistry
from ..core.values import Identifier, SemanticValue, canonical_print_value
from ..errors import AmbiguityError, InconsistentDirectives
from ..fdsg.ast import Cyberstatement, maximal_dimensions
from .context import ContextSnapshot
from .mappings import MappingRegistry
from .weights import TOLERANCE, DimensionWeights, derive_weights

EXPRESSION = "expression"
CONTEXT = "context"


class Slot(NamedTuple):
    value: SemanticValue
    origin: str


class Conflict(NamedTuple):
    dimension: Dimension
    key: str
    expression_value: SemanticValue
    context_value: SemanticValue
    winner: str

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension.value,
            "key": self.key,
            "expression": canonical_print_value(self.expression_value),
            "context": canonical_print_value(self.context_value),
            "winner": self.winner,
        }


@dataclass(frozen=True)
class Tie:
    """Disambiguation outcome when several senses share the top score."""

    candidates: tuple[Cybersign, ...]

    def __len__(self):
        return len(self.candidates)


@dataclass(frozen=True)
class ResolvedMeaning:
    statement_id: str
    resolved: Mapping[Dimension, Mapping[str, Slot]]
    weights: DimensionWeights
    conflicts: tuple[Conflict, ...] = ()
    sign_bindings: Mapping[str, Cybersign] = field(default_factory=dict)

    def value(self, dim: Dimension, key: str) -> Optional[SemanticValue]:
        slot = self.resolved.get(dim, {}).get(key)
        return slot.value if slot else None

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "resolved": {
                d.value: [[k, canonical_print_value(s.value), s.origin] for k, s in self.resolved[d].items()]
                for d in DIMENSIONS if d in self.resolved
            },
            "weights": self.weights.to_dict(),
            "conflicts": [c.to_dict() for c in self.conflicts],
            "sign_bindings": {lam: s.digest for lam, s in sorted(self.sign_bindings.items())},
        }

    @property
    def digest(self) -> str:
        return digest(self.to_dict())


class IntegrationStrategy(Protocol):
    """Pluggable combination of expression and context slots."""

    def integrate(self, stmt: Cyberstatement, ctx: ContextSnapshot, weights: DimensionWeights,
                  registry: MappingRegistry) -> tuple[dict, list]:
        ...


class OverlayStrategy:
    """Expression slots win, except authoritative context slots of a top-ranked dimension."""

    def integrate(self, stmt, ctx, weights, registry):
        top = maximal_dimensions(stmt.omega, stmt.present)
        resolved: dict[Dimension, dict[str, Slot]] = {}
        conflicts: list[Conflict] = []
        for dim in DIMENSIONS:
            block = stmt.blocks.get(dim)
            expr = dict(block.slots) if block else {}
            state = ctx.states[dim]
            if not expr and not state:
                continue
            out: dict[str, Slot] = {}
            for key, value in expr.items():
                if key in state and state[key] != value:
                    ctx_wins = ctx.is_authoritative(dim, key) and dim in top
                    winner = CONTEXT if ctx_wins else EXPRESSION
                    conflicts.append(Conflict(dim, key, value, state[key], winner))
                    out[key] = Slot(state[key], CONTEXT) if ctx_wins else Slot(value, EXPRESSION)
                else:
                    out[key] = Slot(value, EXPRESSION)
            for key, value in state.items():
                if key not in out:
                    out[key] = Slot(value, CONTEXT)
            resolved[dim] = out
        return resolved, conflicts


DEFAULT_STRATEGY = OverlayStrategy()


def _evidence(sign: Cybersign, ctx: ContextSnapshot, weights: DimensionWeights) -> float:
    return sum(weights[d] for d in DIMENSIONS if sign.signified(d) in set(ctx.values(d)))


def disambiguate(lam: str, candidates: Sequence[Cybersign], ctx: ContextSnapshot,
                 weights: DimensionWeights,
                 priors: Optional[Mapping[str, float]] = None) -> Union[Cybersign, Tie]:
    """Pick the sense of ``lam`` best supported by the context.

    ``priors`` (sign digest -> boost) only separates senses whose evidence is
    tied; it never outweighs evidence.
    """
    if not candidates:
        raise ValueError(f"no candidate senses for {lam!r}")
    scored = [(_evidence(c, ctx, weights), c) for c in candidates]
    best = max(s for s, _ in scored)
    top = [c for s, c in scored if best - s <= TOLERANCE]
    if len(top) > 1 and priors:
        boosts = [(priors.get(c.digest, 0.0), c) for c in top]
        hi = max(b for b, _ in boosts)
        top = [c for b, c in boosts if hi - b <= TOLERANCE]
    return top[0] if len(top) == 1 else Tie(tuple(top))


def _sense_weights(stmt: Cyberstatement, weights: DimensionWeights) -> DimensionWeights:
    if len(stmt.present) == 4:
        return weights
    try:
        return derive_weights(stmt.omega, DIMENSIONS)
    except InconsistentDirectives:
        # a blend valid for the present blocks need not extend to all four;
        # keep its proportions and give each absent dimension an even share
        n = len(stmt.present)
        return DimensionWeights({d: weights[d] * n / 4 if d in stmt.present else 0.25
                                 for d in DIMENSIONS})


def evaluate_meaning(stmt: Cyberstatement, ctx: ContextSnapshot, signs: SignRegistry,
                     registry: MappingRegistry, strategy: Optional[IntegrationStrategy] = None, *,
                     bindings: Optional[Mapping[str, Cybersign]] = None,
                     priors: Optional[Mapping[str, Mapping[str, float]]] = None,
                     strict: bool = True) -> ResolvedMeaning:
    """Overlay ``stmt`` on ``ctx`` and bind every identifier that names a sign.

    ``bindings`` pins senses agreed earlier (for example through negotiation);
    ``priors`` maps a lambda to per-sense boosts from past outcomes. Raises
    :class:`AmbiguityError` on the first slot whose senses tie, unless
    ``strict`` is false, in which case tied lambdas are simply left unbound.
    """
    weights = derive_weights(stmt.omega, stmt.present)
    resolved, conflicts = (strategy or DEFAULT_STRATEGY).integrate(stmt, ctx, weights, registry)
    # senses are weighed over all four dimensions so that context in a
    # dimension the statement leaves out still counts as evidence
    sense_weights = _sense_weights(stmt, weights)
    bound: dict[str, Cybersign] = {}
    pinned = bindings or {}
    for dim in DIMENSIONS:
        for key, slot in resolved.get(dim, {}).items():
            if slot.origin != EXPRESSION or not isinstance(slot.value, Identifier):
                continue
            lam = slot.value.text
            if lam in bound:
                continue
            senses = signs.lookup(lam)
            if not senses:
                continue
            if lam in pinned:
                bound[lam] = pinned[lam]
                continue
            choice = disambiguate(lam, senses, ctx, sense_weights, (priors or {}).get(lam))
            if isinstance(choice, Tie):
                if not strict:
                    continue
                raise AmbiguityError(stmt.statement_id, dim, key, lam, choice.candidates)
            bound[lam] = choice
    frozen = MappingProxyType({d: MappingProxyType(s) for d, s in resolved.items()})
    return ResolvedMeaning(stmt.statement_id, frozen, weights, tuple(conflicts), MappingProxyType(bound))
