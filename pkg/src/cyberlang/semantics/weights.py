"""Dimension weights derived from an integration operator.

Without a blend, each present dimension scores ``n + wins - losses`` where
``n`` is the number of present dimensions and wins/losses count the
dimensions it outranks or is outranked by (transitively, with parallel
dimensions sharing their class's relations). Scores are normalised to sum
to one. The scheme is strictly monotone in precedence, gives parallel
dimensions equal weight and gives every present dimension a positive share.

With a blend, listed weights are fixed and the remaining mass is split
evenly among the present dimensions the blend does not mention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from ..core.dimensions import DIMENSIONS, Dimension
from ..errors import InconsistentDirectives
from ..fdsg.ast import IntegrationOperator, find_cycle, parallel_classes

TOLERANCE = 1e-9


@dataclass(frozen=True)
class DimensionWeights:
    """Total map over all four dimensions; absent dimensions weigh 0."""

    weights: Mapping[Dimension, float]

    def __post_init__(self):
        full = {d: float(self.weights.get(d, 0.0)) for d in DIMENSIONS}
        if any(w < 0 or w > 1 for w in full.values()):
            raise ValueError(f"weights must lie in [0,1]: {full}")
        if abs(sum(full.values()) - 1.0) > TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {sum(full.values())}")
        object.__setattr__(self, "weights", MappingProxyType(full))

    def __getitem__(self, dim: Dimension) -> float:
        return self.weights[dim]

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.weights[d] for d in DIMENSIONS)

    def to_dict(self) -> dict:
        return {d.value: self.weights[d] for d in DIMENSIONS}

    @classmethod
    def uniform(cls, present: Iterable[Dimension]) -> "DimensionWeights":
        present = list(present)
        return cls({d: 1 / len(present) for d in present})


def _class_dominance(omega: IntegrationOperator, present: set[Dimension]):
    """(classes, dominates) where dominates[d] is every dimension strictly below d."""
    classes = parallel_classes(omega, present)
    reps = {d: min(classes[d], key=lambda x: x.order) for d in present}
    edges = set()
    for p in omega.precedences:
        if p.higher not in present or p.lower not in present:
            continue
        hi, lo = reps[p.higher], reps[p.lower]
        if hi == lo:
            raise InconsistentDirectives(
                f"{p.higher.value}>{p.lower.value} orders two dimensions declared parallel")
        edges.add((hi, lo))
    cycle = find_cycle(edges)
    if cycle:
        raise InconsistentDirectives(
            "precedence cycle through parallel classes: " + ">".join(d.value for d in cycle))
    below = {r: set() for r in set(reps.values())}
    changed = True
    for hi, lo in edges:
        below[hi].add(lo)
    while changed:
        changed = False
        for r in below:
            extra = set().union(*(below[x] for x in below[r])) - below[r] if below[r] else set()
            if extra:
                below[r] |= extra
                changed = True
    dominates = {d: {m for r in below[reps[d]] for m in classes[r]} for d in present}
    return classes, dominates


def _rank_weights(omega: IntegrationOperator, present: set[Dimension]) -> dict[Dimension, Fraction]:
    _, dominates = _class_dominance(omega, present)
    n = len(present)
    losses = {d: 0 for d in present}
    for d in present:
        for lo in dominates[d]:
            losses[lo] += 1
    scores = {d: n + len(dominates[d]) - losses[d] for d in present}
    total = sum(scores.values())
    return {d: Fraction(s, total) for d, s in scores.items()}


def _blend_weights(omega: IntegrationOperator, present: set[Dimension]) -> dict[Dimension, Fraction]:
    fixed = {d: Fraction(w) for d, w in omega.blend.items() if d in present}
    rest = [d for d in present if d not in fixed]
    remaining = 1 - sum(fixed.values())
    if remaining < 0:
        raise InconsistentDirectives(f"blend weights exceed 1 ({float(sum(fixed.values()))})")
    if not rest and abs(remaining) > Fraction(TOLERANCE):
        raise InconsistentDirectives(f"blend covers every dimension but sums to {float(1 - remaining)}")
    share = remaining / len(rest) if rest else Fraction(0)
    out = dict(fixed)
    out.update({d: share for d in rest})
    # the blend must still honour the relational directives
    classes, dominates = _class_dominance(omega, present)
    for d in present:
        for m in classes[d]:
            if abs(out[d] - out[m]) > Fraction(TOLERANCE):
                raise InconsistentDirectives(
                    f"blend gives {d.value} and {m.value} different weights but they are parallel")
        for lo in dominates[d]:
            if out[d] <= out[lo]:
                raise InconsistentDirectives(
                    f"blend gives {d.value} no more weight than {lo.value} although {d.value} takes precedence")
    return out


def derive_weights(omega: IntegrationOperator, present: Iterable[Dimension]) -> DimensionWeights:
    present = set(present)
    if not present:
        raise ValueError("derive_weights needs at least one present dimension")
    if omega.blend:
        raw = _blend_weights(omega, present)
    else:
        raw = _rank_weights(omega, present)
    return DimensionWeights({d: float(w) for d, w in raw.items()})
