"""AST for Four-Dimensional Synchronous Grammar statements."""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from decimal import Decimal
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from ..core.dimensions import DIMENSIONS, Dimension
from ..core.values import KEY_RE, VALUE_TYPES, SemanticValue, _decimal
from ..errors import InvalidStatement

BLEND_TOLERANCE = 1e-9


class ComponentBlock:
    """One dimension's slots, in insertion order.

    Equality is order-sensitive on the slots, matching the canonical printer.
    """

    __slots__ = ("_dimension", "_slots")

    def __init__(self, dimension: Dimension,
                 slots: Union[Mapping[str, SemanticValue], Iterable[tuple[str, SemanticValue]]]):
        items = list(slots.items()) if isinstance(slots, Mapping) else list(slots)
        if not items:
            raise InvalidStatement("EmptyBlock", f"{dimension.value}-block has no slots")
        seen: dict[str, SemanticValue] = {}
        for key, value in items:
            if not isinstance(key, str) or not KEY_RE.fullmatch(key):
                raise InvalidStatement("InvalidKey", f"bad slot key {key!r}")
            if key in seen:
                raise InvalidStatement("DuplicateKey", f"{dimension.value}.{key} given twice")
            if not isinstance(value, VALUE_TYPES):
                raise InvalidStatement("InvalidValue", f"{dimension.value}.{key}: {value!r}")
            seen[key] = value
        self._dimension = dimension
        self._slots = MappingProxyType(seen)

    @property
    def dimension(self) -> Dimension:
        return self._dimension

    @property
    def slots(self) -> Mapping[str, SemanticValue]:
        return self._slots

    def __eq__(self, other):
        if not isinstance(other, ComponentBlock):
            return NotImplemented
        return (self._dimension == other._dimension
                and list(self._slots.items()) == list(other._slots.items()))

    __hash__ = None

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self._slots.items())
        return f"ComponentBlock({self._dimension.value}: {inner})"


@dataclass(frozen=True)
class Precedence:
    higher: Dimension
    lower: Dimension

    @property
    def dims(self) -> tuple[Dimension, ...]:
        return (self.higher, self.lower)


@dataclass(frozen=True)
class Parallel:
    a: Dimension
    b: Dimension

    @property
    def dims(self) -> tuple[Dimension, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Blend:
    """Probabilistic blending weights; entries keep their written order."""

    entries: tuple[tuple[Dimension, Decimal], ...]

    def __post_init__(self):
        if isinstance(self.entries, Mapping):
            entries = tuple(self.entries.items())
        else:
            entries = tuple(self.entries)
        object.__setattr__(self, "entries", tuple((d, _decimal(w)) for d, w in entries))

    @property
    def weights(self) -> dict[Dimension, Decimal]:
        return dict(self.entries)

    @property
    def dims(self) -> tuple[Dimension, ...]:
        return tuple(d for d, _ in self.entries)


IntegrationDirective = Union[Precedence, Parallel, Blend]


def omega_problems(directives: Iterable[IntegrationDirective],
                   present: Optional[Iterable[Dimension]] = None) -> list[tuple[int, str, str]]:
    """All invariant violations of a directive list as ``(index, code, message)``.

    With ``present`` given, directives must only name present dimensions and
    blend weights must leave no unassigned mass.
    """
    directives = list(directives)
    present_set = set(present) if present is not None else None
    problems: list[tuple[int, str, str]] = []
    seen: dict[IntegrationDirective, int] = {}
    prec_edges: dict[tuple[Dimension, Dimension], int] = {}
    parallel: dict[frozenset, int] = {}
    blended: dict[Dimension, Decimal] = {}

    for i, d in enumerate(directives):
        if not isinstance(d, (Precedence, Parallel, Blend)):
            problems.append((i, "InvalidDirective", f"not a directive: {d!r}"))
            continue
        if present_set is not None:
            for dim in d.dims:
                if dim not in present_set:
                    problems.append((i, "ContradictoryDirectives",
                                     f"directive names {dim.value}, which has no block"))
        if isinstance(d, Blend):
            if not d.entries:
                problems.append((i, "InvalidBlend", "empty blend directive"))
            for dim, w in d.entries:
                if w < 0 or w > 1:
                    problems.append((i, "InvalidBlend", f"blend weight {w} for {dim.value} outside [0, 1]"))
                if dim in blended:
                    problems.append((i, "ContradictoryDirectives", f"{dim.value} blended twice"))
                blended[dim] = w
            continue
        if d in seen:
            problems.append((i, "DuplicateDirective", f"directive repeated (first at {seen[d]})"))
            continue
        seen[d] = i
        x, y = d.dims
        if x == y:
            problems.append((i, "InvalidDirective", f"{x.value} related to itself"))
            continue
        if isinstance(d, Precedence):
            if (y, x) in prec_edges:
                problems.append((i, "ContradictoryDirectives",
                                 f"{x.value}>{y.value} contradicts {y.value}>{x.value}"))
            if frozenset((x, y)) in parallel:
                problems.append((i, "ContradictoryDirectives",
                                 f"{x.value}>{y.value} contradicts {x.value}||{y.value}"))
            prec_edges[(x, y)] = i
        else:
            pair = frozenset((x, y))
            if pair in parallel:
                problems.append((i, "DuplicateDirective", f"{x.value}||{y.value} repeated"))
                continue
            if (x, y) in prec_edges or (y, x) in prec_edges:
                problems.append((i, "ContradictoryDirectives",
                                 f"{x.value}||{y.value} contradicts a precedence between them"))
            parallel[pair] = i

    if blended:
        total = sum(blended.values())
        if total > 1 + Decimal(BLEND_TOLERANCE):
            problems.append((_first_blend(directives), "InvalidBlend", f"blend weights sum to {total} > 1"))
        elif present_set is not None:
            unlisted = present_set - set(blended)
            if not unlisted and abs(total - 1) > Decimal(BLEND_TOLERANCE):
                problems.append((_first_blend(directives), "InvalidBlend",
                                 f"blend weights over all present dimensions sum to {total}, not 1"))

    # longer cycles; two-cycles were reported as contradictions above
    acyclic_edges = {e: i for e, i in prec_edges.items() if (e[1], e[0]) not in prec_edges}
    cycle = find_cycle(acyclic_edges)
    if cycle:
        idx = min(acyclic_edges[(a, b)] for a, b in zip(cycle, cycle[1:]))
        text = ">".join(d.value for d in cycle)
        problems.append((idx, "CyclicPrecedence", f"precedence cycle {text}"))
    elif not any(code == "ContradictoryDirectives" for _, code, _ in problems):
        problems.extend(_class_conflicts(prec_edges, parallel))
    return sorted(problems, key=lambda p: p[0])


def _class_conflicts(prec_edges, parallel) -> list[tuple[int, str, str]]:
    """Precedences that, read over parallel classes, order a class against itself."""
    parent: dict[Dimension, Dimension] = {}

    def find(d):
        while parent.get(d, d) != d:
            d = parent[d]
        return d

    for pair in parallel:
        a, b = sorted(pair, key=lambda d: d.order)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    lifted = {}
    for (x, y), i in prec_edges.items():
        cx, cy = find(x), find(y)
        if cx == cy:
            return [(i, "ContradictoryDirectives",
                     f"{x.value}>{y.value} orders two dimensions made parallel by other directives")]
        lifted.setdefault((cx, cy), i)
    cycle = find_cycle(lifted)
    if cycle:
        idx = max(lifted[(a, b)] for a, b in zip(cycle, cycle[1:]))
        return [(idx, "ContradictoryDirectives", "precedences between parallel groups form a cycle")]
    return []


def _first_blend(directives) -> int:
    return next(i for i, d in enumerate(directives) if isinstance(d, Blend))


def find_cycle(edges: Iterable[tuple[Dimension, Dimension]]) -> Optional[list[Dimension]]:
    ts = graphlib.TopologicalSorter()
    for a, b in edges:
        ts.add(b, a)
    try:
        ts.prepare()
    except graphlib.CycleError as exc:
        # each node is an immediate predecessor of the next, i.e. edge a>b
        return list(exc.args[1])
    return None


@dataclass(frozen=True)
class IntegrationOperator:
    directives: tuple[IntegrationDirective, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "directives", tuple(self.directives))
        problems = omega_problems(self.directives)
        if problems:
            _, code, msg = problems[0]
            raise InvalidStatement(code, msg)

    def __iter__(self):
        return iter(self.directives)

    def __len__(self):
        return len(self.directives)

    def __bool__(self):
        return bool(self.directives)

    @property
    def precedences(self) -> list[Precedence]:
        return [d for d in self.directives if isinstance(d, Precedence)]

    @property
    def parallels(self) -> list[Parallel]:
        return [d for d in self.directives if isinstance(d, Parallel)]

    @property
    def blend(self) -> dict[Dimension, Decimal]:
        out: dict[Dimension, Decimal] = {}
        for d in self.directives:
            if isinstance(d, Blend):
                out.update(d.entries)
        return out

    @property
    def dims(self) -> set[Dimension]:
        return {dim for d in self.directives for dim in d.dims}


@dataclass(frozen=True, eq=False)
class Cyberstatement:
    """A parsed utterance: up to four blocks plus the integration operator.

    ``statement_id`` is excluded from equality (structural comparison).
    """

    blocks: Mapping[Dimension, ComponentBlock]
    omega: IntegrationOperator = field(default_factory=IntegrationOperator)
    statement_id: str = ""

    def __post_init__(self):
        if isinstance(self.blocks, Mapping):
            items = list(self.blocks.items())
        else:
            items = [(b.dimension, b) for b in self.blocks]
        if not items:
            raise InvalidStatement("EmptyStatement", "a statement needs at least one block")
        blocks: dict[Dimension, ComponentBlock] = {}
        for dim, block in items:
            if block.dimension != dim:
                raise InvalidStatement("InvalidBlock", f"block for {dim.value} holds {block.dimension.value}")
            if dim in blocks:
                raise InvalidStatement("DuplicateDimensionBlock", f"two {dim.value}-blocks")
            blocks[dim] = block
        ordered = {d: blocks[d] for d in DIMENSIONS if d in blocks}
        object.__setattr__(self, "blocks", MappingProxyType(ordered))
        omega = self.omega
        if not isinstance(omega, IntegrationOperator):
            omega = IntegrationOperator(tuple(omega))
            object.__setattr__(self, "omega", omega)
        problems = omega_problems(omega.directives, ordered.keys())
        if problems:
            _, code, msg = problems[0]
            raise InvalidStatement(code, msg)

    @property
    def present(self) -> tuple[Dimension, ...]:
        return tuple(self.blocks)

    def slot(self, dim: Dimension, key: str) -> Optional[SemanticValue]:
        block = self.blocks.get(dim)
        return block.slots.get(key) if block else None

    def iter_slots(self):
        """``(dimension, key, value)`` in canonical order."""
        for dim, block in self.blocks.items():
            for key, value in block.slots.items():
                yield dim, key, value

    def __eq__(self, other):
        if not isinstance(other, Cyberstatement):
            return NotImplemented
        return dict(self.blocks) == dict(other.blocks) and self.omega == other.omega

    __hash__ = None


class Absent:
    """Marker returned by :func:`project` for a dimension without a block."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "ABSENT"


ABSENT = Absent()


def project(stmt: Cyberstatement, dim: Dimension) -> Union[ComponentBlock, Absent]:
    return stmt.blocks.get(dim, ABSENT)


# -- precedence structure shared by weights, overlay and robot ordering --------

def parallel_classes(omega: IntegrationOperator, dims: Iterable[Dimension]) -> dict[Dimension, frozenset]:
    """Map each dimension to its equivalence class under ``||``."""
    parent = {d: d for d in dims}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in omega.parallels:
        if p.a in parent and p.b in parent:
            ra, rb = find(p.a), find(p.b)
            if ra != rb:
                parent[max(ra, rb, key=lambda d: d.order)] = min(ra, rb, key=lambda d: d.order)
    groups: dict[Dimension, set] = {}
    for d in parent:
        groups.setdefault(find(d), set()).add(d)
    return {d: frozenset(groups[find(d)]) for d in parent}


def precedence_closure(omega: IntegrationOperator) -> set[tuple[Dimension, Dimension]]:
    """Transitive closure of the ``>`` directives as a set of (higher, lower)."""
    rel = {(p.higher, p.lower) for p in omega.precedences}
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, e in list(rel):
                if b == c and (a, e) not in rel:
                    rel.add((a, e))
                    changed = True
    return rel


def maximal_dimensions(omega: IntegrationOperator, dims: Iterable[Dimension]) -> set[Dimension]:
    """Dimensions that no other dimension outranks under precedence."""
    dims = set(dims)
    dominated = {lo for hi, lo in precedence_closure(omega) if hi in dims}
    return dims - dominated


def precedence_levels(omega: IntegrationOperator, dims: Iterable[Dimension]) -> dict[Dimension, int]:
    """Longest-path depth of each dimension in the precedence DAG.

    Parallel dimensions share a level. ``X > Y`` implies level(X) < level(Y).
    """
    dims = list(dims)
    classes = parallel_classes(omega, dims)
    level = {d: 0 for d in dims}
    edges = [(p.higher, p.lower) for p in omega.precedences if p.higher in level and p.lower in level]
    for _ in range(len(dims) + 1):
        changed = False
        for hi, lo in edges:
            if level[lo] < level[hi] + 1:
                level[lo] = level[hi] + 1
                changed = True
        for d in dims:
            top = max(level[m] for m in classes[d])
            if level[d] != top:
                level[d] = top
                changed = True
        if not changed:
            break
    return level
