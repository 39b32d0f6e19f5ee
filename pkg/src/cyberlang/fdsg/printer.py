from __future__ import annotations

from ..core.values import canonical_print_value, format_decimal
from .ast import Blend, ComponentBlock, Cyberstatement, IntegrationDirective, Parallel, Precedence


def print_block(block: ComponentBlock) -> str:
    pairs = ", ".join(f"{k}={canonical_print_value(v)}" for k, v in block.slots.items())
    return f"[{block.dimension.value}: {pairs}]"


def print_directive(d: IntegrationDirective) -> str:
    if isinstance(d, Precedence):
        return f"{d.higher.value}>{d.lower.value}"
    if isinstance(d, Parallel):
        return f"{d.a.value}||{d.b.value}"
    if isinstance(d, Blend):
        return ", ".join(f"{dim.value}~{format_decimal(w)}" for dim, w in d.entries)
    raise TypeError(f"not a directive: {d!r}")


def print_canonical(stmt: Cyberstatement) -> str:
    """Blocks in P, S, T, C order, then the ``+O`` block; ASCII operators only."""
    parts = [print_block(b) for b in stmt.blocks.values()]
    if stmt.omega:
        parts.append("[+O: " + ", ".join(print_directive(d) for d in stmt.omega) + "]")
    return " ".join(parts)
