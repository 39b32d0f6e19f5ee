"""Layer 4: context, mapping tables, weights and meaning evaluation."""

from .context import ContextSnapshot, context_from_slots
from .mappings import (
    FusionReport,
    MappingKind,
    MappingRegistry,
    MappingTable,
    Verdict,
    check_fusion,
    map_derived,
    map_forward,
    map_inverse,
)
from .meaning import (
    CONTEXT,
    EXPRESSION,
    Conflict,
    IntegrationStrategy,
    OverlayStrategy,
    ResolvedMeaning,
    Slot,
    Tie,
    disambiguate,
    evaluate_meaning,
)
from .weights import DimensionWeights, derive_weights

__all__ = [
    "ContextSnapshot", "context_from_slots",
    "FusionReport", "MappingKind", "MappingRegistry", "MappingTable", "Verdict",
    "check_fusion", "map_derived", "map_forward", "map_inverse",
    "CONTEXT", "EXPRESSION", "Conflict", "IntegrationStrategy", "OverlayStrategy",
    "ResolvedMeaning", "Slot", "Tie", "disambiguate", "evaluate_meaning",
    "DimensionWeights", "derive_weights",
]
