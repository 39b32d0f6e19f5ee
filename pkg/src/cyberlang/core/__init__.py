"""Layer 2: dimensions, typed values, Cybersigns and the sign repository."""

from .dimensions import DIMENSIONS, NON_CYBER, Dimension
from .signs import (
    Cybersign,
    DimensionalDyad,
    SignRegistry,
    lookup_signs,
    make_sign,
    register_sign,
    sign_digest,
)
from .values import (
    UNIT_CODES,
    Identifier,
    Number,
    Probability,
    Quantity,
    Reference,
    SemanticValue,
    Text,
    canonical_print_value,
    parse_value,
    type_name,
    value_from_json,
    value_to_json,
)

__all__ = [
    "DIMENSIONS", "NON_CYBER", "Dimension",
    "Cybersign", "DimensionalDyad", "SignRegistry", "lookup_signs", "make_sign",
    "register_sign", "sign_digest",
    "UNIT_CODES", "Identifier", "Number", "Probability", "Quantity", "Reference",
    "SemanticValue", "Text", "canonical_print_value", "parse_value", "type_name",
    "value_from_json", "value_to_json",
]
