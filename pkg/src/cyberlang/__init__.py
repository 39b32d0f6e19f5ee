"""Cyberlanguage toolkit.

Four-dimensional statements (physical, social, thinking, cyber) are parsed,
evaluated against a context, compiled per recipient type and carried over a
semantic bus. The most used names are re-exported here; each subpackage holds
the rest.
"""

__version__ = "0.1.0"

from .canonical import canonical_json, pretty_json
from .compiler import Dialect, TargetProfile, bundled_dialect, compile_statement, decompile_machine_json
from .core import Cybersign, Dimension, SignRegistry, make_sign
from .errors import AmbiguityError, CyberlangError, ParseError
from .fdsg import Cyberstatement, analyze, parse, print_canonical
from .ids import IdGenerator
from .semantics import (
    ContextSnapshot,
    MappingRegistry,
    ResolvedMeaning,
    check_fusion,
    derive_weights,
    evaluate_meaning,
)

__all__ = [
    "__version__",
    "canonical_json", "pretty_json",
    "Dialect", "TargetProfile", "bundled_dialect", "compile_statement", "decompile_machine_json",
    "Cybersign", "Dimension", "SignRegistry", "make_sign",
    "AmbiguityError", "CyberlangError", "ParseError",
    "Cyberstatement", "analyze", "parse", "print_canonical",
    "IdGenerator",
    "ContextSnapshot", "MappingRegistry", "ResolvedMeaning", "check_fusion",
    "derive_weights", "evaluate_meaning",
]
