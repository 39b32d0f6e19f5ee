"""Layer 5: dialects and multi-target compilation."""

from .dialect import (
    BUNDLED_DIALECT,
    Dialect,
    RobotRule,
    SlotType,
    Template,
    Violation,
    bundled_dialect,
    validate_against_dialect,
)
from .targets import (
    MACHINE_JSON_FORMAT,
    TS_PLACEHOLDER,
    CompiledForm,
    TargetProfile,
    compile,
    compile_statement,
    decompile_machine_json,
    to_machine_json,
)

decompile = decompile_machine_json

__all__ = [
    "BUNDLED_DIALECT", "Dialect", "RobotRule", "SlotType", "Template", "Violation",
    "bundled_dialect", "validate_against_dialect",
    "MACHINE_JSON_FORMAT", "TS_PLACEHOLDER", "CompiledForm", "TargetProfile",
    "compile", "compile_statement", "decompile", "decompile_machine_json", "to_machine_json",
]
