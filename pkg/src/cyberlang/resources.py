"""Access to bundled data files (dialects, schemas, examples)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import fastjsonschema


def data_path(name: str) -> Path:
    return Path(str(resources.files("cyberlang") / "data" / name))


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(data_path(f"schemas/{name}.schema.json").read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def validator(name: str) -> Callable:
    """Compiled validator for a bundled schema; raises ``JsonSchemaValueException``."""
    return fastjsonschema.compile(load_schema(name))


def schema_errors(name: str, instance) -> list[str]:
    """The first schema violation as ``path: message``; empty when valid."""
    try:
        validator(name)(instance)
    except fastjsonschema.JsonSchemaValueException as exc:
        path = "/".join(map(str, exc.path[1:])) if exc.path else ""
        return [f"{path or '<root>'}: {exc.message}"]
    return []
