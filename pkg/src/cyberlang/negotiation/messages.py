"""The seven negotiation message kinds and their JSON payload form."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Mapping, Optional, Union

from ..core.dimensions import Dimension
from ..core.values import SemanticValue, value_from_json, value_to_json
from ..errors import ProtocolViolation


@dataclass(frozen=True)
class AmbiguityReport:
    statement_id: str
    dimension: Dimension
    key: str
    candidate_digests: tuple[str, ...]
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class ExplicitationRequest:
    statement_id: str
    dimension: Dimension
    key: str
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class ExplicitationResponse:
    statement_id: str
    dimension: Dimension
    key: str
    value: SemanticValue
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class MetaMarker:
    """'Read dimension D of my statement with these slot values instead.'"""

    target_statement_id: str
    dimension: Dimension
    overrides: Mapping[str, SemanticValue] = field(default_factory=dict)
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class Proposal:
    session_id: str
    interpretation_digest: str
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class Accept:
    session_id: str
    interpretation_digest: str
    sender: str = ""
    round: int = 0


@dataclass(frozen=True)
class Reject:
    """Refusal of the pending proposal; ``counter_digest`` turns it into a counter-proposal."""

    session_id: str
    interpretation_digest: str
    reason: str = ""
    counter_digest: Optional[str] = None
    sender: str = ""
    round: int = 0


NegotiationMessage = Union[
    AmbiguityReport, ExplicitationRequest, ExplicitationResponse, MetaMarker, Proposal, Accept, Reject
]

# wire codes follow the declaration order above
MESSAGE_CODES: dict[type, int] = {
    AmbiguityReport: 0x10,
    ExplicitationRequest: 0x11,
    ExplicitationResponse: 0x12,
    MetaMarker: 0x13,
    Proposal: 0x14,
    Accept: 0x15,
    Reject: 0x16,
}
MESSAGE_TYPES: dict[int, type] = {v: k for k, v in MESSAGE_CODES.items()}
KINDS: dict[str, type] = {cls.__name__: cls for cls in MESSAGE_CODES}


def message_code(msg: NegotiationMessage) -> int:
    return MESSAGE_CODES[type(msg)]


def message_to_dict(msg: NegotiationMessage) -> dict:
    out: dict = {"kind": type(msg).__name__}
    for f in fields(msg):
        v = getattr(msg, f.name)
        if isinstance(v, Dimension):
            v = v.value
        elif f.name == "value":
            v = value_to_json(v)
        elif f.name == "overrides":
            v = {k: value_to_json(x) for k, x in v.items()}
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def message_from_dict(data: Mapping) -> NegotiationMessage:
    try:
        cls = KINDS[data["kind"]]
        kwargs = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            v = data[f.name]
            if f.name == "dimension":
                v = Dimension(v)
            elif f.name == "value":
                v = value_from_json(v)
            elif f.name == "overrides":
                v = {k: value_from_json(x) for k, x in v.items()}
            elif f.name == "candidate_digests":
                v = tuple(v)
            kwargs[f.name] = v
        return cls(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolViolation(f"malformed negotiation message: {exc}") from None
