"""Meaning negotiation: messages, sessions, policies, markers and learned priors."""

from .learning import InterpretationLedger, LedgerRecord, context_signature, prior_boost, record_outcome
from .markers import apply_meta_marker
from .messages import (
    MESSAGE_CODES,
    MESSAGE_TYPES,
    Accept,
    AmbiguityReport,
    ExplicitationRequest,
    ExplicitationResponse,
    MetaMarker,
    NegotiationMessage,
    Proposal,
    Reject,
    message_code,
    message_from_dict,
    message_to_dict,
)
from .policies import AlwaysReject, HonestResponder, ResolverPolicy
from .session import (
    DEFAULT_MAX_ROUNDS,
    NegotiationSession,
    Policy,
    SessionState,
    first_proposal,
    open_session,
    replay,
    run_session,
    step,
    transition,
)

__all__ = [
    "InterpretationLedger", "LedgerRecord", "context_signature", "prior_boost", "record_outcome",
    "apply_meta_marker",
    "MESSAGE_CODES", "MESSAGE_TYPES", "Accept", "AmbiguityReport", "ExplicitationRequest",
    "ExplicitationResponse", "MetaMarker", "NegotiationMessage", "Proposal", "Reject",
    "message_code", "message_from_dict", "message_to_dict",
    "AlwaysReject", "HonestResponder", "ResolverPolicy",
    "DEFAULT_MAX_ROUNDS", "NegotiationSession", "Policy", "SessionState", "first_proposal",
    "open_session", "replay", "run_session", "step", "transition",
]
