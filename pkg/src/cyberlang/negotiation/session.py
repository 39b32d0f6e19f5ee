"""Meaning Negotiation Protocol: a bounded two-party state machine.

::

    Open ──ExplicitationRequest──▶ Explicating ──Response/MetaMarker──▶ Proposing
    Open ──MetaMarker──▶ Proposing
    Open | Proposing(no pending) ──Proposal──▶ Proposing (round+1)
    Proposing ──Accept(matching digest, counterparty)──▶ Converged
    Proposing ──Reject+counter──▶ Proposing (round+1)   or Failed at max_rounds
    any live state ──Reject without counter──▶ Failed

Every Proposal or counter-proposal advances ``round`` and no transition
returns to an earlier state, so each session ends within ``max_rounds``
proposals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping, Optional, Protocol

from ..errors import AmbiguityError, DigestMismatch, ProtocolViolation
from ..ids import new_uuid
from .messages import (
    Accept,
    AmbiguityReport,
    ExplicitationRequest,
    ExplicitationResponse,
    MetaMarker,
    NegotiationMessage,
    Proposal,
    Reject,
)

DEFAULT_MAX_ROUNDS = 8


class SessionState(str, Enum):
    OPEN = "Open"
    EXPLICATING = "Explicating"
    PROPOSING = "Proposing"
    CONVERGED = "Converged"
    FAILED = "Failed"

    @property
    def terminal(self) -> bool:
        return self in (SessionState.CONVERGED, SessionState.FAILED)


@dataclass(frozen=True)
class NegotiationSession:
    session_id: str
    participants: tuple[str, str]
    subject_statement_id: str
    dimension: object
    key: str
    lam: str
    candidate_digests: tuple[str, ...]
    state: SessionState = SessionState.OPEN
    round: int = 0
    max_rounds: int = DEFAULT_MAX_ROUNDS
    transcript: tuple = ()
    pending: Optional[tuple[str, str]] = None  # (digest, proposer)
    agreed: Optional[str] = None

    @property
    def initiator(self) -> str:
        return self.participants[0]

    @property
    def counterparty(self) -> str:
        return self.participants[1]

    def other(self, agent: str) -> str:
        a, b = self.participants
        return b if agent == a else a

    @property
    def terminal(self) -> bool:
        return self.state.terminal


def open_session(ambiguity: AmbiguityError, initiator: str, counterparty: str,
                 candidate_digests=None, *, max_rounds: int = DEFAULT_MAX_ROUNDS,
                 ids: Optional[Callable[[], str]] = None) -> NegotiationSession:
    """Start a session from a disambiguation tie.

    ``candidate_digests`` defaults to the tied senses' own digests; callers
    that negotiate over whole interpretations pass those digests instead.
    """
    if len(ambiguity.candidates) < 2:
        raise ValueError("an ambiguity needs at least two candidate senses")
    if initiator == counterparty:
        raise ValueError("a negotiation needs two distinct participants")
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    digests = tuple(candidate_digests) if candidate_digests is not None else tuple(
        c.digest for c in ambiguity.candidates)
    report = AmbiguityReport(ambiguity.statement_id, ambiguity.dimension, ambiguity.key, digests,
                             sender=initiator, round=0)
    return NegotiationSession(
        session_id=(ids or new_uuid)(),
        participants=(initiator, counterparty),
        subject_statement_id=ambiguity.statement_id,
        dimension=ambiguity.dimension,
        key=ambiguity.key,
        lam=ambiguity.lam,
        candidate_digests=digests,
        max_rounds=max_rounds,
        transcript=(report,),
    )


class Policy(Protocol):
    """Local decision procedure of one participant."""

    def start(self, session: NegotiationSession) -> Optional[NegotiationMessage]:
        ...

    def respond(self, session: NegotiationSession, incoming: NegotiationMessage) -> Optional[NegotiationMessage]:
        ...


def _check_ids(session: NegotiationSession, msg: NegotiationMessage):
    if isinstance(msg, (Proposal, Accept, Reject)):
        if msg.session_id != session.session_id:
            raise ProtocolViolation(f"message for session {msg.session_id}, not {session.session_id}")
    else:
        sid = msg.target_statement_id if isinstance(msg, MetaMarker) else msg.statement_id
        if sid != session.subject_statement_id:
            raise ProtocolViolation(f"message about statement {sid}, not {session.subject_statement_id}")


def transition(session: NegotiationSession, msg: NegotiationMessage) -> NegotiationSession:
    """Apply one incoming message; raises without changing anything if it is illegal."""
    if session.terminal:
        raise ProtocolViolation(f"session {session.session_id} is already {session.state.value}")
    if msg.sender not in session.participants:
        raise ProtocolViolation(f"{msg.sender!r} is not a participant")
    _check_ids(session, msg)
    st = session.state
    S = SessionState
    log = session.transcript + (msg,)

    if isinstance(msg, AmbiguityReport):
        raise ProtocolViolation("an ambiguity report only opens a session")
    if isinstance(msg, ExplicitationRequest):
        if st is not S.OPEN:
            raise ProtocolViolation(f"ExplicitationRequest is illegal in {st.value}")
        return replace(session, state=S.EXPLICATING, transcript=log)
    if isinstance(msg, ExplicitationResponse):
        if st is not S.EXPLICATING:
            raise ProtocolViolation(f"ExplicitationResponse is illegal in {st.value}")
        return replace(session, state=S.PROPOSING, transcript=log)
    if isinstance(msg, MetaMarker):
        if st not in (S.OPEN, S.EXPLICATING):
            raise ProtocolViolation(f"MetaMarker is illegal in {st.value}")
        return replace(session, state=S.PROPOSING, transcript=log)
    if isinstance(msg, Proposal):
        if st not in (S.OPEN, S.PROPOSING) or session.pending is not None:
            raise ProtocolViolation(f"Proposal is illegal in {st.value}"
                                    + (" with a proposal pending" if session.pending else ""))
        return replace(session, state=S.PROPOSING, round=session.round + 1,
                       pending=(msg.interpretation_digest, msg.sender), transcript=log)
    if isinstance(msg, Accept):
        if st is not S.PROPOSING or session.pending is None:
            raise ProtocolViolation(f"Accept is illegal in {st.value} without a pending proposal")
        digest, proposer = session.pending
        if msg.sender == proposer:
            raise ProtocolViolation("a proposer cannot accept its own proposal")
        if msg.interpretation_digest != digest:
            raise DigestMismatch(f"Accept names {msg.interpretation_digest[:12]}, pending is {digest[:12]}")
        return replace(session, state=S.CONVERGED, agreed=digest, transcript=log)
    if isinstance(msg, Reject):
        if session.pending is not None and msg.interpretation_digest != session.pending[0]:
            raise DigestMismatch(f"Reject names {msg.interpretation_digest[:12]}, pending is {session.pending[0][:12]}")
        if msg.counter_digest is None:
            return replace(session, state=S.FAILED, pending=None, transcript=log)
        if st is not S.PROPOSING or session.pending is None:
            raise ProtocolViolation("a counter-proposal needs a pending proposal to reject")
        if msg.sender == session.pending[1]:
            raise ProtocolViolation("a proposer cannot counter its own proposal")
        if session.round >= session.max_rounds:
            return replace(session, state=S.FAILED, pending=None, transcript=log)
        return replace(session, round=session.round + 1,
                       pending=(msg.counter_digest, msg.sender), transcript=log)
    raise ProtocolViolation(f"unknown message {type(msg).__name__}")


def step(session: NegotiationSession, incoming: NegotiationMessage,
         policy: Optional[Policy] = None) -> tuple[NegotiationSession, Optional[NegotiationMessage]]:
    """Advance ``session`` with ``incoming``; ``policy`` (the receiver's) drafts the reply."""
    new = transition(session, incoming)
    if policy is None or new.terminal:
        return new, None
    return new, policy.respond(new, incoming)


def replay(session: NegotiationSession) -> NegotiationSession:
    """Rebuild a session's state by re-applying its transcript from the opening report."""
    s = replace(session, state=SessionState.OPEN, round=0, pending=None, agreed=None,
                transcript=session.transcript[:1])
    for msg in session.transcript[1:]:
        s = transition(s, msg)
    return s


def first_proposal(proposals: list[Proposal]) -> Proposal:
    """Simultaneous proposals are serialised by sender id; the smallest goes first."""
    return min(proposals, key=lambda p: p.sender)


def run_session(session: NegotiationSession, policies: Mapping[str, Policy],
                first: Optional[str] = None,
                transport: Optional[Callable[[NegotiationMessage], NegotiationMessage]] = None) -> NegotiationSession:
    """Drive a session to a terminal state with one policy per participant.

    ``transport`` carries each message between the parties (for example
    through wire frames); the default hands it over directly.
    """
    sender = first or session.initiator
    msg = policies[sender].start(session)
    limit = 4 * session.max_rounds + 8
    while msg is not None and not session.terminal:
        if transport is not None:
            msg = transport(msg)
        receiver = session.other(msg.sender)
        session, msg = step(session, msg, policies[receiver])
        limit -= 1
        if limit < 0:
            raise ProtocolViolation("negotiation did not terminate")
    if not session.terminal:
        session = transition(session, Reject(session.session_id,
                                             session.pending[0] if session.pending else "",
                                             reason="no reply", sender=session.initiator,
                                             round=session.round))
    return session
