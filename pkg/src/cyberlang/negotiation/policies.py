"""Bundled participant policies."""

from __future__ import annotations

from typing import Callable, Mapping, Optional, Sequence

from ..core.dimensions import DIMENSIONS
from ..core.signs import Cybersign
from ..core.values import Reference
from .messages import (
    Accept,
    ExplicitationRequest,
    ExplicitationResponse,
    MetaMarker,
    Proposal,
    Reject,
)
from .session import NegotiationSession

Interpreter = Callable[[Cybersign], str]


def _sense_for(candidates: Sequence[Cybersign], ref) -> Optional[Cybersign]:
    for c in candidates:
        if any(c.signified(d) == ref for d in DIMENSIONS):
            return c
    return None


class _Base:
    def __init__(self, agent_id: str, candidates: Sequence[Cybersign] = (), interpret: Optional[Interpreter] = None):
        self.agent_id = agent_id
        self.candidates = list(candidates)
        self.interpret = interpret or (lambda sign: sign.digest)

    def _reject(self, session: NegotiationSession, reason: str, counter: Optional[str] = None) -> Reject:
        pending = session.pending[0] if session.pending else ""
        return Reject(session.session_id, pending, reason, counter, sender=self.agent_id, round=session.round)

    def _accept(self, session: NegotiationSession) -> Accept:
        return Accept(session.session_id, session.pending[0], sender=self.agent_id, round=session.round)

    def _propose(self, session: NegotiationSession, sign: Cybersign) -> Proposal:
        return Proposal(session.session_id, self.interpret(sign), sender=self.agent_id, round=session.round)


class ResolverPolicy(_Base):
    """The confused party: asks for the missing dimension, proposes the matching sense,
    and accepts any counter-proposal naming one of the candidate interpretations."""

    def start(self, session):
        return ExplicitationRequest(session.subject_statement_id, session.dimension, session.key,
                                    sender=self.agent_id, round=session.round)

    def _known(self, digest: str) -> bool:
        return any(self.interpret(c) == digest for c in self.candidates)

    def respond(self, session, incoming):
        if isinstance(incoming, ExplicitationResponse):
            sense = _sense_for(self.candidates, incoming.value)
            return self._propose(session, sense) if sense else self._reject(session, "explicated value fits no sense")
        if isinstance(incoming, MetaMarker):
            sense = next((c for c in self.candidates
                          if c.signified(incoming.dimension) in set(incoming.overrides.values())), None)
            return self._propose(session, sense) if sense else self._reject(session, "marker fits no sense")
        if isinstance(incoming, Proposal):
            return self._accept(session) if self._known(incoming.interpretation_digest) \
                else self._reject(session, "unknown interpretation")
        if isinstance(incoming, Reject) and incoming.counter_digest is not None:
            return self._accept(session) if self._known(incoming.counter_digest) \
                else self._reject(session, "unknown interpretation")
        return None


class HonestResponder(_Base):
    """The speaker: answers explicitation truthfully from its intended senses.

    ``intents`` maps a lambda to the reference the speaker meant by it.
    """

    def __init__(self, agent_id: str, intents: Mapping[str, Reference | str],
                 candidates: Sequence[Cybersign] = (), interpret: Optional[Interpreter] = None):
        super().__init__(agent_id, candidates, interpret)
        self.intents = {k: v if isinstance(v, Reference) else Reference(v) for k, v in intents.items()}

    def intended(self, session: NegotiationSession) -> Optional[Cybersign]:
        ref = self.intents.get(session.lam)
        return _sense_for(self.candidates, ref) if ref is not None else None

    def start(self, session):
        sense = self.intended(session)
        return self._propose(session, sense) if sense else self._reject(session, "no intended sense")

    def respond(self, session, incoming):
        sense = self.intended(session)
        if isinstance(incoming, ExplicitationRequest):
            ref = self.intents.get(session.lam)
            if ref is None:
                return self._reject(session, "no intended sense")
            return ExplicitationResponse(session.subject_statement_id, incoming.dimension, incoming.key, ref,
                                         sender=self.agent_id, round=session.round)
        if sense is None:
            return self._reject(session, "no intended sense")
        mine = self.interpret(sense)
        if isinstance(incoming, Proposal):
            if incoming.interpretation_digest == mine:
                return self._accept(session)
            return self._reject(session, "not what I meant", counter=mine)
        if isinstance(incoming, Reject) and incoming.counter_digest is not None:
            return self._accept(session) if incoming.counter_digest == mine \
                else self._reject(session, "not what I meant")
        if isinstance(incoming, (ExplicitationResponse, MetaMarker)):
            return self._propose(session, sense)
        return None


class AlwaysReject(_Base):
    """Refuses everything without counter-proposing (exercises the failure path)."""

    def start(self, session):
        return self._reject(session, "refused")

    def respond(self, session, incoming):
        return self._reject(session, "refused")
