"""The semantic bus: evaluate once, compile per recipient type, deliver projections."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..canonical import canonical_json, sha256_hex
from ..compiler.dialect import Dialect, validate_against_dialect
from ..compiler.targets import CompiledForm, TargetProfile, compile_statement
from ..core.dimensions import DIMENSIONS
from ..core.signs import Cybersign, SignRegistry
from ..core.values import Identifier, canonical_print_value
from ..errors import (
    AmbiguityError,
    DialectViolation,
    EmptyCompilation,
    NoApplicableTemplate,
    UnknownPublisher,
)
from ..fdsg.ast import Cyberstatement
from ..fdsg.printer import print_canonical
from ..ids import IdGenerator
from ..negotiation.learning import InterpretationLedger, prior_boost, record_outcome
from ..negotiation.messages import message_code, message_from_dict, message_to_dict
from ..negotiation.policies import HonestResponder, ResolverPolicy
from ..negotiation.session import DEFAULT_MAX_ROUNDS, NegotiationSession, SessionState, open_session, run_session
from ..semantics.context import ContextSnapshot
from ..semantics.mappings import MappingRegistry
from ..semantics.meaning import ResolvedMeaning, evaluate_meaning
from .agents import AgentProfile, SimAgent, make_agent
from .corpus import CorpusRecord
from .frame import MsgType, decode_frame, encode_frame

log = logging.getLogger("cyberlang.bus")

RESOLVER_ID = "resolver"


@dataclass(frozen=True)
class Delivery:
    agent_id: str
    target: TargetProfile
    status: str  # delivered | skipped | withheld
    digest: Optional[str] = None
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"target": self.target.value, "status": self.status, "digest": self.digest}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class DeliveryReport:
    statement_id: str
    status: str  # resolved | negotiated | ambiguous
    deliveries: list[Delivery] = field(default_factory=list)
    meaning: Optional[ResolvedMeaning] = None
    sessions: list[NegotiationSession] = field(default_factory=list)
    record: Optional[CorpusRecord] = None

    @property
    def delivered(self) -> list[str]:
        return [d.agent_id for d in self.deliveries if d.status == "delivered"]

    @property
    def all_delivered(self) -> bool:
        return bool(self.deliveries) and all(d.status == "delivered" for d in self.deliveries)

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "status": self.status,
            "meaning_digest": self.meaning.digest if self.meaning else None,
            "deliveries": {d.agent_id: d.to_dict() for d in self.deliveries},
            "negotiation": [s.state.value for s in self.sessions],
        }


def payload_digest(form: CompiledForm) -> str:
    return sha256_hex(form.render())


def _loopback(msg):
    """Carry a negotiation message through a wire frame and back."""
    frame = decode_frame(encode_frame(message_code(msg), canonical_json(message_to_dict(msg))))
    return message_from_dict(json.loads(frame.payload))


def _over_wire(form: CompiledForm) -> CompiledForm:
    """What the recipient decodes from the delivery frame."""
    text = decode_frame(encode_frame(MsgType.DELIVERY, form.render())).payload
    payload = text if form.target is TargetProfile.HUMAN_NL else json.loads(text)
    return CompiledForm(form.target, payload, form.source_statement_id)


def _session_record(s: NegotiationSession) -> dict:
    return {
        "session_id": s.session_id,
        "participants": list(s.participants),
        "lambda": s.lam,
        "state": s.state.value,
        "rounds": s.round,
        "agreed": s.agreed,
        "transcript": [message_to_dict(m) for m in s.transcript],
    }


class Broker:
    """Single-dialect broker owning the authoritative context.

    Publishes are processed one at a time; callers that accept concurrent
    connections must serialise calls to :meth:`publish`.
    """

    def __init__(self, signs: SignRegistry, mappings: MappingRegistry, dialect: Dialect, *,
                 context: Optional[ContextSnapshot] = None, ids: Optional[Callable[[], str]] = None,
                 ledger: Optional[InterpretationLedger] = None, max_rounds: int = DEFAULT_MAX_ROUNDS,
                 resolver_id: str = RESOLVER_ID):
        self.signs = signs
        self.mappings = mappings
        self.dialect = dialect
        self.context = context or ContextSnapshot()
        self.ids = ids or IdGenerator(0)
        self.ledger = ledger if ledger is not None else InterpretationLedger()
        self.max_rounds = max_rounds
        self.resolver_id = resolver_id
        self.agents: dict[str, SimAgent] = {}
        self.corpus: list[CorpusRecord] = []

    # -- membership and context --
    def register(self, profile: AgentProfile) -> SimAgent:
        if profile.agent_id in self.agents or profile.agent_id == self.resolver_id:
            raise ValueError(f"agent id {profile.agent_id!r} is already taken")
        if profile.dialect is not None and profile.dialect != self.dialect.name:
            raise ValueError(f"agent {profile.agent_id!r} speaks {profile.dialect!r}, broker speaks {self.dialect.name!r}")
        agent = make_agent(profile)
        self.agents[profile.agent_id] = agent
        log.info("registered %s (%s)", profile.agent_id, profile.kind.value)
        return agent

    def update_context(self, snapshot: ContextSnapshot) -> None:
        self.context = snapshot

    def add_sense(self, sign: Cybersign) -> None:
        self.signs.register(sign)

    # -- the publish cycle --
    def _priors(self, stmt: Cyberstatement) -> dict:
        out = {}
        for _, _, v in stmt.iter_slots():
            if isinstance(v, Identifier) and v.text not in out:
                senses = self.signs.lookup(v.text)
                if len(senses) > 1:
                    out[v.text] = prior_boost(self.ledger, self.context, v.text, senses)
        return out

    def _negotiate(self, stmt, amb: AmbiguityError, publisher: str, bindings: dict, priors: dict):
        ctx = self.context

        def interpret(sign: Cybersign) -> str:
            return evaluate_meaning(stmt, ctx, self.signs, self.mappings, bindings={**bindings, amb.lam: sign},
                                    priors=priors, strict=False).digest

        digests = [interpret(c) for c in amb.candidates]
        session = open_session(amb, self.resolver_id, publisher, digests, max_rounds=self.max_rounds, ids=self.ids)
        policies = {
            self.resolver_id: ResolverPolicy(self.resolver_id, amb.candidates, interpret),
            publisher: HonestResponder(publisher, self.agents[publisher].profile.intents, amb.candidates, interpret),
        }
        session = run_session(session, policies, transport=_loopback)
        chosen = None
        if session.state is SessionState.CONVERGED:
            chosen = next(c for c, d in zip(amb.candidates, digests) if d == session.agreed)
        log.info("negotiation %s on %r ended %s after %d round(s)",
                 session.session_id, amb.lam, session.state.value, session.round)
        return session, chosen

    def publish(self, publisher: str, stmt: Cyberstatement, tick: int = 0) -> DeliveryReport:
        if publisher not in self.agents:
            raise UnknownPublisher(publisher)
        violations = validate_against_dialect(stmt, self.dialect)
        if violations:
            raise DialectViolation(violations)
        ctx = self.context
        priors = self._priors(stmt)
        bindings: dict[str, Cybersign] = {}
        sessions: list[NegotiationSession] = []
        meaning, ambiguity = None, None
        # each pass either resolves the statement or settles one more lambda
        while True:
            try:
                meaning = evaluate_meaning(stmt, ctx, self.signs, self.mappings, bindings=bindings, priors=priors)
                break
            except AmbiguityError as amb:
                session, chosen = self._negotiate(stmt, amb, publisher, bindings, priors)
                sessions.append(session)
                if chosen is None:
                    ambiguity = amb
                    break
                bindings[amb.lam] = chosen
                record_outcome(self.ledger, ctx, amb.lam, chosen)

        status = "ambiguous" if meaning is None else ("negotiated" if sessions else "resolved")
        report = DeliveryReport(stmt.statement_id, status, meaning=meaning, sessions=sessions)
        compiled: dict[TargetProfile, object] = {}
        for agent_id, agent in self.agents.items():
            if agent_id == publisher:
                continue
            target = agent.profile.target
            if meaning is None:
                report.deliveries.append(Delivery(agent_id, target, "withheld", reason="unresolved ambiguity"))
                continue
            if target not in compiled:
                try:
                    compiled[target] = compile_statement(stmt, target, self.dialect)
                except (EmptyCompilation, NoApplicableTemplate) as exc:
                    compiled[target] = exc
            form = compiled[target]
            if isinstance(form, Exception):
                report.deliveries.append(Delivery(agent_id, target, "skipped", reason=str(form)))
                continue
            agent.receive(_over_wire(form))
            report.deliveries.append(Delivery(agent_id, target, "delivered", payload_digest(form)))

        report.record = self._record(tick, publisher, stmt, ctx, meaning, ambiguity, sessions, report.deliveries)
        self.corpus.append(report.record)
        log.info("tick %d: %s from %s -> %s, %d delivered", tick, stmt.statement_id, publisher,
                 status, len(report.delivered))
        return report

    def _record(self, tick, publisher, stmt, ctx, meaning, ambiguity, sessions, deliveries) -> CorpusRecord:
        components = {
            d.value: {k: canonical_print_value(v) for k, v in (stmt.blocks[d].slots.items() if d in stmt.blocks else ())}
            for d in DIMENSIONS
        }
        if meaning is not None:
            resolution = {
                "status": "negotiated" if sessions else "resolved",
                "meaning_digest": meaning.digest,
                "conflicts": [c.to_dict() for c in meaning.conflicts],
                "sign_bindings": {lam: s.digest for lam, s in sorted(meaning.sign_bindings.items())},
                "ambiguity": None,
            }
        else:
            resolution = {
                "status": "ambiguous",
                "meaning_digest": None,
                "conflicts": [],
                "sign_bindings": {},
                "ambiguity": {
                    "dimension": ambiguity.dimension.value,
                    "key": ambiguity.key,
                    "lambda": ambiguity.lam,
                    "candidates": [c.digest for c in ambiguity.candidates],
                },
            }
        return CorpusRecord(
            tick=tick,
            statement_id=stmt.statement_id,
            publisher=publisher,
            statement=print_canonical(stmt),
            components=components,
            context=ctx.to_dict(),
            resolution=resolution,
            negotiation=[_session_record(s) for s in sessions] or None,
            deliveries={d.agent_id: d.to_dict() for d in deliveries},
        )
