"""Exhaustive exploration of the negotiation state machine.

Every message kind from either participant, with every digest variant, is
offered in every reachable state. Illegal messages must be refused with a
protocol error; legal ones are followed depth-first until no message is legal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cyberlang.core import Dimension, Identifier
from cyberlang.errors import AmbiguityError, ProtocolViolation
from cyberlang.negotiation import (
    Accept,
    AmbiguityReport,
    ExplicitationRequest,
    ExplicitationResponse,
    MetaMarker,
    Proposal,
    Reject,
    SessionState,
    open_session,
    transition,
)

DIGESTS = ("d" * 64, "e" * 64)


class _Sense:
    def __init__(self, digest):
        self.digest = digest


def fresh_session(max_rounds=8):
    amb = AmbiguityError("stmt-1", Dimension.P, "hazard", "danger", [_Sense(d) for d in DIGESTS])
    return open_session(amb, "A", "B", max_rounds=max_rounds, ids=lambda: "sess-1")


def alphabet(session):
    sid, stmt = session.session_id, session.subject_statement_id
    dim, key = session.dimension, session.key
    for who in session.participants:
        yield AmbiguityReport(stmt, dim, key, DIGESTS, sender=who)
        yield ExplicitationRequest(stmt, dim, key, sender=who)
        yield ExplicitationResponse(stmt, dim, key, Identifier("obstacle"), sender=who)
        yield MetaMarker(stmt, dim, {key: Identifier("obstacle")}, sender=who)
        for d in DIGESTS:
            yield Proposal(sid, d, sender=who)
            yield Accept(sid, d, sender=who)
            for counter in (None,) + DIGESTS:
                yield Reject(sid, d, "", counter, sender=who)


@dataclass
class Report:
    paths: int = 0
    states_visited: int = 0
    terminal: dict = field(default_factory=dict)
    problems: list = field(default_factory=list)
    max_depth: int = 0


def _check_invariants(s, report):
    if s.round > s.max_rounds:
        report.problems.append(("round beyond max", s))
    if s.state is SessionState.FAILED:
        last = s.transcript[-1]
        if not (s.round == s.max_rounds or (isinstance(last, Reject) and last.counter_digest is None)):
            report.problems.append(("failed without cause", s))
    if s.state is SessionState.CONVERGED:
        last = s.transcript[-1]
        proposer_msg = next(m for m in reversed(s.transcript[:-1])
                            if isinstance(m, Proposal) or (isinstance(m, Reject) and m.counter_digest))
        proposed = proposer_msg.interpretation_digest if isinstance(proposer_msg, Proposal) \
            else proposer_msg.counter_digest
        if not (isinstance(last, Accept) and last.interpretation_digest == proposed == s.agreed
                and last.sender != proposer_msg.sender):
            report.problems.append(("bad convergence", s))


def explore(max_rounds=8) -> Report:
    report = Report()
    start = fresh_session(max_rounds)
    messages = list(alphabet(start))

    def dfs(s, depth):
        report.states_visited += 1
        report.max_depth = max(report.max_depth, depth)
        _check_invariants(s, report)
        if s.terminal:
            report.paths += 1
            report.terminal[s.state] = report.terminal.get(s.state, 0) + 1
            for msg in messages:
                try:
                    transition(s, msg)
                    report.problems.append(("move after terminal", s, msg))
                except ProtocolViolation:
                    pass
            return
        moved = False
        for msg in messages:
            try:
                nxt = transition(s, msg)
            except ProtocolViolation:
                continue
            moved = True
            dfs(nxt, depth + 1)
        if not moved:
            report.paths += 1
            report.problems.append(("stuck in non-terminal state", s))

    dfs(start, 0)
    return report
