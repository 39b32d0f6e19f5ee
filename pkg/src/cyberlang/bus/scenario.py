"""Deterministic scenario scripts for the bus.

A scenario file names the sign, mapping and dialect files (relative to the
scenario), declares agents and lists events at strictly increasing logical
ticks. Expectations are small assertions over the outcome of one event::

    {"event": 0, "assert": "deliveries == 3"}
    {"event": 2, "assert": "delivered.robot == true"}

Fields: ``deliveries`` (count delivered), ``status``, ``negotiation`` (final
state of the last session, or ``none``), ``rounds``, ``conflicts`` and
``delivered.<agent>``. Operators: ``== != < <= > >=``.
"""

from __future__ import annotations

import json
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..compiler.dialect import Dialect
from ..core.signs import Cybersign, SignRegistry
from ..errors import CyberlangError, ParseError, ScriptError
from ..fdsg.parser import parse
from ..ids import IdGenerator
from ..semantics.context import ContextSnapshot
from ..semantics.mappings import MappingRegistry
from .agents import AgentKind, AgentProfile
from .broker import Broker, DeliveryReport
from .corpus import CorpusRecord

EVENT_KINDS = ("publish", "context_update", "inject_ambiguity")
_ASSERT_RE = re.compile(r"^\s*([a-z_]+(?:\.[A-Za-z0-9_-]+)?)\s*(==|!=|<=|>=|<|>)\s*(.+?)\s*$")
_OPS = {"==": operator.eq, "!=": operator.ne, "<": operator.lt, "<=": operator.le,
        ">": operator.gt, ">=": operator.ge}


@dataclass(frozen=True)
class Event:
    at: int
    kind: str
    data: dict


@dataclass(frozen=True)
class Expectation:
    event: int
    assertion: str


@dataclass
class ScenarioScript:
    name: str
    signs: SignRegistry
    mappings: MappingRegistry
    dialect: Dialect
    agents: list[AgentProfile]
    events: list[Event]
    expectations: list[Expectation] = field(default_factory=list)
    context: ContextSnapshot = field(default_factory=ContextSnapshot)
    seed: int = 0


@dataclass(frozen=True)
class ExpectationResult:
    event: int
    assertion: str
    passed: bool
    actual: Any

    def __str__(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} event {self.event}: {self.assertion} (actual: {self.actual!r})"


@dataclass
class ScenarioResult:
    corpus: list[CorpusRecord]
    expectations: list[ExpectationResult]
    reports: dict[int, DeliveryReport]
    broker: Broker

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.expectations)


def _literal(text: str):
    if text in ("true", "false"):
        return text == "true"
    if text == "none":
        return "none"
    if re.fullmatch(r"-?[0-9]+", text):
        return int(text)
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def _field(report: DeliveryReport, name: str):
    if name == "deliveries":
        return len(report.delivered)
    if name == "status":
        return report.status
    if name == "negotiation":
        return report.sessions[-1].state.value if report.sessions else "none"
    if name == "rounds":
        return sum(s.round for s in report.sessions)
    if name == "conflicts":
        return len(report.meaning.conflicts) if report.meaning else 0
    if name.startswith("delivered."):
        return name.split(".", 1)[1] in report.delivered
    raise KeyError(name)


def check_expectation(report: DeliveryReport, assertion: str):
    """(passed, actual value) for one assertion; raises ValueError if it is malformed."""
    m = _ASSERT_RE.match(assertion)
    if not m:
        raise ValueError(f"malformed assertion {assertion!r}")
    name, op, raw = m.groups()
    try:
        actual = _field(report, name)
    except KeyError:
        raise ValueError(f"unknown field {name!r} in {assertion!r}") from None
    expected = _literal(raw)
    try:
        return bool(_OPS[op](actual, expected)), actual
    except TypeError:
        return False, actual


def _resolve(base: Path, rel: str) -> Path:
    return (base / rel).resolve()


def scenario_from_dict(data: dict, base: Path = Path(".")) -> ScenarioScript:
    if not isinstance(data, dict):
        raise ScriptError("scenario must be a JSON object")
    try:
        signs = SignRegistry.load(_resolve(base, data["signs"]))
        mappings = MappingRegistry.load(_resolve(base, data["mappings"]))
        dialect = Dialect.load(_resolve(base, data["dialect"]))
    except KeyError as exc:
        raise ScriptError(f"scenario is missing {exc.args[0]!r}") from None
    except (OSError, CyberlangError, ValueError) as exc:
        raise ScriptError(f"cannot load scenario resources: {exc}") from None
    ctx_spec = data.get("context")
    try:
        if isinstance(ctx_spec, str):
            context = ContextSnapshot.load(_resolve(base, ctx_spec))
        elif isinstance(ctx_spec, dict):
            context = ContextSnapshot.from_dict(ctx_spec)
        else:
            context = ContextSnapshot()
    except (OSError, CyberlangError) as exc:
        raise ScriptError(f"bad initial context: {exc}") from None

    agents = []
    for a in data.get("agents", []):
        try:
            agents.append(AgentProfile(a["id"], AgentKind(a["kind"]), a.get("dialect"), a.get("intents", {})))
        except (KeyError, ValueError, CyberlangError) as exc:
            raise ScriptError(f"bad agent declaration {a!r}: {exc}") from None
    ids = [a.agent_id for a in agents]
    if len(set(ids)) != len(ids):
        raise ScriptError("agent ids must be unique")

    events = []
    last = None
    for i, e in enumerate(data.get("events", [])):
        if not isinstance(e, dict) or e.get("kind") not in EVENT_KINDS or not isinstance(e.get("at"), int):
            raise ScriptError(f"malformed event {e!r}", i)
        if last is not None and e["at"] <= last:
            raise ScriptError(f"tick {e['at']} does not follow tick {last}", i)
        last = e["at"]
        if e["kind"] == "publish" and e.get("publisher") not in ids:
            raise ScriptError(f"publisher {e.get('publisher')!r} is not a declared agent", i)
        events.append(Event(e["at"], e["kind"], {k: v for k, v in e.items() if k not in ("at", "kind")}))

    expectations = []
    for x in data.get("expectations", []):
        try:
            expectations.append(Expectation(int(x["event"]), str(x["assert"])))
        except (KeyError, TypeError, ValueError):
            raise ScriptError(f"malformed expectation {x!r}") from None
    for x in expectations:
        if not 0 <= x.event < len(events) or events[x.event].kind != "publish":
            raise ScriptError(f"expectation names event {x.event}, which is not a publish", x.event)
        if not _ASSERT_RE.match(x.assertion):
            raise ScriptError(f"malformed assertion {x.assertion!r}", x.event)

    return ScenarioScript(data.get("name", "scenario"), signs, mappings, dialect, agents, events,
                          expectations, context, int(data.get("seed", 0)))


def load_scenario(path) -> ScenarioScript:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScriptError(f"{path}: {exc}") from None
    return scenario_from_dict(data, path.parent)


def run_scenario(script: ScenarioScript, seed: Optional[int] = None) -> ScenarioResult:
    """Execute events in tick order; the seeded id generator is the only randomness."""
    ids = IdGenerator(script.seed if seed is None else seed)
    broker = Broker(script.signs.snapshot(), script.mappings, script.dialect, context=script.context, ids=ids)
    for profile in script.agents:
        broker.register(profile)
    reports: dict[int, DeliveryReport] = {}
    for i, ev in enumerate(script.events):
        try:
            if ev.kind == "publish":
                stmt = parse(ev.data["statement"], ids=ids)
                reports[i] = broker.publish(ev.data["publisher"], stmt, tick=ev.at)
            elif ev.kind == "context_update":
                ctx = ContextSnapshot.from_dict({"timestamp": ev.at, **ev.data["context"]})
                broker.update_context(ctx)
            else:
                sense = Cybersign.from_record(ev.data["sense"])
                if sense.lam != ev.data["lambda"]:
                    raise ScriptError(f"sense is for {sense.lam!r}, not {ev.data['lambda']!r}", i)
                broker.add_sense(sense)
        except ScriptError:
            raise
        except ParseError as exc:
            raise ScriptError("statement does not parse: " + "; ".join(map(str, exc.diagnostics)), i) from None
        except (KeyError, TypeError) as exc:
            raise ScriptError(f"event is missing {exc}", i) from None
        except CyberlangError as exc:
            raise ScriptError(f"{type(exc).__name__}: {exc}", i) from None
    results = []
    for x in script.expectations:
        passed, actual = check_expectation(reports[x.event], x.assertion)
        results.append(ExpectationResult(x.event, x.assertion, passed, actual))
    return ScenarioResult(list(broker.corpus), results, reports, broker)
