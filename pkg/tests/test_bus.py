import asyncio
import json
import random
from pathlib import Path

import pytest

from cyberlang.bus import (
    HEADER_SIZE,
    MAX_PAYLOAD,
    NEED_MORE,
    AgentKind,
    AgentProfile,
    Broker,
    BrokerServer,
    FrameDecoder,
    MsgType,
    check_expectation,
    corpus_text,
    decode_frame,
    encode_frame,
    export_corpus,
    import_corpus,
    load_scenario,
    parse_addr,
    payload_digest,
    run_scenario,
    scenario_from_dict,
    send_request,
    split_frame,
    validate_corpus,
)
from cyberlang.compiler import TargetProfile, compile_statement
from cyberlang.core import Dimension
from cyberlang.errors import (
    BadMagic,
    DialectViolation,
    FrameError,
    OversizePayload,
    ScriptError,
    SchemaViolation,
    UnknownMessageType,
    UnknownPublisher,
    UnsupportedVersion,
)
from cyberlang.fdsg import parse
from cyberlang.ids import IdGenerator
from cyberlang.resources import data_path

from conftest import DANGER_SOURCE, EXAMPLE_CANONICAL
from provenance import foreign_values

GOLDEN = Path(__file__).parent / "golden"


# -- frames ------------------------------------------------------------------------

def test_frame_layout():
    raw = encode_frame(0x01, "[P: a=1]")
    assert len(raw) == 18
    assert raw[:4] == b"CYBL" and raw[4] == 1 and raw[5] == 1
    assert int.from_bytes(raw[6:10], "big") == 8
    assert decode_frame(raw) == (MsgType.STATEMENT, "[P: a=1]")


def test_truncated_frames_need_more_bytes():
    raw = encode_frame(0x01, "[P: a=1]")
    for n in range(len(raw)):
        assert decode_frame(raw[:n]) is NEED_MORE
    assert decode_frame(raw[:9]) is NEED_MORE


@pytest.mark.parametrize("raw, err", [
    (b"XYBL\x01\x01\x00\x00\x00\x00", BadMagic),
    (b"CYB!", BadMagic),
    (b"CYBL\x02\x01\x00\x00\x00\x00", UnsupportedVersion),
    (b"CYBL\x01\x55\x00\x00\x00\x00", UnknownMessageType),
    (b"CYBL\x01\x01" + (MAX_PAYLOAD + 1).to_bytes(4, "big"), OversizePayload),
    (b"CYBL\x01\x01\x00\x00\x00\x02\xff\xfe", FrameError),
    (encode_frame(1, "x") + b"!", FrameError),
])
def test_frame_errors(raw, err):
    with pytest.raises(err):
        decode_frame(raw)


def test_encode_rejects_bad_input():
    with pytest.raises(UnknownMessageType):
        encode_frame(0x55, "")
    with pytest.raises(OversizePayload):
        encode_frame(1, b"a" * (MAX_PAYLOAD + 1))
    with pytest.raises(FrameError):
        encode_frame(1, b"\xff")


@pytest.mark.parametrize("n", [0, 1, 9, 10, 11, 4096, 1 << 20])
def test_frame_round_trip_at_boundary_lengths(n):
    payload = ("é" * n)[: n // 2] + "a" * (n - 2 * (n // 2))  # n bytes, mixed widths
    assert len(payload.encode()) == n
    raw = encode_frame(MsgType.DELIVERY, payload)
    assert len(raw) == HEADER_SIZE + n
    assert decode_frame(raw) == (MsgType.DELIVERY, payload)


def test_incremental_decoder_on_random_chunks():
    rng = random.Random(7)
    payloads = ["".join(rng.choice("ab∥≻ \n") for _ in range(rng.randint(0, 300))) for _ in range(200)]
    stream = b"".join(encode_frame(MsgType.STATEMENT, p) for p in payloads)
    dec, got, pos = FrameDecoder(), [], 0
    while pos < len(stream):
        step = rng.randint(1, 64)
        got.extend(f.payload for f in dec.feed(stream[pos:pos + step]))
        pos += step
    assert got == payloads and dec.buffered == 0
    head, used = split_frame(stream)
    assert head.payload == payloads[0] and used == HEADER_SIZE + len(payloads[0].encode())


# -- broker ------------------------------------------------------------------------

def _broker(signs, mappings, dialect, commander_intents=None):
    b = Broker(signs, mappings, dialect, ids=IdGenerator(0))
    b.register(AgentProfile("commander", AgentKind.HUMAN, "emergency-response", commander_intents or {}))
    b.register(AgentProfile("ai", AgentKind.AI))
    b.register(AgentProfile("robot", AgentKind.ROBOT))
    b.register(AgentProfile("twin", AgentKind.TWIN))
    return b


def test_worked_example_reaches_three_recipients(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect)
    stmt = parse(EXAMPLE_CANONICAL, ids=IdGenerator(1))
    rep = b.publish("commander", stmt, tick=1)
    assert rep.status == "resolved"
    assert sorted(rep.delivered) == ["ai", "robot", "twin"]
    targets = {d.agent_id: d.target for d in rep.deliveries}
    assert targets == {"ai": TargetProfile.MACHINE_JSON, "robot": TargetProfile.ROBOT_CMD,
                       "twin": TargetProfile.TWIN_UPDATE}
    for d in rep.deliveries:
        form = compile_statement(stmt, d.target, dialect)
        assert d.digest == payload_digest(form)
        assert b.agents[d.agent_id].inbox == [form]
        assert foreign_values(form, stmt, dialect) == []
    assert len(b.corpus) == 1 and b.corpus[0] is rep.record


def test_robot_never_gets_social_or_intentional_only_content(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect)
    rep = b.publish("commander", parse("[S: concern=noise] [T: intent=reconnaissance]"))
    robot = next(d for d in rep.deliveries if d.agent_id == "robot")
    assert robot.status == "skipped"
    assert b.agents["robot"].inbox == []


def test_unresolved_tie_is_withheld_and_recorded(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect)
    rep = b.publish("commander", parse(DANGER_SOURCE))
    assert rep.status == "ambiguous" and rep.delivered == []
    assert {d.status for d in rep.deliveries} == {"withheld"}
    amb = rep.record.resolution["ambiguity"]
    assert amb["lambda"] == "danger" and len(amb["candidates"]) == 2
    assert rep.sessions[0].state.value == "Failed"


def test_tie_is_negotiated_with_an_intending_publisher(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect, {"danger": "p:hazard/obstacle"})
    rep = b.publish("commander", parse(DANGER_SOURCE))
    assert rep.status == "negotiated" and len(rep.delivered) == 3
    assert rep.sessions[0].round <= 3
    again = b.publish("commander", parse(DANGER_SOURCE))
    assert again.status == "resolved" and not again.sessions


def test_publishers_must_be_registered_and_speak_the_dialect(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect)
    with pytest.raises(UnknownPublisher):
        b.publish("ghost", parse("[P: sector=A1]"))
    with pytest.raises(DialectViolation):
        b.publish("commander", parse("[P: speed=3]"))
    assert b.corpus == []
    with pytest.raises(ValueError):
        b.register(AgentProfile("ai", AgentKind.AI))
    with pytest.raises(ValueError):
        b.register(AgentProfile("resolver", AgentKind.AI))


def test_every_publish_leaves_one_record(signs, mappings, dialect):
    b = _broker(signs, mappings, dialect)
    sources = [EXAMPLE_CANONICAL, DANGER_SOURCE, "[T: topic=smoke]", "[C: algorithm=x]"]
    for i, src in enumerate(sources):
        b.publish("commander", parse(src), tick=i)
    assert [r.tick for r in b.corpus] == [0, 1, 2, 3]
    for r in b.corpus:
        assert set(r.components) == {"P", "S", "T", "C"}


# -- scenarios ---------------------------------------------------------------------

def test_emergency_scenario_matches_golden():
    script = load_scenario(data_path("emergency-response.scenario.json"))
    first = run_scenario(script)
    second = run_scenario(load_scenario(data_path("emergency-response.scenario.json")))
    golden = (GOLDEN / "emergency-response.cybercorpus.jsonl").read_bytes()
    assert corpus_text(first.corpus).encode() == golden == corpus_text(second.corpus).encode()
    assert first.ok and [str(x).split()[0] for x in first.expectations] == ["PASS"] * len(first.expectations)


def test_danger_scenario_negotiates_then_learns():
    res = run_scenario(load_scenario(data_path("danger-negotiation.scenario.json")))
    assert res.ok, [str(x) for x in res.expectations]
    statuses = [res.reports[i].status for i in sorted(res.reports)]
    assert statuses == ["resolved", "negotiated", "resolved", "resolved"]


def test_seed_changes_ids_only():
    script = load_scenario(data_path("emergency-response.scenario.json"))
    a, b = run_scenario(script, seed=0), run_scenario(script, seed=1)
    assert a.corpus[0].statement_id != b.corpus[0].statement_id
    assert a.corpus[0].deliveries == b.corpus[0].deliveries


def _script(**over):
    base = {"signs": str(data_path("signs.json")), "mappings": str(data_path("mappings.json")),
            "dialect": str(data_path("emergency-response.dialect.json")),
            "agents": [{"id": "h", "kind": "human"}, {"id": "r", "kind": "robot"}], "events": []}
    base.update(over)
    return scenario_from_dict(base)


def test_empty_scenario_passes_vacuously():
    res = run_scenario(_script())
    assert res.ok and res.corpus == []


@pytest.mark.parametrize("over", [
    {"events": [{"at": 1, "kind": "explode"}]},
    {"events": [{"at": 2, "kind": "publish", "publisher": "h", "statement": "[P: sector=A]"},
                {"at": 1, "kind": "publish", "publisher": "h", "statement": "[P: sector=A]"}]},
    {"events": [{"at": 1, "kind": "publish", "publisher": "nobody", "statement": "[P: sector=A]"}]},
    {"agents": [{"id": "h", "kind": "human"}, {"id": "h", "kind": "ai"}]},
    {"expectations": [{"event": 0, "assert": "status == resolved"}]},
    {"dialect": "/does/not/exist.json"},
])
def test_bad_scripts(over):
    with pytest.raises(ScriptError):
        _script(**over)


def test_runtime_script_errors_name_the_event():
    script = _script(events=[{"at": 1, "kind": "publish", "publisher": "h", "statement": "[P: sector="}])
    with pytest.raises(ScriptError) as exc:
        run_scenario(script)
    assert exc.value.index == 0


def test_expectation_language():
    res = run_scenario(load_scenario(data_path("emergency-response.scenario.json")))
    rep = res.reports[0]
    assert check_expectation(rep, "deliveries >= 3") == (True, 3)
    assert check_expectation(rep, "delivered.robot == false") == (False, True)
    with pytest.raises(ValueError):
        check_expectation(rep, "colour == red")


# -- corpus ------------------------------------------------------------------------

def test_corpus_export_import_validate(tmp_path):
    res = run_scenario(load_scenario(data_path("danger-negotiation.scenario.json")))
    path = export_corpus(res.corpus, tmp_path / "out.jsonl")
    assert validate_corpus(path) == []
    assert import_corpus(path) == res.corpus
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    neg = json.loads(lines[1])["negotiation"][0]
    assert neg["state"] == "Converged" and neg["transcript"][0]["kind"] == "AmbiguityReport"


def test_corpus_validation_reports_lines(tmp_path):
    good = (GOLDEN / "emergency-response.cybercorpus.jsonl").read_text()
    record = json.loads(good)
    del record["resolution"]
    bad = tmp_path / "bad.jsonl"
    bad.write_text(good + "{not json\n" + json.dumps(record) + "\n" + json.dumps(json.loads(good), indent=1).replace("\n", "") + "\n")
    lines = sorted({n for n, _ in validate_corpus(bad)})
    assert lines == [2, 3, 4]
    with pytest.raises(SchemaViolation):
        import_corpus(bad)


# -- server ------------------------------------------------------------------------

def test_parse_addr():
    assert parse_addr("127.0.0.1:7451") == ("127.0.0.1", 7451)
    assert parse_addr(":80") == ("127.0.0.1", 80)
    with pytest.raises(ValueError):
        parse_addr("localhost")


def test_tcp_round_trip(signs_unambiguous, mappings, dialect, tmp_path):
    corpus = tmp_path / "live.jsonl"

    async def scenario():
        server = BrokerServer(_broker(signs_unambiguous, mappings, dialect), str(corpus))
        host, port = await server.start("127.0.0.1", 0)
        try:
            req = json.dumps({"publisher": "commander", "statement": EXAMPLE_CANONICAL})
            reply = await send_request(host, port, MsgType.STATEMENT, req)
            bad = await send_request(host, port, MsgType.STATEMENT, json.dumps({"publisher": "x", "statement": "[P: a=1]"}))
            ctx = await send_request(host, port, MsgType.CONTEXT_UPDATE, json.dumps({"timestamp": 5, "P": {"altitude!": "40m"}}))
            syntax = await send_request(host, port, MsgType.STATEMENT, json.dumps({"publisher": "commander", "statement": "[P:"}))
        finally:
            await server.close()
        return server, reply, bad, ctx, syntax

    server, reply, bad, ctx, syntax = asyncio.run(scenario())
    assert reply.msg_type == MsgType.DELIVERY
    body = json.loads(reply.payload)
    assert body["status"] == "resolved" and len(body["deliveries"]) == 3
    assert bad.msg_type == MsgType.ERROR and json.loads(bad.payload)["error"] == "UnknownPublisher"
    assert json.loads(ctx.payload) == {"ok": True, "timestamp": 5}
    assert server.broker.context.is_authoritative(Dimension.P, "altitude")
    assert json.loads(syntax.payload)["error"] == "ParseError"
    assert validate_corpus(corpus) == [] and len(corpus.read_text().splitlines()) == 1
