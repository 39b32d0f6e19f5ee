import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyberlang.canonical import canonical_json
from cyberlang.compiler import (
    Dialect,
    TargetProfile,
    compile_statement,
    decompile_machine_json,
    validate_against_dialect,
)
from cyberlang.core import DIMENSIONS
from cyberlang.errors import (
    DialectError,
    DialectViolation,
    EmptyCompilation,
    NoApplicableTemplate,
    SchemaViolation,
)
from cyberlang.fdsg import IntegrationOperator, parse
from cyberlang.fdsg.ast import precedence_closure

from conftest import EXAMPLE_CANONICAL
from generators import random_admitted_statement, statements
from provenance import foreign_values

P, S, T, C = DIMENSIONS
GOLDEN = Path(__file__).parent / "golden"
NL_EXAMPLE = ("Reconnaissance of sector A7 at 50m for 1800s under authorization alpha "
              "(mission SAR-2026-047), urgency high, confidence 0.92, using path-optimize-v3 "
              "with live-weather-api.")


# -- dialect ---------------------------------------------------------------------

def test_bundled_dialect_admits_worked_example(example_stmt, dialect):
    assert validate_against_dialect(example_stmt, dialect) == []


def test_violations_are_distinct_kinds(dialect):
    stmt = parse("[P: altitude=50kg, speed=3, sector=0.5]")
    kinds = {(v.kind, v.key) for v in validate_against_dialect(stmt, dialect)}
    assert kinds == {("wrong-unit", "altitude"), ("unknown-key", "speed"), ("wrong-type", "sector")}
    with pytest.raises(DialectViolation) as exc:
        compile_statement(stmt, "machine-json", dialect)
    assert len(exc.value.violations) == 3


def test_dialect_file_round_trip(tmp_path, dialect):
    path = tmp_path / "d.dialect.json"
    path.write_text(json.dumps(dialect.to_dict()))
    assert Dialect.load(path).to_dict() == dialect.to_dict()


@pytest.mark.parametrize("mutate", [
    lambda d: d["nl_templates"].append({"requires": ["T.intent"], "template": "{T.nothing}"}),
    lambda d: d["nl_templates"].append({"requires": ["T.intent"], "template": "{T.intent|shout}"}),
    lambda d: d["twin_paths"].__setitem__("P.speed", "uav/speed"),
    lambda d: d["robot_rules"].append({"cmd": "x", "args": {}, "requires": ["P.sector", "T.intent"]}),
])
def test_malformed_dialects_are_rejected(dialect, mutate):
    doc = json.loads(json.dumps(dialect.to_dict()))
    mutate(doc)
    with pytest.raises(DialectError):
        Dialect.from_dict(doc)


# -- targets -----------------------------------------------------------------------

def test_human_nl_exact_sentence(example_stmt, dialect):
    assert compile_statement(example_stmt, TargetProfile.HUMAN_NL, dialect).payload == NL_EXAMPLE


def test_human_nl_falls_back_to_shorter_template(dialect):
    out = compile_statement(parse("[P: sector=B2] [T: intent=search]"), "human-nl", dialect)
    assert out.payload == "Search of sector B2."
    with pytest.raises(NoApplicableTemplate):
        compile_statement(parse("[S: concern=noise]"), "human-nl", dialect)


def test_machine_json_matches_golden(example_stmt, dialect):
    form = compile_statement(example_stmt, "machine-json", dialect)
    assert form.render() == (GOLDEN / "example.machine.json").read_text(encoding="utf-8")
    assert form.payload["omega"] == [["prec", "P", "S"], ["par", "T", "C"]]
    assert {"P", "S", "T", "C"} <= set(form.payload)
    assert form.source_statement_id == example_stmt.statement_id
    assert decompile_machine_json(form.render()) == example_stmt


def test_robot_cmd_order_and_concurrency(example_stmt, dialect):
    cmds = compile_statement(example_stmt, "robot-cmd", dialect).payload
    assert [c["cmd"] for c in cmds] == ["goto", "hold", "load-planner", "subscribe"]
    assert cmds[0]["args"] == {"sector": "A7", "altitude": "50m"}
    assert [c["concurrent_group"] for c in cmds] == [None, None, 1, 1]


def test_robot_cmd_follows_precedence(dialect):
    stmt = parse("[P: duration=60s] [C: algorithm=astar] [+O: C>P]")
    assert [c["cmd"] for c in compile_statement(stmt, "robot-cmd", dialect).payload] == ["load-planner", "hold"]


def test_twin_update(example_stmt, dialect):
    upd = compile_statement(example_stmt, "twin-update", dialect).payload
    assert upd[1] == {"path": "uav/position/altitude", "value": "50m", "ts": "$ts"}
    assert len(upd) == 9


def test_empty_projections(dialect):
    t_only = parse("[T: intent=reconnaissance, confidence=0.5]")
    with pytest.raises(EmptyCompilation):
        compile_statement(t_only, "robot-cmd", dialect)
    with pytest.raises(EmptyCompilation):
        compile_statement(parse("[T: topic=smoke]"), "twin-update", dialect)


# -- decompile ---------------------------------------------------------------------

def test_missing_omega_means_empty_omega():
    doc = json.loads((GOLDEN / "example.machine.json").read_text())
    del doc["omega"]
    assert decompile_machine_json(doc).omega == IntegrationOperator()


@pytest.mark.parametrize("doc", [
    '{"format": "cyberlanguage/machine-json@1", "P": {"order": ["a"], "slots": {"a": {"type": "number", "value": "1"}}},'
    ' "P": {"order": ["b"], "slots": {"b": {"type": "number", "value": "2"}}}}',
    '{"format": "cyberlanguage/machine-json@1"}',
    '{"format": "other", "P": {"order": ["a"], "slots": {"a": {"type": "number", "value": "1"}}}}',
    '{"format": "cyberlanguage/machine-json@1", "P": {"order": ["a"], "slots": {"b": {"type": "number", "value": "1"}}}}',
    '{"format": "cyberlanguage/machine-json@1", "P": {"order": ["a"], "slots": {"a": {"type": "number", "value": "1"}}},'
    ' "omega": [["prec", "P", "S"]]}',
    '[1, 2',
])
def test_bad_machine_json_is_a_schema_violation(doc):
    with pytest.raises(SchemaViolation):
        decompile_machine_json(doc)


# -- properties ---------------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(statements())
def test_machine_json_is_lossless(stmt):
    from cyberlang.compiler.targets import to_machine_json
    doc = to_machine_json(stmt)
    assert decompile_machine_json(canonical_json(doc)) == stmt


def _sources(cmd, dialect):
    return next(r.dimension for r in dialect.robot_rules if r.cmd == cmd)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projections_are_sound_deterministic_and_ordered(seed):
    from cyberlang.compiler import bundled_dialect
    dialect = bundled_dialect()
    stmt = random_admitted_statement(random.Random(seed), dialect)
    for target in TargetProfile:
        try:
            form = compile_statement(stmt, target, dialect)
        except (EmptyCompilation, NoApplicableTemplate):
            continue
        assert compile_statement(stmt, target, dialect) == form
        assert foreign_values(form, stmt, dialect) == []
        if target is TargetProfile.ROBOT_CMD:
            dims = [_sources(c["cmd"], dialect) for c in form.payload]
            for hi, lo in precedence_closure(stmt.omega):
                if hi in dims and lo in dims:
                    last_hi = max(i for i, d in enumerate(dims) if d == hi)
                    first_lo = min(i for i, d in enumerate(dims) if d == lo)
                    assert last_hi < first_lo


def test_provenance_scan_catches_invented_values(example_stmt, dialect):
    form = compile_statement(example_stmt, "twin-update", dialect)
    forged = type(form)(form.target, form.payload + [{"path": "uav/x", "value": "99m", "ts": "$ts"}],
                        form.source_statement_id)
    assert set(foreign_values(forged, example_stmt, dialect)) == {"uav/x", "99m"}
    nl = compile_statement(example_stmt, "human-nl", dialect)
    forged_nl = type(nl)(nl.target, nl.payload.replace("50m", "60m"), nl.source_statement_id)
    assert foreign_values(forged_nl, example_stmt, dialect)


def test_canonical_example_constant_matches_golden_statement():
    assert decompile_machine_json((GOLDEN / "example.machine.json").read_text()) == parse(EXAMPLE_CANONICAL)
