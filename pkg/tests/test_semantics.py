import random
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyberlang.core import DIMENSIONS, Dimension, Identifier, Quantity, Reference, SignRegistry, make_sign
from cyberlang.errors import (
    AmbiguityError,
    InconsistentDirectives,
    InvalidStatement,
    InvalidContext,
    InvalidValue,
    NonBijectiveTable,
    UnmappedReference,
)
from cyberlang.fdsg import IntegrationOperator, Parallel, Precedence, parse
from cyberlang.resources import data_path
from cyberlang.semantics import (
    CONTEXT,
    EXPRESSION,
    ContextSnapshot,
    DimensionWeights,
    MappingKind,
    MappingRegistry,
    MappingTable,
    Tie,
    Verdict,
    check_fusion,
    context_from_slots,
    derive_weights,
    disambiguate,
    evaluate_meaning,
    map_derived,
    map_forward,
    map_inverse,
)

from generators import statements
from oracles import Inconsistent, oracle_weights, random_tables, two_hop

P, S, T, C = DIMENSIONS
HAZARD = make_sign("danger", {"P": "p:hazard/obstacle", "S": "s:safety/evacuation-order",
                              "T": "t:alert/avoid", "C": "c:anomaly/obstacle-model"})
SOCIAL = make_sign("danger", {"P": "p:crowd/gathering", "S": "s:risk/public-opinion",
                              "T": "t:concern/reputational", "C": "c:sentiment/risk-index"})


# -- mapping tables --------------------------------------------------------------

def test_forward_and_inverse_on_bundled_tables(mappings):
    assert map_forward(mappings, "CP", "p:hazard/obstacle") == Reference("c:anomaly/obstacle-model")
    assert map_inverse(mappings, MappingKind.CP, "c:anomaly/obstacle-model") == Reference("p:hazard/obstacle")
    with pytest.raises(UnmappedReference):
        map_inverse(mappings, "CP", "c:nothing/here")


def test_empty_table_maps_nothing():
    with pytest.raises(UnmappedReference):
        map_forward(MappingRegistry(), "CS", "s:any/thing")


def test_tables_must_be_bijective_and_namespaced():
    with pytest.raises(NonBijectiveTable):
        MappingTable(MappingKind.CP, [("p:a", "c:x"), ("p:b", "c:x")])
    with pytest.raises(NonBijectiveTable):
        MappingTable(MappingKind.CP, [("p:a", "c:x"), ("p:a", "c:y")])
    with pytest.raises(InvalidValue):
        MappingTable(MappingKind.CS, [("p:a", "c:x")])
    with pytest.raises(InvalidValue):
        MappingTable(MappingKind.CS, [("s:a", "t:x")])


def test_derived_map_fixture():
    reg = MappingRegistry.from_pairs(cp=[("p:hazard/obstacle", "c:risk/0")],
                                     cs=[("s:risk/evacuation", "c:risk/0")])
    assert map_derived(reg, P, S, "p:hazard/obstacle") == Reference("s:risk/evacuation")
    assert map_derived(reg, S, P, "s:risk/evacuation") == Reference("p:hazard/obstacle")
    with pytest.raises(UnmappedReference) as exc:
        map_derived(reg, P, T, "p:hazard/obstacle")
    assert exc.value.hop == 2
    with pytest.raises(UnmappedReference) as exc:
        map_derived(reg, P, S, "p:unknown")
    assert exc.value.hop == 1
    with pytest.raises(ValueError):
        map_derived(reg, P, C, "p:hazard/obstacle")


@pytest.mark.parametrize("seed", range(5))
def test_derived_maps_match_two_hop_oracle(seed):
    tables = random_tables(seed)
    reg = MappingRegistry.from_pairs(cp=tables["p"].items(), cs=tables["s"].items(), ct=tables["t"].items())
    for src, dst in [(P, S), (P, T), (S, T), (S, P), (T, P), (T, S)]:
        for ref in tables[src.namespace]:
            want = two_hop(tables, src.namespace, dst.namespace, ref)
            if want is None:
                with pytest.raises(UnmappedReference):
                    map_derived(reg, src, dst, ref)
                continue
            got = map_derived(reg, src, dst, ref)
            assert got == Reference(want)
            assert map_derived(reg, dst, src, got) == Reference(ref)


def test_registry_file_is_canonical(tmp_path, mappings):
    path = tmp_path / "m.json"
    mappings.save(path)
    assert MappingRegistry.load(path) == mappings
    text = path.read_text()
    assert text == mappings.to_json()
    data = MappingRegistry.load(path).to_dict()
    for k in ("cp", "cs", "ct"):
        assert data[k] == sorted(data[k])


# -- fusion ----------------------------------------------------------------------

def test_fusion_coherent_incoherent_unverifiable(mappings):
    assert check_fusion(mappings, HAZARD).coherent
    mutated = make_sign("danger", {"P": "p:hazard/obstacle", "S": "s:risk/public-opinion",
                                   "T": "t:alert/avoid", "C": "c:anomaly/obstacle-model"})
    rep = check_fusion(mappings, mutated)
    assert rep.verdicts[S] is Verdict.INCOHERENT
    assert rep.verdicts[P] is Verdict.COHERENT and rep.verdicts[T] is Verdict.COHERENT
    assert not rep.coherent
    empty = check_fusion(MappingRegistry(), HAZARD)
    assert set(empty.verdicts.values()) == {Verdict.UNVERIFIABLE}
    assert not empty.coherent


def test_bundled_signs_are_coherent(signs, mappings):
    for sign in signs:
        assert check_fusion(mappings, sign).coherent, sign


# -- weights ---------------------------------------------------------------------

def omega(*ds):
    return IntegrationOperator(ds)


def test_weight_examples():
    w = derive_weights(omega(Precedence(P, S), Parallel(T, C)), DIMENSIONS)
    assert w.as_tuple() == (0.3125, 0.1875, 0.25, 0.25)
    assert derive_weights(omega(), DIMENSIONS).as_tuple() == (0.25,) * 4
    w = derive_weights(parse("[P: a=1] [C: b=1] [+O: P~0.7]").omega, {P, C})
    assert w[P] == pytest.approx(0.7) and w[C] == pytest.approx(0.3)
    assert w[S] == 0 and w[T] == 0


def test_weight_example_matches_oracle():
    want = oracle_weights("PSTC", precedences=[("P", "S")], parallels=[("T", "C")])
    assert want == {"P": Fraction(5, 16), "S": Fraction(3, 16), "T": Fraction(1, 4), "C": Fraction(1, 4)}


def test_blend_against_parallel_is_inconsistent():
    om = parse("[P: a=1] [S: b=1] [T: c=1] [+O: P||S, P~0.5]").omega
    with pytest.raises(InconsistentDirectives):
        derive_weights(om, {P, S, T})


@pytest.mark.parametrize("directives", [
    (Parallel(P, S), Parallel(S, T), Precedence(P, T)),
    (Precedence(P, S), Precedence(C, P), Parallel(C, S)),
    (Precedence(P, S), Precedence(T, C), Parallel(S, T), Parallel(C, P)),
])
def test_precedence_against_parallel_classes_is_rejected(directives):
    with pytest.raises(InvalidStatement) as exc:
        omega(*directives)
    assert exc.value.code == "ContradictoryDirectives"


def test_dimension_weights_validation():
    with pytest.raises(ValueError):
        DimensionWeights({P: 0.5, S: 0.6})
    with pytest.raises(ValueError):
        DimensionWeights({P: 1.5, S: -0.5})


# -- context -----------------------------------------------------------------------

def test_context_file_round_trip(tmp_path):
    ctx = ContextSnapshot.load(data_path("altitude-ceiling.context.json"))
    assert ctx.states[P]["altitude"] == Quantity(40, "m")
    assert ctx.is_authoritative(P, "altitude")
    assert all(d in ctx.states for d in DIMENSIONS)
    path = tmp_path / "ctx.json"
    ctx.save(path)
    assert ContextSnapshot.load(path) == ctx
    assert '"altitude!": "40m"' in path.read_text()


@pytest.mark.parametrize("doc", [
    [], {"P": {"Bad Key": "1"}}, {"P": {"a": "¤"}}, {"X": {}}, {"timestamp": "soon"},
])
def test_bad_context_files(doc):
    with pytest.raises(InvalidContext):
        ContextSnapshot.from_dict(doc)


# -- meaning evaluation ----------------------------------------------------------

def test_empty_context_is_identity(example_stmt, signs, mappings):
    m = evaluate_meaning(example_stmt, ContextSnapshot(), signs, mappings)
    assert not m.conflicts
    for dim, block in example_stmt.blocks.items():
        assert [(k, s.value, s.origin) for k, s in m.resolved[dim].items()] == \
               [(k, v, EXPRESSION) for k, v in block.slots.items()]
    assert m.weights.as_tuple() == (0.3125, 0.1875, 0.25, 0.25)
    assert set(m.sign_bindings) == {"alpha", "reconnaissance", "high"}


def test_authoritative_context_overrides_top_ranked_dimension(example_stmt, signs, mappings):
    ctx = ContextSnapshot.load(data_path("altitude-ceiling.context.json"))
    m = evaluate_meaning(example_stmt, ctx, signs, mappings)
    assert m.value(P, "altitude") == Quantity(40, "m")
    assert m.resolved[P]["altitude"].origin == CONTEXT
    assert [c.to_dict() for c in m.conflicts] == [
        {"dimension": "P", "key": "altitude", "expression": "50m", "context": "40m", "winner": "context"}]


def test_authority_needs_a_top_ranked_dimension(signs, mappings):
    stmt = parse("[P: altitude=50m] [S: mission-id=M1] [+O: S>P]")
    ctx = ContextSnapshot.load(data_path("altitude-ceiling.context.json"))
    m = evaluate_meaning(stmt, ctx, signs, mappings)
    assert m.value(P, "altitude") == Quantity(50, "m")
    assert m.conflicts[0].winner == EXPRESSION


def test_non_authoritative_context_only_fills_gaps(example_stmt, signs, mappings):
    ctx = context_from_slots(P={"altitude": Quantity(40, "m"), "wind": Quantity(12, "m")})
    m = evaluate_meaning(example_stmt, ctx, signs, mappings)
    assert m.value(P, "altitude") == Quantity(50, "m")
    assert m.resolved[P]["wind"].origin == CONTEXT
    assert m.conflicts[0].winner == EXPRESSION


def test_danger_tie_raises_ambiguity(danger_stmt, signs, mappings):
    with pytest.raises(AmbiguityError) as exc:
        evaluate_meaning(danger_stmt, ContextSnapshot(), signs, mappings)
    amb = exc.value
    assert (amb.dimension, amb.key, amb.lam) == (P, "hazard", "danger")
    assert len(amb.candidates) == 2


def test_context_evidence_resolves_danger(danger_stmt, signs, mappings):
    ctx = ContextSnapshot.load(data_path("hazard-observed.context.json"))
    m = evaluate_meaning(danger_stmt, ctx, signs, mappings)
    assert m.sign_bindings["danger"] == HAZARD


def test_non_strict_leaves_tied_lambda_unbound(danger_stmt, signs, mappings):
    m = evaluate_meaning(danger_stmt, ContextSnapshot(), signs, mappings, strict=False)
    assert "danger" not in m.sign_bindings
    pinned = evaluate_meaning(danger_stmt, ContextSnapshot(), signs, mappings, bindings={"danger": SOCIAL})
    assert pinned.sign_bindings["danger"] == SOCIAL
    assert pinned.digest != m.digest


def test_disambiguate_examples():
    ctx = context_from_slots(P={"seen": Reference("p:hazard/obstacle")})
    w = DimensionWeights.uniform(DIMENSIONS)
    assert disambiguate("danger", [HAZARD, SOCIAL], ctx, w) == HAZARD
    tie = disambiguate("danger", [HAZARD, SOCIAL], ContextSnapshot(), w)
    assert isinstance(tie, Tie) and len(tie) == 2
    both = context_from_slots(P={"a": Reference("p:hazard/obstacle"), "b": Reference("p:crowd/gathering")})
    assert isinstance(disambiguate("danger", [HAZARD, SOCIAL], both, w), Tie)


def test_priors_break_ties_but_never_beat_evidence():
    w = DimensionWeights.uniform(DIMENSIONS)
    priors = {SOCIAL.digest: 0.49}
    assert disambiguate("danger", [HAZARD, SOCIAL], ContextSnapshot(), w, priors) == SOCIAL
    ctx = context_from_slots(P={"seen": Reference("p:hazard/obstacle")})
    assert disambiguate("danger", [HAZARD, SOCIAL], ctx, w, priors) == HAZARD


_REFS = [HAZARD.signified(d) for d in DIMENSIONS] + [SOCIAL.signified(d) for d in DIMENSIONS]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(_REFS), max_size=6),
       st.lists(st.integers(1, 100), min_size=4, max_size=4),
       st.integers(2, 1000))
def test_argmax_invariant_under_weight_scaling(refs, raw, scale):
    states = {d: {} for d in DIMENSIONS}
    for i, r in enumerate(refs):
        states[Dimension(r.namespace.upper())][f"k{i}"] = r
    ctx = ContextSnapshot(0, states)
    w1 = DimensionWeights({d: x / sum(raw) for d, x in zip(DIMENSIONS, raw)})
    scaled = [x * scale for x in raw]
    w2 = DimensionWeights({d: x / sum(scaled) for d, x in zip(DIMENSIONS, scaled)})
    a = disambiguate("danger", [HAZARD, SOCIAL], ctx, w1)
    b = disambiguate("danger", [HAZARD, SOCIAL], ctx, w2)
    assert a == b


def _oracle_for(stmt):
    om = stmt.omega
    prec = [(d.higher.value, d.lower.value) for d in om if isinstance(d, Precedence)]
    par = [(d.a.value, d.b.value) for d in om if isinstance(d, Parallel)]
    blend = {d.value: w for d, w in om.blend.items()} if om.blend else None
    return oracle_weights({d.value for d in stmt.present}, prec, par, blend)


@settings(max_examples=300, deadline=None)
@given(statements())
def test_weights_match_oracle_on_generated_statements(stmt):
    try:
        want = _oracle_for(stmt)
    except Inconsistent:
        with pytest.raises(InconsistentDirectives):
            derive_weights(stmt.omega, stmt.present)
        return
    got = derive_weights(stmt.omega, stmt.present)
    for d in DIMENSIONS:
        assert got[d] == pytest.approx(float(want.get(d.value, 0)), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(statements())
def test_evaluation_is_deterministic_and_identity_on_empty_context(stmt):
    reg = SignRegistry()
    try:
        _oracle_for(stmt)
    except Inconsistent:
        with pytest.raises(InconsistentDirectives):
            evaluate_meaning(stmt, ContextSnapshot(), reg, MappingRegistry())
        return
    m1 = evaluate_meaning(stmt, ContextSnapshot(), reg, MappingRegistry())
    m2 = evaluate_meaning(stmt, ContextSnapshot(), reg, MappingRegistry())
    assert m1 == m2 and m1.to_dict() == m2.to_dict()
    assert not m1.conflicts
    assert {d: {k: s.value for k, s in slots.items()} for d, slots in m1.resolved.items()} == \
           {d: dict(b.slots) for d, b in stmt.blocks.items()}
    assert sum(m1.weights.as_tuple()) == pytest.approx(1, abs=1e-9)


def test_blend_valid_for_present_blocks_still_evaluates():
    stmt = parse("[P: s=x] [C: af=y] [+O: C>P, P~0.41]")
    m = evaluate_meaning(stmt, ContextSnapshot(), SignRegistry(), MappingRegistry())
    assert m.weights[Dimension.P] == pytest.approx(0.41)
    assert m.weights[Dimension.C] == pytest.approx(0.59)
