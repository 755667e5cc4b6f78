import random

import pytest
from hypothesis import given, settings, strategies as st

from franca.argnet import (
    Argument,
    ArgumentError,
    EdgeSpec,
    GraphTooLarge,
    attacks,
    build_graph,
    dung_extensions,
    is_consistent,
    is_deductive,
    is_minimal,
    sentence_argument,
    supports,
)
from franca.embed import catalog, host_signature
from franca.models import Bounds, CountermodelWitness, SatisfiableWitness, UnsatUpTo, ValidUpTo
from franca.parse import term
from franca.typesig import O, parameter

import oracles

ATOMS = ("a", "b", "c", "d")
SIG = host_signature([parameter(n, O) for n in ATOMS + ("CEisWrong", "CEisNotDesirable", "idle")])
B = Bounds.of(w=1)


def t(text):
    return term(text, SIG)


def A22(extra=()):
    prem = (t("CEisWrong"), t("CEisWrong => CEisNotDesirable")) + tuple(t(x) for x in extra)
    return Argument("A22", prem, t("CEisNotDesirable"))


def test_a22_properties():
    a = A22()
    assert isinstance(is_consistent(a, SIG, B), SatisfiableWitness)
    assert isinstance(is_deductive(a, SIG, B), ValidUpTo)
    assert is_minimal(a, SIG, B).minimal


def test_idle_premise_breaks_minimality():
    res = is_minimal(A22(["idle"]), SIG, B)
    assert not res.minimal and res.verdict == "not-minimal"
    assert res.witness == (0, 1)


def test_inconsistent_premises():
    a = Argument("X", (t("a"), t("!a")), t("b"))
    assert isinstance(is_consistent(a, SIG, B, premises_only=True), UnsatUpTo)
    assert isinstance(is_deductive(a, SIG, B), ValidUpTo)


def test_mode_errors():
    with pytest.raises(ArgumentError):
        Argument("X", (), t("a"), mode="strange")
    with pytest.raises(ArgumentError):
        Argument("X", (), t("a"), mode="global")


def test_trivial_attack_and_support():
    x = sentence_argument("X", t("a"))
    y = sentence_argument("Y", t("!a"))
    z = sentence_argument("Z", t("b"))
    assert isinstance(attacks([x], y, sig=SIG, bounds=B), ValidUpTo)
    assert isinstance(attacks([x], z, sig=SIG, bounds=B), CountermodelWitness)
    assert isinstance(attacks([x], z, [t("a => !b")], SIG, B), ValidUpTo)
    i, res = supports([x], sentence_argument("W", t("a")), sig=SIG, bounds=B)
    assert i == 1 and isinstance(res, ValidUpTo)
    i, res = supports([x], z, sig=SIG, bounds=B)
    assert isinstance(res, CountermodelWitness)
    with pytest.raises(ArgumentError):
        attacks([x], z, sig=SIG, bounds=B, premise=3)


def test_modal_argument_wraps_with_validity():
    k = catalog("K", props=("p",))
    p, bp = term("p", k.language), term("box p", k.language)
    glob = Argument("G", (p,), bp, "global", k)
    loc = Argument("L", (p,), bp, "local", k)
    assert isinstance(is_deductive(glob, k.language, Bounds.of(w=2)), ValidUpTo)
    assert isinstance(is_deductive(loc, k.language, Bounds.of(w=2)), CountermodelWitness)


# --- classical subsumption ---------------------------------------------------

def random_prop(rng, depth):
    """(text, predicate) pair for a random propositional formula."""
    if depth == 0 or rng.random() < 0.3:
        x = rng.choice(ATOMS)
        return x, lambda v, x=x: v[x]
    k = rng.randrange(4)
    l, lf = random_prop(rng, depth - 1)
    if k == 0:
        return f"!({l})", lambda v: not lf(v)
    r, rf = random_prop(rng, depth - 1)
    if k == 1:
        return f"({l}) & ({r})", lambda v: lf(v) and rf(v)
    if k == 2:
        return f"({l}) | ({r})", lambda v: lf(v) or rf(v)
    return f"({l}) => ({r})", lambda v: (not lf(v)) or rf(v)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_meta_arguments_match_truth_tables(seed):
    rng = random.Random(seed)
    prem = [random_prop(rng, 3) for _ in range(rng.randint(0, 3))]
    concl = random_prop(rng, 3)
    a = Argument("R", tuple(t(s) for s, _ in prem), t(concl[0]))
    expect = oracles.truth_table_entails([f for _, f in prem], concl[1], ATOMS)
    assert isinstance(is_deductive(a, SIG, B), ValidUpTo) == expect
    sat = oracles.truth_table_satisfiable([f for _, f in prem] + [concl[1]], ATOMS)
    assert isinstance(is_consistent(a, SIG, B), SatisfiableWitness) == sat


# --- Dung semantics against the set-based oracle ---------------------------

def test_mutual_attack():
    g = (("a", "b"), [("a", "b"), ("b", "a")])
    assert dung_extensions(g, "preferred") == [frozenset("a"), frozenset("b")]
    assert dung_extensions(g, "grounded") == [frozenset()]
    assert dung_extensions(g, "stable") == [frozenset("a"), frozenset("b")]


def test_odd_cycle_has_no_stable_extension():
    g = (("a", "b", "c"), [("a", "b"), ("b", "c"), ("c", "a")])
    assert dung_extensions(g, "stable") == []
    assert dung_extensions(g, "preferred") == [frozenset()]


def test_setaf_joint_attack():
    # d defeats b, which is enough to disarm the joint attack on c
    g = (("a", "b", "c", "d"), [(("a", "b"), "c"), ("d", "b")])
    assert dung_extensions(g, "grounded") == [frozenset("acd")]
    split = (("a", "b", "c", "d"), [("a", "c"), ("b", "c"), ("d", "b")])
    assert dung_extensions(split, "grounded") == [frozenset("ad")]


def test_graph_too_large():
    nodes = tuple(f"n{i}" for i in range(16))
    with pytest.raises(GraphTooLarge):
        dung_extensions((nodes, []), "grounded")
    with pytest.raises(ArgumentError):
        dung_extensions((("a",), []), "semi-stable")


graphs = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(tuple("abcdef"[:n])),
    st.sets(st.tuples(st.sampled_from("abcdef"[:n]), st.sampled_from("abcdef"[:n])), max_size=12),
))


@settings(max_examples=200, deadline=None)
@given(graphs)
def test_dung_matches_oracle(g):
    nodes, att = g
    att = sorted(att)
    got = {s: set(dung_extensions((nodes, att), s)) for s in ("complete", "grounded", "preferred", "stable")}
    assert got["complete"] == oracles.complete_extensions(nodes, att)
    assert got["grounded"] == {oracles.grounded_extension(nodes, att)}
    assert got["preferred"] == oracles.preferred_extensions(nodes, att)
    assert got["stable"] == oracles.stable_extensions(nodes, att)
    assert got["grounded"] <= got["complete"]
    assert got["stable"] <= got["preferred"]
    adm = set(dung_extensions((nodes, att), "admissible"))
    assert all(oracles.admissible(att, s) for s in adm)


# --- graphs ---------------------------------------------------------------------

def _args():
    return {
        "X": sentence_argument("X", t("a")),
        "Y": Argument("Y", (t("b"), t("c")), t("d")),
        "Z": sentence_argument("Z", t("!b")),
    }


def test_build_graph_with_and_without_implicit():
    specs = [
        EdgeSpec("attack", ("Z",), "Y", premise=1),
        EdgeSpec("attack", ("X",), "Y", premise=2),
        EdgeSpec("attack", ("X",), "Y", premise=2, implicit=(t("a => !c"),)),
        EdgeSpec("support", ("X",), "Y", implicit=(t("a => b"),)),
    ]
    g = build_graph(_args(), specs, SIG, B)
    assert [e.verified for e in g.attacks] == [True, False, True]
    assert g.attacks[1].witness is not None and g.attacks[1].verdict == "countermodel"
    assert g.supports[0].verified and g.supports[0].premise == 1
    assert g.attack_relation() == {(frozenset("Z"), "Y"), (frozenset("X"), "Y")}
    assert dung_extensions(g, "grounded") == [frozenset("XZ")]
    dot = g.to_dot()
    assert "style=dashed" in dot and 'label="+"' in dot
    with pytest.raises(ArgumentError):
        build_graph(_args(), [EdgeSpec("attack", ("Q",), "Y")], SIG, B)


def test_build_graph_is_reproducible():
    specs = [EdgeSpec("attack", ("X", "Z"), "Y"), EdgeSpec("support", ("Z",), "X")]
    one = build_graph(_args(), specs, SIG, B)
    two = build_graph(_args(), specs, SIG, B)
    assert one.to_json() == two.to_json() and one.to_dot() == two.to_dot()
    assert "⊕" in one.to_dot()
