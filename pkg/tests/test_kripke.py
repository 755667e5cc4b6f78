import random

import pytest
from hypothesis import given, settings, strategies as st

from franca.kripke import (
    And,
    Bot,
    Atom,
    Box,
    BoundTooLarge,
    Countermodel,
    Dia,
    Imp,
    KripkeError,
    KripkeModel,
    Neg,
    Or,
    Proof,
    UnknownAtom,
    corpus,
    faithfulness_corpus_check,
    kripke_eval,
    parse_modal,
    show,
    tableau_prove,
    valid_over_frames,
)
from franca.random_terms import random_modal

from oracles import modal_truth


def to_tuple(f):
    if isinstance(f, Atom):
        return (f.name,)
    if isinstance(f, Neg):
        return ("not", to_tuple(f.sub))
    if isinstance(f, And):
        return ("and", to_tuple(f.left), to_tuple(f.right))
    if isinstance(f, Bot):
        return ("and", ("p",), ("not", ("p",)))
    if isinstance(f, Or):
        return ("not", ("and", ("not", to_tuple(f.left)), ("not", to_tuple(f.right))))
    if isinstance(f, Imp):
        return ("imp", to_tuple(f.left), to_tuple(f.right))
    if isinstance(f, Box):
        return ("box", to_tuple(f.sub))
    if isinstance(f, Dia):
        return ("dia", to_tuple(f.sub))
    raise ValueError(f)


CHAIN = KripkeModel.make(3, {1: {(0, 1), (1, 2)}}, {"p": {1}, "q": {2}})


def test_eval_examples():
    assert kripke_eval(parse_modal("dia p"), CHAIN, 0)
    assert not kripke_eval(parse_modal("dia dia p"), CHAIN, 0)
    assert kripke_eval(parse_modal("box dia q"), CHAIN, 0)
    assert kripke_eval(parse_modal("box bot"), CHAIN, 2)
    with pytest.raises(UnknownAtom):
        kripke_eval(parse_modal("r"), CHAIN, 0)
    with pytest.raises(KripkeError):
        KripkeModel.make(2, {1: {(0, 5)}}, {})


def test_parse_show_roundtrip():
    for text in ["box1 p => p", "!(p & q) | dia2 q", "box (p => q) => box p => box q"]:
        f = parse_modal(text)
        assert parse_modal(show(f)) == f


def test_corpus_sizes():
    assert len(corpus(0)) == 2
    assert len(corpus(1)) == 2 + 2 * 2 + 3 * 4


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_eval_matches_set_oracle(seed):
    rng = random.Random(seed)
    f = random_modal(rng, depth=4)
    n = rng.randint(1, 4)
    rel = {(x, y) for x in range(n) for y in range(n) if rng.random() < 0.4}
    val = {a: {x for x in range(n) if rng.random() < 0.5} for a in ("p", "q")}
    m = KripkeModel.make(n, {1: rel}, val)
    for x in range(n):
        assert kripke_eval(f, m, x) == modal_truth(to_tuple(f), range(n), rel, val, x)


def test_valid_over_frames_examples():
    k = parse_modal("box (p => q) => box p => box q")
    assert valid_over_frames(k, 3, "K")
    t = parse_modal("box p => p")
    v = valid_over_frames(t, 3, "K")
    assert not v and not kripke_eval(t, v.witness, v.world)
    assert valid_over_frames(t, 3, "KT")
    assert not valid_over_frames(parse_modal("box p => box box p"), 3, "KT")
    assert valid_over_frames(parse_modal("box p => box box p"), 3, "K4")
    assert valid_over_frames(parse_modal("dia p => box dia p"), 3, "S5")
    with pytest.raises(BoundTooLarge):
        valid_over_frames(t, 5)


def test_iso_reduction_does_not_change_verdicts():
    for f in corpus(1):
        for logic in ("K", "S4"):
            assert valid_over_frames(f, 3, logic).valid == valid_over_frames(f, 3, logic, iso=False).valid


def test_tableau_examples():
    assert isinstance(tableau_prove(parse_modal("box (p => q) => box p => box q"), "K"), Proof)
    cm = tableau_prove(parse_modal("box p => p"), "K")
    assert isinstance(cm, Countermodel) and not kripke_eval(cm.formula, cm.model, cm.world)
    assert isinstance(tableau_prove(parse_modal("box p => p"), "KT"), Proof)
    assert isinstance(tableau_prove(parse_modal("box p => box box p"), "K4"), Proof)
    assert isinstance(tableau_prove(parse_modal("dia p => box dia p"), "S5"), Proof)
    assert isinstance(tableau_prove(parse_modal("dia p => box dia p"), "S4"), Countermodel)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["K", "KT", "K4", "S4", "S5"]))
def test_tableau_agrees_with_frames(seed, logic):
    f = random_modal(random.Random(seed), depth=3)
    if "index=2" in repr(f):
        return
    res = tableau_prove(f, logic)
    frames = valid_over_frames(f, 3, logic)
    if isinstance(res, Countermodel):
        assert not kripke_eval(f, res.model, res.world)
        # small countermodels are visible to the frame enumeration too
        if res.model.worlds <= 3:
            assert not frames.valid
    else:
        assert frames.valid


def test_faithfulness_small_corpus():
    rep = faithfulness_corpus_check(logic="K", depth_max=1, atom_count=2, frame_bound=2)
    assert rep.ok and rep.formulas == len(corpus(1))
    assert rep.pointwise_triples > 0
