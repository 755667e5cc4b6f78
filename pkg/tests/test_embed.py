import random

import pytest
from hypothesis import given, settings, strategies as st

from franca import term as T
from franca.embed import (
    CATALOG,
    UnknownCatalogEntry,
    UnmappedSymbol,
    catalog,
    global_consequence,
    local_consequence,
    stt_from_equality_check,
    translate,
    vld_wrap,
)
from franca.kripke import KripkeModel, encode, kripke_eval, parse_modal
from franca.models import Bounds, CountermodelWitness, ValidUpTo, check_valid, eval_term
from franca.parse import term
from franca.random_terms import random_modal
from franca.typesig import Mode, O

K = catalog("K")


def test_catalog_entries_build():
    for name in CATALOG:
        emb = catalog(name)
        assert emb.sig.mode in (Mode.RIGID, Mode.FLEXIBLE)
        assert emb.vld.type.cod == O
    assert catalog("SDL").name == "MDL"
    assert catalog("CJDDL").unverified
    with pytest.raises(UnknownCatalogEntry):
        catalog("nosuch")


def test_frame_axioms_follow_logic():
    assert catalog("K").frame_axioms == ()
    assert catalog("KT").frame_names == ("reflexive",)
    assert catalog("S5").frame_names == ("reflexive", "symmetric", "transitive")


def test_translate_examples():
    got = translate(parse_modal("box p => p"), K)
    assert T.show(got) == "or (not (box p)) p"
    assert got == T.beta_normalize(term("or (not (box p)) p", K.language))
    with pytest.raises(UnmappedSymbol):
        translate(parse_modal("box2 p"), K)
    with pytest.raises(UnmappedSymbol):
        translate(parse_modal("p"), catalog("S5U"))


def test_vld_wrap_type_errors():
    with pytest.raises(T.TypeMismatch):
        vld_wrap(K, T.TRUE)
    t = vld_wrap(K, term("p", K.language))
    assert t.type == O


def test_consequence_with_no_premises():
    p = term("p", K.language)
    assert global_consequence(K, [], p) == local_consequence(K, [], p) == vld_wrap(K, p)


def test_global_differs_from_local():
    p, bp = term("p", K.language), term("box p", K.language)
    b = Bounds.of(w=2)
    assert isinstance(check_valid([], global_consequence(K, [p], bp), K.language, b), ValidUpTo)
    assert isinstance(check_valid([], local_consequence(K, [p], bp), K.language, b), CountermodelWitness)


def test_s5u_reflexivity_without_frame_axioms():
    s5u = catalog("S5U")
    goal = vld_wrap(s5u, term("imp (boxu p) p", s5u.language))
    assert isinstance(check_valid([], goal, s5u.language, Bounds.of(w=3)), ValidUpTo)


def test_kt_needs_its_frame_axiom():
    kt = catalog("KT")
    goal = vld_wrap(kt, translate(parse_modal("box p => p"), kt))
    assert isinstance(check_valid(list(kt.frame_axioms), goal, kt.language, Bounds.of(w=3)), ValidUpTo)
    assert isinstance(check_valid([], goal, kt.language, Bounds.of(w=3)), CountermodelWitness)


def test_stt_from_equality():
    report = stt_from_equality_check(Bounds.of(w=3))
    assert report and all(report.values())


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_morphism_coherence(seed):
    # evaluating the image in the encoded model agrees with native Kripke truth
    rng = random.Random(seed)
    f = random_modal(rng, depth=3, atoms=("p", "q"))
    n = rng.randint(1, 3)
    rel = {(x, y) for x in range(n) for y in range(n) if rng.random() < 0.4}
    val = {a: {x for x in range(n) if rng.random() < 0.5} for a in ("p", "q")}
    m = KripkeModel.make(n, {1: rel}, val)
    table = eval_term(translate(f, K), encode(m, K))
    assert [table[x] for x in range(n)] == [kripke_eval(f, m, x) for x in range(n)]
