import random

import pytest
from hypothesis import given, settings, strategies as st

from franca import term as T
from franca.embed import catalog, host_signature, vld_wrap
from franca.models import (
    Bounds,
    CountermodelWitness,
    FiniteModel,
    SatisfiableWitness,
    SearchSpaceOverflow,
    Timeout,
    UnknownCondition,
    UnsatUpTo,
    ValidUpTo,
    WrongType,
    check_satisfiable,
    check_valid,
    enumerate_models,
    eval_term,
    frame_condition,
    holds,
)
from franca.parse import term
from franca.random_terms import random_closed, random_origin
from franca.typesig import O, W, fn, parameter, sig_union

from oracles import function_space_size

WO = fn(W, O)
REL = fn(W, W, O)
K = catalog("K", rels=("aRel",), props=("p", "q", "CEisTerminated"))
KSIG = K.language


def model(cards, **dens):
    return FiniteModel(KSIG, cards, dens)


def at(f, m, x):
    return eval_term(f, m)[x]


def test_eval_examples():
    m = model({1: 2}, p=(True, False), q=(False, False), aRel=((False,) * 2,) * 2, CEisTerminated=(False, False))
    f = term("and p (not p)", KSIG)
    assert at(f, m, 0) is False and at(f, m, 1) is False
    assert eval_term(vld_wrap(K, term("top", KSIG)), m) is True
    m1 = model({1: 1}, p=(False,), q=(False,), aRel=((True,),), CEisTerminated=(True,))
    assert at(term("dia CEisTerminated", KSIG), m1, 0) is True


def test_enumeration_counts():
    sig = host_signature([parameter("p", O)])
    assert len(list(enumerate_models(sig))) == 2
    sig = host_signature([parameter("q", WO)])
    assert len(list(enumerate_models(sig, Bounds.of(w=2)))) == 1 * 2 + function_space_size(2, 2)
    sig = host_signature([parameter("R", REL)])
    at_two = [m for m in enumerate_models(sig, Bounds.of(w=2)) if m.cards[1] == 2]
    assert len(at_two) == function_space_size(4, 2) == 16
    assert len({str(m) for m in at_two}) == 16


def test_enumeration_order_is_canonical():
    sig = host_signature([parameter("q", WO)])
    tables = [m.denotations["q"] for m in enumerate_models(sig, Bounds.of(w=2)) if m.cards[1] == 2]
    assert tables == [(False, False), (False, True), (True, False), (True, True)]


def test_overflow():
    sig = host_signature([parameter("N", fn(WO, WO))])
    with pytest.raises(SearchSpaceOverflow):
        list(enumerate_models(sig, Bounds(((1, 3),), ceiling=1000)))


def test_check_satisfiable_and_unsat():
    sig = host_signature([parameter(n, O) for n in ("CEisWrong", "CEisNotDesirable")])
    a22 = term("CEisWrong & (CEisWrong => CEisNotDesirable) & CEisNotDesirable", sig)
    res = check_satisfiable([], a22, sig)
    assert isinstance(res, SatisfiableWitness) and holds(a22, res.model)
    p = host_signature([parameter("p", O)])
    assert isinstance(check_satisfiable([], term("p & !p", p), p), UnsatUpTo)


def test_lfi_no_explosion():
    lfi = catalog("LFI", props=("p",))
    sig = sig_union(lfi.language, catalog("boolean", props=("p",)).language)
    b = Bounds.of(w=1)
    assert isinstance(check_satisfiable([], vld_wrap(lfi, term("and p (pnot p)", sig)), sig, b), SatisfiableWitness)
    assert isinstance(check_satisfiable([], vld_wrap(lfi, term("and p (not p)", sig)), sig, b), UnsatUpTo)


def test_check_valid_records_bounds():
    sig = host_signature([parameter("a", O), parameter("b", O)])
    res = check_valid([], term("a => b => a", sig), sig, Bounds.of(w=3))
    assert isinstance(res, ValidUpTo) and res.verdict == "valid" and res.bounds == Bounds.of(w=3)


def test_frame_conditions():
    rel = K.sig.lookup("aRel")
    chain = ((False, True, False), (False, False, True), (False, False, False))
    m = model({1: 3}, p=(False,) * 3, q=(False,) * 3, CEisTerminated=(False,) * 3, aRel=chain)
    assert eval_term(frame_condition("transitive", rel), m) is False
    assert eval_term(frame_condition("serial", rel), m) is False
    m1 = model({1: 1}, p=(False,), q=(False,), CEisTerminated=(False,), aRel=((True,),))
    assert eval_term(frame_condition("reflexive", rel), m1) is True
    with pytest.raises(UnknownCondition):
        frame_condition("dense", rel)
    with pytest.raises(WrongType):
        frame_condition("reflexive", parameter("p", WO))


def test_axiom4_correspondence():
    f = vld_wrap(K, term("imp (box p) (box (box p))", KSIG))
    trans = frame_condition("transitive", K.sig.lookup("aRel"))
    assert isinstance(check_valid([trans], f, KSIG, Bounds.of(w=3)), ValidUpTo)
    res = check_valid([], f, KSIG, Bounds.of(w=3))
    assert isinstance(res, CountermodelWitness)
    assert eval_term(trans, res.model) is False


def test_countermodel_persists_at_larger_bounds_and_is_deterministic():
    f = vld_wrap(K, term("imp (box p) p", KSIG))
    small = check_valid([], f, KSIG, Bounds.of(w=2))
    big = check_valid([], f, KSIG, Bounds.of(w=3))
    again = check_valid([], f, KSIG, Bounds.of(w=3))
    assert isinstance(small, CountermodelWitness) and isinstance(big, CountermodelWitness)
    assert str(big.model) == str(again.model)


def test_timeout():
    sig = host_signature([parameter("N", fn(WO, WO)), parameter("M", fn(WO, WO))])
    f = term(r"forall x:w->o. N x == M x", sig)
    res = check_satisfiable([], T.neg(T.neg(T.neg(f))), sig, Bounds(((1, 3),), budget_ms=1, ceiling=2 ** 40))
    assert isinstance(res, (Timeout, SatisfiableWitness))


def test_witness_roundtrips_through_json():
    f = vld_wrap(K, term("imp (box p) p", KSIG))
    res = check_valid([], f, KSIG)
    back = FiniteModel.from_json(KSIG, res.model.to_json())
    assert back.denotations == res.model.denotations and not holds(f, back)


# --- properties ----------------------------------------------------------

SEEDS = st.integers(0, 10 ** 6)


@settings(max_examples=60, deadline=None)
@given(SEEDS)
def test_batched_search_agrees_with_scalar_enumeration(seed):
    rng = random.Random(seed)
    origin = random_origin(rng)
    t = random_closed(rng, origin, O, depth=3)
    if t is None:
        return
    bounds = Bounds.of(w=2)
    brute_valid = all(eval_term(t, m) for m in enumerate_models(origin, bounds, [t]))
    res = check_valid([], t, origin, bounds)
    assert isinstance(res, ValidUpTo) == brute_valid
    brute_sat = any(eval_term(t, m) for m in enumerate_models(origin, bounds, [t]))
    assert isinstance(check_satisfiable([], t, origin, bounds), SatisfiableWitness) == brute_sat
