"""Language properties of derived signatures, checked on random populations.

The counted runners are shared with the acceptance suite."""

import itertools
import random

from franca import term as T
from franca.models import eval_term
from franca.random_terms import random_closed, random_derived, random_model, random_origin
from franca.typesig import O, W, check_derived, fn, is_extension, restrict, sig_union

WO = fn(W, O)
TYPES = [O, WO, fn(WO, WO), fn(W, W, O)]


def _terms(rng, sig, count, depth=3):
    out = []
    for _ in range(count * 3):
        t = random_closed(rng, sig, rng.choice(TYPES), depth)
        if t is not None:
            out.append(t)
        if len(out) == count:
            break
    return out


def check_unfold_lands_in_origin(rng, origin, d):
    """Derived terms unfold into the origin language, and the union generates
    nothing the origin cannot."""
    for t in _terms(rng, sig_union(origin, d), 5):
        u = T.unfold(t, d)
        assert T.in_language(u, origin)
        assert T.beta_normalize(u) == u


def check_extension_same_language(rng, origin):
    d = random_derived(rng, origin, identity_all=True)
    assert is_extension(d, origin)
    for t in _terms(rng, origin, 5):
        assert T.in_derived_language(t, d) == T.in_language(t, origin) is True


def check_strict_fragment(rng, origin, d):
    """A derived signature that is not an extension misses some origin term."""
    if is_extension(d, origin):
        return None
    candidates = [T.Const(s) for s in sorted(origin.symbols, key=lambda s: s.name)]
    candidates += _terms(rng, origin, 20, depth=2)
    for t in candidates:
        if not T.in_derived_language(t, d):
            return t
    raise AssertionError(f"no origin term outside the fragment of {sorted(d.names())}")


def check_subsets_derived(rng, origin, d):
    names = sorted(d.names())
    for k in range(len(names) + 1):
        for sub in itertools.combinations(names, k):
            assert check_derived(restrict(d, sub), origin)


def run_language_suite(n_sigs=100, seed=0):
    """Returns (signatures checked, strict-fragment witnesses found)."""
    rng = random.Random(seed)
    witnesses = 0
    for _ in range(n_sigs):
        origin = random_origin(rng)
        d = random_derived(rng, origin)
        check_unfold_lands_in_origin(rng, origin, d)
        check_extension_same_language(rng, origin)
        witnesses += check_strict_fragment(rng, origin, d) is not None
        check_subsets_derived(rng, origin, d)
    return n_sigs, witnesses


def run_coherence_suite(n_terms=1000, seed=0):
    """eval of a derived term equals eval of its unfolding; returns the count."""
    rng = random.Random(seed)
    done = 0
    while done < n_terms:
        origin = random_origin(rng)
        d = random_derived(rng, origin)
        for _ in range(10):
            t = random_closed(rng, sig_union(origin, d), O, depth=3)
            if t is None:
                continue
            for _ in range(3):
                m = random_model(rng, origin, {1: rng.randint(1, 3), 2: rng.randint(1, 2)})
                assert eval_term(t, m, sig=d) == eval_term(T.unfold(t, d), m)
            done += 1
    return done


def test_language_properties_on_100_signatures():
    n, witnesses = run_language_suite(100, seed=1)
    assert n == 100 and witnesses > 0


def test_unfold_eval_coherence_1000_terms():
    assert run_coherence_suite(1000, seed=2) >= 1000
