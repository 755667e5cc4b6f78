"""Random typed terms and derived signatures, for property tests.

Everything is driven by an explicit ``random.Random`` so failures replay
from a seed.
"""

from __future__ import annotations

import random
from typing import Optional

from franca import term as T
from franca.embed import host_signature
from franca.typesig import (
    Arrow,
    FunctionalType,
    Mode,
    O,
    Signature,
    SymbolDecl,
    W,
    arg_types,
    derive_signature,
    family_member,
    fn,
    is_rigid,
    parameter,
    result_type,
    sig_union,
)

WO = fn(W, O)
WOWO = fn(WO, WO)

PARAMETER_POOL = (
    parameter("p", WO),
    parameter("q", WO),
    parameter("a", O),
    parameter("R", fn(W, W, O)),
    parameter("N", WOWO),
)


def random_origin(rng: random.Random) -> Signature:
    """Boolean host connectives, Pi/== families and a random parameter set."""
    k = rng.randint(1, len(PARAMETER_POOL))
    return host_signature(rng.sample(PARAMETER_POOL, k))


def _heads(sig: Signature, scope, target: FunctionalType):
    """(head term, argument types) pairs whose result after some arguments is ``target``."""
    out = []
    symbols = sorted(sig.symbols, key=lambda s: s.name)
    for fam, index in (("Pi", W), ("Pi", O), ("==", O), ("==", W)):
        if fam in sig.families:
            symbols.append(family_member(fam, index))
    for s in symbols:
        out.extend(_splits(T.Const(s), s.type, target))
    for depth, (name, typ) in enumerate(reversed(scope)):
        out.extend(_splits(T.Bound(depth, typ, name), typ, target))
    return out


def _splits(head, typ, target):
    args = []
    while True:
        if typ == target:
            yield head, tuple(args)
        if not isinstance(typ, Arrow):
            return
        args.append(typ.dom)
        typ = typ.cod


def random_term(
    rng: random.Random,
    sig: Signature,
    typ: FunctionalType,
    depth: int = 3,
    scope=(),
) -> Optional[T.Term]:
    """A random closed-under-``scope`` term of type ``typ``, or None."""
    scope = list(scope)
    options = _heads(sig, scope, typ)
    if depth <= 0:
        options = [o for o in options if not o[1]]
    rng.shuffle(options)
    can_abstract = isinstance(typ, Arrow) and depth > 0
    if can_abstract and (not options or rng.random() < 0.3):
        name = f"x{len(scope)}"
        body = random_term(rng, sig, typ.cod, depth - 1, scope + [(name, typ.dom)])
        if body is not None:
            return T.Lam(typ.dom, body, name)
    for head, argtypes in options[:4]:
        args = []
        for a in argtypes:
            t = random_term(rng, sig, a, depth - 1, scope)
            if t is None:
                break
            args.append(t)
        else:
            return T.app(head, *args) if args else head
    return None


def random_closed(rng, sig, typ, depth=3, tries=20) -> Optional[T.Term]:
    for _ in range(tries):
        t = random_term(rng, sig, typ, depth)
        if t is not None:
            return t
    return None


DEF_TYPES = (WO, WOWO, fn(WO, WO, WO), O, fn(O, O))


def random_derived(rng: random.Random, origin: Signature, identity_all: bool = False) -> Signature:
    """A derived signature with 1-4 random definitions over ``origin``.

    With ``identity_all`` every origin connective is kept under its own name
    and every parameter is kept, which makes the result an extension."""
    defs = {}
    for i in range(rng.randint(1, 4)):
        d = random_closed(rng, origin, rng.choice(DEF_TYPES))
        if d is not None and not (isinstance(d, T.Const)):
            defs[f"c{i}"] = d
    if not defs:
        defs["c0"] = T.lam("x", O, T.neg(T.Free("x", O)))
    kept = [p.name for p in origin.parameters() if identity_all or rng.random() < 0.5]
    if identity_all:
        for s in origin.connectives():
            defs[s.name] = T.Const(s)
    rigid = is_rigid(origin) and all(T.is_grounded(d) for d in defs.values()) and not kept and rng.random() < 0.5
    mode = Mode.RIGID if rigid else Mode.FLEXIBLE
    families = origin.families if identity_all else ()
    return derive_signature(origin, defs, kept, mode, families)


def random_modal(rng: random.Random, depth: int = 3, atoms=("p", "q")):
    from franca import kripke as K

    if depth == 0 or rng.random() < 0.2:
        return K.Bot() if rng.random() < 0.1 else K.Atom(rng.choice(atoms))
    k = rng.randrange(7)
    sub = lambda: random_modal(rng, depth - 1, atoms)
    if k == 0:
        return K.Neg(sub())
    if k == 1:
        return K.And(sub(), sub())
    if k == 2:
        return K.Or(sub(), sub())
    if k == 3:
        return K.Imp(sub(), sub())
    if k in (4, 5):
        return K.Box(1, sub())
    return K.Dia(1, sub())


def union_with_origin(origin: Signature, derived: Signature) -> Signature:
    return sig_union(origin, derived)


def random_model(rng: random.Random, sig: Signature, cards: dict):
    """A uniformly random interpretation of the parameters of ``sig``."""
    from franca.models import FiniteModel, type_size, value_at

    cards = {**{i: 1 for i in range(1, 3)}, **cards}
    dens = {}
    for p in sorted(sig.parameters(), key=lambda p: p.name):
        dens[p.name] = value_at(p.type, rng.randrange(type_size(p.type, cards)), cards)
    return FiniteModel(sig, cards, dens)


__all__ = [
    "random_origin", "random_term", "random_closed", "random_derived", "random_modal",
    "union_with_origin", "random_model", "PARAMETER_POOL", "SymbolDecl", "arg_types", "result_type",
]
