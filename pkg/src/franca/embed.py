"""Shallow semantical embeddings: the catalog of derived signatures, signature
morphisms, the induced translation and the validity wrapper ``vld``.

Object-level formulas of world-lifted logics have type ``w->o`` (``wo``);
``vld φ = Pi[w] φ`` reads "φ is true at every world".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from franca import term as T
from franca.models import Bounds, FiniteModel, card_vectors, eval_term
from franca.typesig import (
    Arrow,
    E,
    FAMILIES,
    FunctionalType,
    Mode,
    O,
    Signature,
    SymbolDecl,
    W,
    WO,
    arity_to_type,
    derive_signature,
    family_member,
    fn,
    parameter,
    show_type,
    sig_union,
    type_substitute,
)


class EmbedError(Exception):
    pass


class UnknownCatalogEntry(EmbedError):
    pass


class UnmappedSymbol(EmbedError):
    pass


class MorphismError(EmbedError):
    pass


# ---------------------------------------------------------------------------
# host signatures

REL = fn(W, W, O)
WOWO = fn(WO, WO)
WOWOWO = fn(WO, WO, WO)


def host_signature(extra: Sequence[SymbolDecl] = ()) -> Signature:
    """Simple type theory: T, F, !, &, |, => plus the Pi and == families."""
    return Signature.primitive(T.BOOLEAN_SYMBOLS, FAMILIES).with_symbols(extra)


def equality_signature(extra: Sequence[SymbolDecl] = ()) -> Signature:
    """Minimal simple type theory: only the equality family."""
    return Signature.primitive(extra, ("==",))


def relational_signature(rels=("R1",), props=("p", "q")) -> Signature:
    return host_signature([parameter(r, REL) for r in rels] + [parameter(p, WO) for p in props])


def neighborhood_signature(props=("p", "q"), unary=("N1_1",), binary=()) -> Signature:
    """Parameters ``N<k>_1 : wo->wo`` and ``N<k>_2 : wo->wo->wo``."""
    return host_signature(
        [parameter(p, WO) for p in props]
        + [parameter(n, WOWO) for n in unary]
        + [parameter(n, WOWOWO) for n in binary]
    )


# ---------------------------------------------------------------------------
# world-lifted definitions, as closed terms of the host language

def _w(name="w"):
    return T.Free(name, W)


def _phi(name="phi"):
    return T.Free(name, WO)


def lifted_boolean_defs() -> dict:
    phi, psi, w = _phi("phi"), _phi("psi"), _w()

    def binary(op):
        return T.lams([("phi", WO), ("psi", WO), ("w", W)], T.app(op, T.App(phi, w), T.App(psi, w)))

    return {
        "not": T.lams([("phi", WO), ("w", W)], T.neg(T.App(phi, w))),
        "and": binary(T.AND),
        "or": binary(T.OR),
        "imp": binary(T.IMP),
        "top": T.lam("w", W, T.TRUE),
        "bot": T.lam("w", W, T.FALSE),
    }


def box_def(rel: T.Term) -> T.Term:
    phi, w, v = _phi(), _w("w"), _w("v")
    return T.lams([("phi", WO), ("w", W)], T.forall("v", W, T.implies(T.app(rel, w, v), T.App(phi, v))))


def dual_def(box: T.Term, not_: T.Term) -> T.Term:
    """``λφ. not (box (not φ))`` with the definitions inlined (redexes kept)."""
    phi = _phi()
    return T.lam("phi", WO, T.App(not_, T.App(box, T.App(not_, phi))))


def universal_box_def() -> T.Term:
    phi, v = _phi(), _w("v")
    return T.lams([("phi", WO), ("w", W)], T.forall("v", W, T.App(phi, v)))


def rel_const(name: str) -> T.Const:
    return T.Const(parameter(name, REL))


def vld_term() -> T.Term:
    return T.lam("phi", WO, T.App(T.pi(W), _phi()))


# ---------------------------------------------------------------------------
# signature morphisms

@dataclass(frozen=True)
class SignatureMorphism:
    """``type_map`` is ``("arity", σ)`` or ``("subst", α, β)``; ``source`` maps
    each source symbol to its arity (for propositional sources) or type."""

    type_map: tuple
    source: tuple  # ((name, arity-or-type), ...)
    symbol_map: tuple  # ((name, Term), ...)

    def map_type(self, t):
        if self.type_map[0] == "arity":
            return arity_to_type(t, self.type_map[1])
        return type_substitute(t, self.type_map[1], self.type_map[2])

    def image(self, name: str) -> T.Term:
        for n, t in self.symbol_map:
            if n == name:
                return t
        raise UnmappedSymbol(name)

    def validate(self) -> None:
        mapped = dict(self.symbol_map)
        for name, st in self.source:
            if name not in mapped:
                raise MorphismError(f"source symbol {name!r} is not mapped")
            want = self.map_type(st)
            if mapped[name].type != want:
                raise MorphismError(
                    f"{name!r} maps to a term of type {show_type(mapped[name].type)}, expected {show_type(want)}"
                )

    def extend(self, extra: dict, source_extra: dict) -> "SignatureMorphism":
        return SignatureMorphism(
            self.type_map,
            self.source + tuple(source_extra.items()),
            self.symbol_map + tuple(extra.items()),
        )


@dataclass(frozen=True)
class Embedding:
    name: str
    sig: Signature
    host: Signature
    vld: T.Term
    morphism: Optional[SignatureMorphism] = None
    frame_axioms: tuple = ()
    frame_names: tuple = ()
    rels: tuple = ()
    props: tuple = ()
    unverified: bool = False
    note: str = ""

    @property
    def language(self) -> Signature:
        """Symbols usable in formulas: the derived connectives plus the host."""
        return sig_union(self.sig, self.host)

    def connective(self, name: str) -> T.Const:
        s = self.sig.lookup(name)
        if s is None:
            raise UnmappedSymbol(f"{self.name} has no connective {name!r}")
        return T.Const(s)


# ---------------------------------------------------------------------------
# catalog

K_FAMILY = {
    "K": (),
    "KT": ("reflexive",),
    "K4": ("transitive",),
    "S4": ("reflexive", "transitive"),
    "S5": ("reflexive", "symmetric", "transitive"),
}

CATALOG = (
    "boolean-lifted", "K", "K4", "KT", "S4", "S5", "S5U", "MLK-bimodal",
    "MDL", "DDL", "CJDDL-signature", "LFI", "QML", "STT-from-equality",
)
ALIASES = {"SDL": "MDL", "MLK": "MLK-bimodal", "CJDDL": "CJDDL-signature", "boolean": "boolean-lifted"}


def catalog(name: str, rels: Optional[Sequence[str]] = None, props: Sequence[str] = ("p", "q")) -> Embedding:
    """Look up a catalog embedding; ``rels`` renames accessibility parameters."""
    name = ALIASES.get(name, name)
    props = tuple(props)
    if name == "boolean-lifted":
        origin = relational_signature((), props)
        sig = derive_signature(origin, lifted_boolean_defs(), props, Mode.RIGID)
        return Embedding(name, sig, origin, vld_term(), ml_morphism(sig, props, modal=False), props=props)
    if name in K_FAMILY:
        rel = (tuple(rels) if rels else ("R1",))[0]
        return _k_family(name, rel, props)
    if name == "S5U":
        origin = relational_signature((), props)
        defs = dict(lifted_boolean_defs())
        defs["boxu"] = universal_box_def()
        sig = derive_signature(origin, defs, props, Mode.RIGID)
        return Embedding(name, sig, origin, vld_term(), props=props)
    if name == "MLK-bimodal":
        r1, r2 = tuple(rels) if rels else ("R1", "R2")
        origin = relational_signature((r1, r2), props)
        sig = derive_signature(origin, _mlk_defs(r1, r2), props, Mode.FLEXIBLE)
        morph = _ml_base_morphism(sig, props).extend(
            {"box1": T.Const(sig.lookup("box_a")), "dia1": T.Const(sig.lookup("dia_a")),
             "box2": T.Const(sig.lookup("box_p")), "dia2": T.Const(sig.lookup("dia_p"))},
            {"box1": 1, "dia1": 1, "box2": 1, "dia2": 1},
        )
        return Embedding(name, sig, origin, vld_term(), morph, rels=(r1, r2), props=props)
    if name == "MDL":
        origin = neighborhood_signature(props, ("N1_1",))
        defs = dict(lifted_boolean_defs())
        defs["O"] = T.lam("phi", WO, T.App(T.Const(parameter("N1_1", WOWO)), _phi()))
        sig = derive_signature(origin, defs, props, Mode.FLEXIBLE)
        return Embedding(name, sig, origin, vld_term(), props=props, note="also known as SDL")
    if name == "DDL":
        r1, r2 = tuple(rels) if rels else ("R1", "R2")
        origin = sig_union(relational_signature((r1, r2), props), neighborhood_signature(props, (), ("N1_2",)))
        sig = derive_signature(origin, _ddl_defs(r1, r2), props, Mode.FLEXIBLE)
        return Embedding(name, sig, origin, vld_term(), rels=(r1, r2), props=props)
    if name == "CJDDL-signature":
        ddl = catalog("DDL", rels, props)
        s5u = catalog("S5U", None, props)
        mlk = catalog("MLK-bimodal", rels, props)
        sig = sig_union(ddl.sig, sig_union(s5u.sig, mlk.sig))
        host = sig_union(ddl.host, sig_union(s5u.host, mlk.host))
        return Embedding(name, sig, host, vld_term(), rels=ddl.rels, props=props, unverified=True,
                         note="signature only; the frame constraints are not modelled")
    if name == "LFI":
        origin = neighborhood_signature(props, ("N1_1", "N2_1"))
        sig = derive_signature(origin, _lfi_defs(), props, Mode.FLEXIBLE)
        return Embedding(name, sig, origin, vld_term(), props=props)
    if name == "QML":
        rel = (tuple(rels) if rels else ("R1",))[0]
        k = _k_family("K", rel, props)
        fol = lifted_fol()
        sig = sig_union(k.sig, fol.sig)
        host = sig_union(k.host, fol.host)
        return Embedding(name, sig, host, vld_term(), fol.morphism, rels=(rel,), props=props)
    if name == "STT-from-equality":
        origin = equality_signature()
        sig = derive_signature(origin, equality_defs(), (), Mode.RIGID)
        return Embedding(name, sig, origin, T.lam("x", O, T.Free("x", O)))
    raise UnknownCatalogEntry(name)


def _k_family(name: str, rel: str, props) -> Embedding:
    origin = relational_signature((rel,), props)
    b = lifted_boolean_defs()
    defs = dict(b)
    defs["box"] = box_def(rel_const(rel))
    defs["dia"] = dual_def(defs["box"], b["not"])
    sig = derive_signature(origin, defs, props + (rel,), Mode.FLEXIBLE)
    frames = K_FAMILY[name]
    from franca.models import frame_condition

    axioms = tuple(frame_condition(f, rel_const(rel)) for f in frames)
    morph = ml_morphism(sig, props)
    return Embedding(name, sig, origin, vld_term(), morph, axioms, frames, (rel,), props)


def _mlk_defs(r1: str, r2: str) -> dict:
    b = lifted_boolean_defs()
    defs = dict(b)
    del defs["top"], defs["bot"]
    defs["box_a"] = box_def(rel_const(r1))
    defs["box_p"] = box_def(rel_const(r2))
    defs["dia_a"] = dual_def(defs["box_a"], b["not"])
    defs["dia_p"] = dual_def(defs["box_p"], b["not"])
    return defs


def _ddl_defs(r1: str, r2: str) -> dict:
    b = lifted_boolean_defs()
    defs = {k: b[k] for k in ("not", "and", "or", "imp")}
    n = T.Const(parameter("N1_2", WOWOWO))
    phi, psi, w = _phi("phi"), _phi("psi"), _w()
    defs["Od"] = T.lams([("psi", WO), ("phi", WO)], T.app(n, phi, psi))

    def monadic(rel):
        return T.lams([("phi", WO), ("w", W)], T.App(T.app(n, T.App(rel_const(rel), w), phi), w))

    defs["Oa"] = monadic(r1)
    defs["Op"] = monadic(r2)
    return defs


def _lfi_defs() -> dict:
    b = lifted_boolean_defs()
    n1 = T.Const(parameter("N1_1", WOWO))
    n2 = T.Const(parameter("N2_1", WOWO))
    phi = _phi()
    defs = {k: b[k] for k in ("and", "or", "imp")}
    defs["pnot"] = T.lam("phi", WO, T.app(b["imp"], phi, T.App(n1, phi)))
    defs["circ"] = T.lam("phi", WO, T.app(
        b["and"],
        T.App(b["not"], T.app(b["and"], phi, T.App(n1, phi))),
        T.App(n2, phi),
    ))
    return defs


def lifted_fol(individual_types=(E,)) -> Embedding:
    """World-lifted first-order logic: quantifier ``all[e]`` and equality ``eq[e]``."""
    origin = host_signature()
    defs = dict(lifted_boolean_defs())
    source = {"neg": fn(O, O), "and": fn(O, O, O), "or": fn(O, O, O), "imp": fn(O, O, O)}
    images = {}
    for a in individual_types:
        tag = show_type(a)
        big_phi = T.Free("Phi", fn(a, WO))
        x, w = T.Free("x", a), _w()
        defs[f"all[{tag}]"] = T.lams(
            [("Phi", fn(a, WO)), ("w", W)], T.forall("x", a, T.app(big_phi, x, w)))
        y = T.Free("y", a)
        defs[f"eq[{tag}]"] = T.lams([("x", a), ("y", a), ("w", W)], T.equals(x, y))
        source[f"Pi[{tag}]"] = family_member("Pi", a).type
        source[f"==[{tag}]"] = family_member("==", a).type
    sig = derive_signature(origin, defs, (), Mode.RIGID)
    for name in ("and", "or", "imp"):
        images[name] = T.Const(sig.lookup(name))
    images["neg"] = T.Const(sig.lookup("not"))
    for a in individual_types:
        tag = show_type(a)
        images[f"Pi[{tag}]"] = T.Const(sig.lookup(f"all[{tag}]"))
        images[f"==[{tag}]"] = T.Const(sig.lookup(f"eq[{tag}]"))
    morph = SignatureMorphism(("subst", O, WO), tuple(source.items()), tuple(images.items()))
    morph.validate()
    return Embedding("lifted-FOL", sig, origin, vld_term(), morph)


def lift_symbol(s: SymbolDecl) -> SymbolDecl:
    """A first-order parameter moved into the world-lifted setting."""
    return SymbolDecl(s.name, type_substitute(s.type, O, WO), s.kind)


def equality_defs() -> dict:
    """Connectives of simple type theory defined from equality alone."""
    x, y = T.Free("x", O), T.Free("y", O)
    ident = T.lam("x", O, x)
    true = T.equals(ident, ident)
    false = T.equals(ident, T.lam("x", O, true))
    g = T.Free("g", fn(O, O, O))
    and_ = T.lams([("x", O), ("y", O)], T.equals(
        T.lam("g", fn(O, O, O), T.app(g, true, true)),
        T.lam("g", fn(O, O, O), T.app(g, x, y)),
    ))
    not_ = T.lam("x", O, T.equals(x, false))
    or_ = T.lams([("x", O), ("y", O)], T.App(not_, T.app(and_, T.App(not_, x), T.App(not_, y))))
    imp_ = T.lams([("x", O), ("y", O)], T.equals(x, T.app(and_, x, y)))
    defs = {"T_eq": true, "F_eq": false, "not_eq": not_, "and_eq": and_, "or_eq": or_, "imp_eq": imp_}
    for a in (O, W):
        p = T.Free("P", Arrow(a, O))
        defs[f"Pi_eq_{show_type(a)}"] = T.lam("P", Arrow(a, O), T.equals(p, T.lam("x", a, true)))
    return defs


EQUALITY_PRIMITIVES = {
    "T_eq": T.TRUE, "F_eq": T.FALSE, "not_eq": T.NOT, "and_eq": T.AND, "or_eq": T.OR, "imp_eq": T.IMP,
    "Pi_eq_o": T.pi(O), "Pi_eq_w": T.pi(W),
}


def stt_from_equality_check(bounds: Bounds = Bounds.of(w=3)) -> dict:
    """Compare each equality-based definition with the primitive it replaces,
    pointwise, in every model up to ``bounds``.  Returns name -> bool."""
    defs = equality_defs()
    sig = equality_signature()
    report = {}
    for name, d in sorted(defs.items()):
        prim = EQUALITY_PRIMITIVES[name]
        ok = True
        for cards in card_vectors([1], bounds):
            m = FiniteModel(sig, cards, {})
            if eval_term(d, m) != eval_term(prim, m):
                ok = False
        report[name] = ok
    return report


# ---------------------------------------------------------------------------
# the modal source language

def _ml_base_morphism(sig: Signature, props) -> SignatureMorphism:
    source = {"neg": 1, "and": 2, "or": 2}
    images = {
        "neg": T.Const(sig.lookup("not")),
        "and": T.Const(sig.lookup("and")),
        "or": T.Const(sig.lookup("or")),
    }
    not_, or_ = images["neg"], images["or"]
    phi, psi = _phi("phi"), _phi("psi")
    source["imp"] = 2
    images["imp"] = T.lams([("phi", WO), ("psi", WO)], T.app(or_, T.App(not_, phi), psi))
    for p in props:
        source[p] = 0
        images[p] = T.Const(sig.lookup(p))
    return SignatureMorphism(("arity", WO), tuple(source.items()), tuple(images.items()))


def ml_morphism(sig: Signature, props, modal: bool = True) -> SignatureMorphism:
    m = _ml_base_morphism(sig, props)
    extra, src = {}, {}
    if sig.lookup("bot") is not None:
        extra["bot"] = T.Const(sig.lookup("bot"))
        src["bot"] = 0
    if modal:
        extra["box1"] = T.Const(sig.lookup("box"))
        extra["dia1"] = T.Const(sig.lookup("dia"))
        src.update({"box1": 1, "dia1": 1})
    m = m.extend(extra, src)
    m.validate()
    return m


def translate(src, emb: Embedding) -> T.Term:
    """Homomorphic image of a modal formula; beta-normal, derived connectives kept."""
    from franca import kripke as K

    if emb.morphism is None:
        raise UnmappedSymbol(f"{emb.name} has no source language")
    m = emb.morphism

    def image(name):
        try:
            return m.image(name)
        except UnmappedSymbol:
            raise UnmappedSymbol(f"{name!r} is not mapped by {emb.name}") from None

    def tr(f):
        if isinstance(f, K.Atom):
            return image(f.name)
        if isinstance(f, K.Bot):
            return image("bot")
        if isinstance(f, K.Neg):
            return T.App(image("neg"), tr(f.sub))
        if isinstance(f, K.Box):
            return T.App(image(f"box{f.index}"), tr(f.sub))
        if isinstance(f, K.Dia):
            return T.App(image(f"dia{f.index}"), tr(f.sub))
        op = {K.And: "and", K.Or: "or", K.Imp: "imp"}[type(f)]
        return T.app(image(op), tr(f.left), tr(f.right))

    return T.beta_normalize(tr(src))


def vld_wrap(emb: Embedding, t: T.Term) -> T.Term:
    dom = emb.vld.type.dom
    if t.type != dom:
        raise T.TypeMismatch(
            f"vld expects {show_type(dom)}, got {show_type(t.type)}", expected=dom, found=t.type)
    return T.beta_normalize(T.App(emb.vld, t))


def global_consequence(emb: Embedding, premises, concl) -> T.Term:
    """(vld p1 & ... & vld pn) => vld c"""
    c = vld_wrap(emb, concl)
    if not premises:
        return c
    return T.implies(T.conj(*[vld_wrap(emb, p) for p in premises]), c)


def local_consequence(emb: Embedding, premises, concl) -> T.Term:
    """vld (p1 imp (... imp (pn imp c)))"""
    imp = _object_imp(emb)
    body = concl
    for p in reversed(list(premises)):
        body = T.app(imp, p, body)
    return vld_wrap(emb, body)


def _object_imp(emb: Embedding) -> T.Term:
    s = emb.sig.lookup("imp")
    if s is not None:
        return T.Const(s)
    return lifted_boolean_defs()["imp"]
