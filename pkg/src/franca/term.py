"""Simply typed terms over a signature.

Bound variables are de Bruijn indices with a name hint used only for
printing, so structural equality is alpha-equivalence.  Free variables are
named.  Every node knows its type; ill-typed applications cannot be built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from franca.typesig import (
    Arrow,
    FunctionalType,
    Kind,
    O,
    Signature,
    SymbolDecl,
    family_member,
    fn,
    show_type,
    split_family_name,
)


class TermError(Exception):
    pass


class TypeMismatch(TermError):
    def __init__(self, message: str, expected=None, found=None, position=None):
        super().__init__(message)
        self.expected = expected
        self.found = found
        self.position = position


class UnknownSymbol(TermError):
    pass


class NotDerivedSignature(TermError):
    pass


# ---------------------------------------------------------------------------
# nodes

@dataclass(frozen=True)
class Free:
    name: str
    type: FunctionalType


@dataclass(frozen=True)
class Bound:
    index: int
    type: FunctionalType
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Const:
    sym: SymbolDecl

    @property
    def type(self) -> FunctionalType:
        return self.sym.type

    @property
    def name(self) -> str:
        return self.sym.name


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    type: FunctionalType = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        ft = self.fun.type
        if not isinstance(ft, Arrow):
            raise TypeMismatch(
                f"cannot apply {show(self.fun)} of type {show_type(ft)}",
                expected="function type", found=ft,
            )
        if ft.dom != self.arg.type:
            raise TypeMismatch(
                f"{show(self.fun)} expects {show_type(ft.dom)}, got {show(self.arg)} : {show_type(self.arg.type)}",
                expected=ft.dom, found=self.arg.type,
            )
        object.__setattr__(self, "type", ft.cod)


@dataclass(frozen=True)
class Lam:
    var_type: FunctionalType
    body: "Term"
    hint: str = field(default="x", compare=False)
    type: FunctionalType = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "type", Arrow(self.var_type, self.body.type))


Term = Union[Free, Bound, Const, App, Lam]


# ---------------------------------------------------------------------------
# construction helpers

def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def abstract(t: Term, name: str, typ: FunctionalType, depth: int = 0) -> Term:
    """Replace the free variable ``name : typ`` by the bound index ``depth``."""
    if isinstance(t, Free):
        if t.name == name:
            if t.type != typ:
                raise TypeMismatch(f"variable {name} used at {show_type(t.type)} and {show_type(typ)}")
            return Bound(depth, typ, name)
        return t
    if isinstance(t, App):
        return App(abstract(t.fun, name, typ, depth), abstract(t.arg, name, typ, depth))
    if isinstance(t, Lam):
        return Lam(t.var_type, abstract(t.body, name, typ, depth + 1), t.hint)
    return t


def lam(name: str, typ: FunctionalType, body: Term) -> Lam:
    return Lam(typ, abstract(body, name, typ), name)


def lams(binders, body: Term) -> Term:
    for name, typ in reversed(binders):
        body = lam(name, typ, body)
    return body


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if isinstance(t, Bound):
        return Bound(t.index + d, t.type, t.hint) if t.index >= cutoff else t
    if isinstance(t, App):
        return App(shift(t.fun, d, cutoff), shift(t.arg, d, cutoff))
    if isinstance(t, Lam):
        return Lam(t.var_type, shift(t.body, d, cutoff + 1), t.hint)
    return t


def _subst(t: Term, value: Term, depth: int) -> Term:
    if isinstance(t, Bound):
        if t.index == depth:
            return shift(value, depth) if depth else value
        if t.index > depth:
            return Bound(t.index - 1, t.type, t.hint)
        return t
    if isinstance(t, App):
        return App(_subst(t.fun, value, depth), _subst(t.arg, value, depth))
    if isinstance(t, Lam):
        return Lam(t.var_type, _subst(t.body, value, depth + 1), t.hint)
    return t


def instantiate(f: Lam, value: Term) -> Term:
    """Body of ``f`` with its bound variable replaced by ``value``."""
    if value.type != f.var_type:
        raise TypeMismatch("argument type mismatch", expected=f.var_type, found=value.type)
    return _subst(f.body, value, 0)


def open_lam(f: Lam, name: str) -> Term:
    return instantiate(f, Free(name, f.var_type))


# ---------------------------------------------------------------------------
# normalization

def beta_normalize(t: Term) -> Term:
    if isinstance(t, App):
        f = beta_normalize(t.fun)
        if isinstance(f, Lam):
            return beta_normalize(instantiate(f, t.arg))
        return App(f, beta_normalize(t.arg))
    if isinstance(t, Lam):
        return Lam(t.var_type, beta_normalize(t.body), t.hint)
    return t


def beta_step(t: Term) -> Optional[Term]:
    """One leftmost-outermost beta step, or None if normal."""
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return instantiate(t.fun, t.arg)
        f = beta_step(t.fun)
        if f is not None:
            return App(f, t.arg)
        a = beta_step(t.arg)
        return None if a is None else App(t.fun, a)
    if isinstance(t, Lam):
        b = beta_step(t.body)
        return None if b is None else Lam(t.var_type, b, t.hint)
    return None


def redexes(t: Term, path=()):
    """Paths (tuples of 'f'/'a'/'b') to every beta-redex in ``t``."""
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            yield path
        yield from redexes(t.fun, path + ("f",))
        yield from redexes(t.arg, path + ("a",))
    elif isinstance(t, Lam):
        yield from redexes(t.body, path + ("b",))


def contract_at(t: Term, path) -> Term:
    if not path:
        assert isinstance(t, App) and isinstance(t.fun, Lam)
        return instantiate(t.fun, t.arg)
    head, rest = path[0], path[1:]
    if head == "f":
        return App(contract_at(t.fun, rest), t.arg)
    if head == "a":
        return App(t.fun, contract_at(t.arg, rest))
    return Lam(t.var_type, contract_at(t.body, rest), t.hint)


def eta_reduce(t: Term) -> Term:
    """Optional post-pass: contract ``\\x. f x`` where x is not free in f."""
    if isinstance(t, App):
        return App(eta_reduce(t.fun), eta_reduce(t.arg))
    if isinstance(t, Lam):
        body = eta_reduce(t.body)
        if (isinstance(body, App) and isinstance(body.arg, Bound) and body.arg.index == 0
                and 0 not in _loose(body.fun)):
            return shift(body.fun, -1)
        return Lam(t.var_type, body, t.hint)
    return t


def _loose(t: Term, depth: int = 0) -> set:
    if isinstance(t, Bound):
        return {t.index - depth} if t.index >= depth else set()
    if isinstance(t, App):
        return _loose(t.fun, depth) | _loose(t.arg, depth)
    if isinstance(t, Lam):
        return _loose(t.body, depth + 1)
    return set()


# ---------------------------------------------------------------------------
# inspection

def subterms(t: Term):
    yield t
    if isinstance(t, App):
        yield from subterms(t.fun)
        yield from subterms(t.arg)
    elif isinstance(t, Lam):
        yield from subterms(t.body)


def free_vars(t: Term) -> set:
    return {s.name for s in subterms(t) if isinstance(s, Free)}


def constants(t: Term) -> set:
    return {s.sym for s in subterms(t) if isinstance(s, Const)}


def parameters_of(t: Term) -> set:
    return {c for c in constants(t) if c.is_parameter}


def is_closed(t: Term) -> bool:
    return not free_vars(t) and not _loose(t)


def is_grounded(t: Term) -> bool:
    return not parameters_of(t)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def types_in(t: Term) -> set:
    return {s.type for s in subterms(t)} | {s.var_type for s in subterms(t) if isinstance(s, Lam)}


def in_language(t: Term, sig: Signature) -> bool:
    """Every constant of ``t`` is declared in ``sig`` (derived ones atomically)."""
    return all(c in sig for c in constants(t))


def in_derived_language(t: Term, derived: Signature) -> bool:
    """Is ``t`` generated by the grammar whose atoms are the defining terms
    of ``derived`` (plus its parameters and variables)?

    This reads a derived connective as *being* its closed defining term, so
    membership is decided over the origin language without unfolding.
    """
    atoms = {d for _, d in derived.defs}
    params = derived.parameters()

    def member(s: Term) -> bool:
        if s in atoms:
            return True
        if isinstance(s, (Free, Bound)):
            return True
        if isinstance(s, Const):
            # parameters, and members of families kept by identity
            return s.sym in params or (s.sym not in derived.symbols and s.sym in derived)
        if isinstance(s, App):
            return member(s.fun) and member(s.arg)
        return member(s.body)

    return member(t)


# ---------------------------------------------------------------------------
# unfolding derived connectives

def replace_consts(t: Term, table: dict) -> Term:
    if isinstance(t, Const):
        return table.get(t.sym.name, t)
    if isinstance(t, App):
        return App(replace_consts(t.fun, table), replace_consts(t.arg, table))
    if isinstance(t, Lam):
        return Lam(t.var_type, replace_consts(t.body, table), t.hint)
    return t


def _proper_defs(sig: Signature) -> dict:
    return {
        name: d for name, d in sig.defs
        if not (isinstance(d, Const) and d.sym.name == name)
    }


def unfold(t: Term, sig: Signature) -> Term:
    """Rewrite the derived connectives of ``sig`` to their definitions."""
    if not sig.is_derived:
        raise NotDerivedSignature("signature is primitive; nothing to unfold")
    defs = _proper_defs(sig)
    table = {}
    for c in constants(t):
        d = defs.get(c.name)
        if d is not None and d.type == c.type:
            table[c.name] = d
    return beta_normalize(replace_consts(t, table))


def unfold_fully(t: Term, sig: Signature) -> Term:
    """Unfold along the whole provenance chain of ``sig``; primitive sigs
    leave ``t`` beta-normalized but otherwise unchanged."""
    t = beta_normalize(t)
    while sig is not None and sig.is_derived:
        t = unfold(t, sig)
        sig = sig.origin
    return t


def definition_table(sig: Optional[Signature]) -> dict:
    """name -> definition for every derived connective along the chain."""
    table: dict = {}
    while sig is not None and sig.is_derived:
        for name, d in _proper_defs(sig).items():
            table.setdefault(name, d)
        sig = sig.origin
    return table


# ---------------------------------------------------------------------------
# printing

INFIX = {"&": 3, "|": 2, "=>": 1}


def _fresh(hint: str, taken: set) -> str:
    name = hint or "x"
    while name in taken:
        name += "'"
    return name


def show(t: Term) -> str:
    return _show(t, [], free_vars(t), 0)


def _show(t, ctx, taken, prec):
    if isinstance(t, Free):
        return t.name
    if isinstance(t, Bound):
        return ctx[-1 - t.index] if t.index < len(ctx) else f"#{t.index}"
    if isinstance(t, Const):
        split = split_family_name(t.name)
        return split[0] if split else t.name
    if isinstance(t, Lam):
        name = _fresh(t.hint, taken | set(ctx))
        body = _show(t.body, ctx + [name], taken, 0)
        s = f"\\{name}:{show_type(t.var_type)}. {body}"
        return f"({s})" if prec > 0 else s
    head, args = spine(t)
    if isinstance(head, Const):
        name = head.sym.name
        if name in INFIX and len(args) == 2:
            p = INFIX[name]
            s = f"{_show(args[0], ctx, taken, p + 1)} {name} {_show(args[1], ctx, taken, p)}"
            return f"({s})" if prec > p else s
        fam = split_family_name(name)
        if fam and fam[0] == "==" and len(args) == 2:
            s = f"{_show(args[0], ctx, taken, 5)} == {_show(args[1], ctx, taken, 5)}"
            return f"({s})" if prec > 4 else s
        if fam and fam[0] == "Pi" and len(args) == 1 and isinstance(args[0], Lam):
            f = args[0]
            name = _fresh(f.hint, taken | set(ctx))
            body = _show(f.body, ctx + [name], taken, 0)
            s = f"forall {name}:{show_type(f.var_type)}. {body}"
            return f"({s})" if prec > 0 else s
        if name == "!" and len(args) == 1:
            return "!" + _show(args[0], ctx, taken, 10)
    parts = [_show(head, ctx, taken, 10)] + [_show(a, ctx, taken, 10) for a in args]
    s = " ".join(parts)
    return f"({s})" if prec >= 10 else s


def spine(t: Term):
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


# ---------------------------------------------------------------------------
# host-logic connectives (the fixed catalog of the STT signature)

def sym_true() -> SymbolDecl:
    return SymbolDecl("T", O, Kind.CONNECTIVE)


def sym_false() -> SymbolDecl:
    return SymbolDecl("F", O, Kind.CONNECTIVE)


def sym_not() -> SymbolDecl:
    return SymbolDecl("!", fn(O, O), Kind.CONNECTIVE)


def sym_binary(op: str) -> SymbolDecl:
    assert op in INFIX
    return SymbolDecl(op, fn(O, O, O), Kind.CONNECTIVE)


TRUE = Const(sym_true())
FALSE = Const(sym_false())
NOT = Const(sym_not())
AND = Const(sym_binary("&"))
OR = Const(sym_binary("|"))
IMP = Const(sym_binary("=>"))

BOOLEAN_SYMBOLS = (sym_true(), sym_false(), sym_not(), sym_binary("&"), sym_binary("|"), sym_binary("=>"))


def neg(a: Term) -> Term:
    return App(NOT, a)


def conj(*parts: Term) -> Term:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = app(AND, out, p)
    return out


def disj(a: Term, b: Term) -> Term:
    return app(OR, a, b)


def implies(a: Term, b: Term) -> Term:
    return app(IMP, a, b)


def pi(alpha: FunctionalType) -> Const:
    return Const(family_member("Pi", alpha))


def eq(alpha: FunctionalType) -> Const:
    return Const(family_member("==", alpha))


def forall(name: str, typ: FunctionalType, body: Term) -> Term:
    return App(pi(typ), lam(name, typ, body))


def forall_many(binders, body: Term) -> Term:
    for name, typ in reversed(binders):
        body = forall(name, typ, body)
    return body


def exists(name: str, typ: FunctionalType, body: Term) -> Term:
    return neg(forall(name, typ, neg(body)))


def equals(a: Term, b: Term) -> Term:
    return app(eq(a.type), a, b)


def var(name: str, typ: FunctionalType) -> Free:
    return Free(name, typ)


def const(sig: Signature, name: str) -> Const:
    s = sig.lookup(name)
    if s is None:
        raise UnknownSymbol(name)
    return Const(s)


def consts(sig: Signature, names: Iterable[str]):
    return [const(sig, n) for n in names]
