"""Functional types, type mappings and (derived) signatures.

A signature is a finite set of typed symbols, each either a connective
(fixed interpretation) or a parameter (interpretation varies per model).
Derived signatures additionally carry the closed terms that define their
connectives over some origin signature.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union


class SignatureError(Exception):
    pass


class NameClash(SignatureError):
    pass


class NotClosed(SignatureError):
    pass


class NotGrounded(SignatureError):
    pass


class UnknownParameter(SignatureError):
    pass


class TypeSyntaxError(ValueError):
    pass


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class Base:
    index: int

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Arrow:
    dom: "FunctionalType"
    cod: "FunctionalType"

    def __str__(self) -> str:
        return show_type(self)


FunctionalType = Union[Base, Arrow]

O = Base(0)
W = Base(1)
E = Base(2)
WO = Arrow(W, O)

_ALIASES = {0: "o", 1: "w", 2: "e"}


def fn(*types: FunctionalType) -> FunctionalType:
    """Right-nested arrow: ``fn(a, b, c)`` is ``a -> (b -> c)``."""
    if not types:
        raise ValueError("fn() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def show_type(t: FunctionalType) -> str:
    if isinstance(t, Base):
        return _ALIASES.get(t.index, f"b{t.index}")
    dom = show_type(t.dom)
    if isinstance(t.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {show_type(t.cod)}"


_TYPE_TOKEN = re.compile(r"\s*(->|\(|\)|[A-Za-z_][A-Za-z0-9_]*)")


def parse_type(text: str) -> FunctionalType:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r} in type {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    t, rest = _parse_arrow(tokens, text)
    if rest:
        raise TypeSyntaxError(f"trailing tokens {rest!r} in type {text!r}")
    return t


def _parse_arrow(tokens, text):
    left, rest = _parse_atom(tokens, text)
    if rest and rest[0] == "->":
        right, rest = _parse_arrow(rest[1:], text)
        return Arrow(left, right), rest
    return left, rest


def _parse_atom(tokens, text):
    if not tokens:
        raise TypeSyntaxError(f"unexpected end of type {text!r}")
    tok = tokens[0]
    if tok == "(":
        t, rest = _parse_arrow(tokens[1:], text)
        if not rest or rest[0] != ")":
            raise TypeSyntaxError(f"missing ')' in type {text!r}")
        return t, rest[1:]
    return base_type(tok), tokens[1:]


def base_type(name: str) -> Base:
    for idx, alias in _ALIASES.items():
        if name == alias:
            return Base(idx)
    m = re.fullmatch(r"b(\d+)", name)
    if m:
        return Base(int(m.group(1)))
    raise TypeSyntaxError(f"unknown base type {name!r}")


def arity_to_type(k: int, sigma: FunctionalType) -> FunctionalType:
    """``sigma`` for k=0, else ``sigma -> ... -> sigma`` with k arrows."""
    if k < 0:
        raise ValueError("arity must be non-negative")
    return fn(*([sigma] * (k + 1)))


def arity_of(t: FunctionalType, sigma: FunctionalType) -> Optional[int]:
    """Inverse of :func:`arity_to_type`; None if ``t`` is not in its image."""
    k = 0
    while t != sigma:
        if not isinstance(t, Arrow) or t.dom != sigma:
            return None
        t = t.cod
        k += 1
    return k


def type_substitute(t: FunctionalType, alpha: FunctionalType, beta: FunctionalType) -> FunctionalType:
    if t == alpha:
        return beta
    if isinstance(t, Arrow):
        return Arrow(type_substitute(t.dom, alpha, beta), type_substitute(t.cod, alpha, beta))
    return t


def type_lift(t: FunctionalType, sigma: FunctionalType = O, omega: FunctionalType = W) -> FunctionalType:
    return type_substitute(t, sigma, Arrow(omega, sigma))


def base_types_of(t: FunctionalType) -> set:
    if isinstance(t, Base):
        return {t}
    return base_types_of(t.dom) | base_types_of(t.cod)


def arg_types(t: FunctionalType) -> list:
    out = []
    while isinstance(t, Arrow):
        out.append(t.dom)
        t = t.cod
    return out


def result_type(t: FunctionalType) -> FunctionalType:
    while isinstance(t, Arrow):
        t = t.cod
    return t


# ---------------------------------------------------------------------------
# symbols and signatures

class Kind(enum.Enum):
    CONNECTIVE = "connective"
    PARAMETER = "parameter"


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    type: FunctionalType
    kind: Kind

    @property
    def is_parameter(self) -> bool:
        return self.kind is Kind.PARAMETER

    def __str__(self) -> str:
        return f"{self.name} : {show_type(self.type)}"


def connective(name: str, t: FunctionalType) -> SymbolDecl:
    return SymbolDecl(name, t, Kind.CONNECTIVE)


def parameter(name: str, t: FunctionalType) -> SymbolDecl:
    return SymbolDecl(name, t, Kind.PARAMETER)


# Families of connectives that exist at every type; members are named
# ``Pi[<type>]`` and ``==[<type>]``.
FAMILIES = ("Pi", "==")


def family_member(family: str, index: FunctionalType) -> SymbolDecl:
    if family == "Pi":
        return connective(f"Pi[{show_type(index)}]", fn(Arrow(index, O), O))
    if family == "==":
        return connective(f"==[{show_type(index)}]", fn(index, index, O))
    raise KeyError(family)


def split_family_name(name: str) -> Optional[tuple]:
    m = re.fullmatch(r"(Pi|==)\[(.+)\]", name)
    if not m:
        return None
    return m.group(1), parse_type(m.group(2))


class Mode(enum.Enum):
    RIGID = "rigid"
    FLEXIBLE = "flexible"


@dataclass(frozen=True)
class Signature:
    """Finite signature; equality and ordering look only at the symbols.

    ``defs`` maps each derived connective to its defining closed term over
    ``origin``; it is empty for primitive signatures.
    """

    symbols: frozenset = frozenset()
    families: frozenset = frozenset()
    mode: Optional[Mode] = field(default=None, compare=False)
    origin: Optional["Signature"] = field(default=None, compare=False, repr=False)
    defs: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        seen = {}
        for s in self.symbols:
            other = seen.get(s.name)
            if other is not None and other != s:
                raise NameClash(f"symbol {s.name!r} declared as {other} and as {s}")
            seen[s.name] = s
        object.__setattr__(self, "_by_name", seen)

    @staticmethod
    def primitive(symbols: Iterable[SymbolDecl] = (), families: Iterable[str] = ()) -> "Signature":
        return Signature(frozenset(symbols), frozenset(families))

    # lookup -----------------------------------------------------------

    def lookup(self, name: str) -> Optional[SymbolDecl]:
        s = self._by_name.get(name)
        if s is not None:
            return s
        split = split_family_name(name)
        if split and split[0] in self.families:
            return family_member(*split)
        return None

    def __contains__(self, sym: SymbolDecl) -> bool:
        return self.lookup(sym.name) == sym

    def names(self) -> set:
        return set(self._by_name)

    def connectives(self, alpha: Optional[FunctionalType] = None) -> frozenset:
        return frozenset(
            s for s in self.symbols
            if s.kind is Kind.CONNECTIVE and (alpha is None or s.type == alpha)
        )

    def parameters(self, alpha: Optional[FunctionalType] = None) -> frozenset:
        return frozenset(
            s for s in self.symbols
            if s.kind is Kind.PARAMETER and (alpha is None or s.type == alpha)
        )

    def types(self) -> set:
        return {s.type for s in self.symbols}

    @property
    def is_derived(self) -> bool:
        return self.mode is not None

    @property
    def definitions(self) -> dict:
        return dict(self.defs)

    def with_symbols(self, extra: Iterable[SymbolDecl]) -> "Signature":
        """Same provenance, more symbols (used for theory-level parameters)."""
        return Signature(self.symbols | frozenset(extra), self.families, self.mode, self.origin, self.defs)

    def __str__(self) -> str:
        body = ", ".join(str(s) for s in sorted(self.symbols, key=lambda s: s.name))
        fams = "".join(f", {f}[*]" for f in sorted(self.families))
        return "{" + body + fams + "}"


def is_rigid(sig: Signature) -> bool:
    """Primitive or rigidly derived."""
    return sig.mode in (None, Mode.RIGID)


def sig_leq(s1: Signature, s2: Signature) -> bool:
    if not s1.families <= s2.families:
        return False
    return all(s in s2 for s in s1.symbols)


def sig_lt(s1: Signature, s2: Signature) -> bool:
    return sig_leq(s1, s2) and s1 != s2


def _merge_provenance(sigs):
    derived = [s for s in sigs if s.is_derived]
    if not derived:
        return None, None, ()
    defs: dict = {}
    for s in sigs:
        items = s.defs if s.is_derived else _identity_defs(s)
        for name, term in items:
            if name in defs and defs[name] != term:
                raise NameClash(f"connective {name!r} has two different definitions")
            defs[name] = term
    origins = [s.origin if s.is_derived else s for s in sigs]
    origin = origins[0]
    for o in origins[1:]:
        origin = sig_union(origin, o)
    mode = Mode.RIGID if all(is_rigid(s) for s in sigs) else Mode.FLEXIBLE
    return mode, origin, tuple(sorted(defs.items()))


def _identity_defs(sig: Signature):
    from franca.term import Const

    return [(s.name, Const(s)) for s in sig.connectives()]


def sig_union(s1: Signature, s2: Signature) -> Signature:
    symbols = s1.symbols | s2.symbols
    mode, origin, defs = _merge_provenance([s1, s2])
    return Signature(frozenset(symbols), s1.families | s2.families, mode, origin, defs)


def sig_intersect(s1: Signature, s2: Signature) -> Signature:
    # building the union first surfaces any conflicting declarations
    Signature(s1.symbols | s2.symbols)
    return Signature(s1.symbols & s2.symbols, s1.families & s2.families)


def derive_signature(
    origin: Signature,
    connective_defs: Mapping,
    kept_params: Iterable[str] = (),
    mode: Mode = Mode.FLEXIBLE,
    families: Iterable[str] = (),
) -> Signature:
    """Build a signature whose connectives are closed terms over ``origin``.

    Each definition must be a closed term of the origin language; in rigid
    mode it must also be parameter-free and the origin itself rigid.  A
    definition that is just an origin symbol must reuse that symbol's name,
    so that identity definitions make the derived signature an extension.
    ``families`` keeps origin families (Pi, ==) under identity likewise.
    """
    from franca import term as T

    if isinstance(mode, str):
        mode = Mode(mode)
    if mode is Mode.RIGID and not is_rigid(origin):
        raise NotGrounded("rigid derivation needs a rigid origin signature")
    symbols = []
    for name, d in connective_defs.items():
        if not T.in_language(d, origin):
            bad = sorted(c.name for c in T.constants(d) if c not in origin)
            raise UnknownParameter(f"definition of {name!r} uses symbols outside the origin: {bad}")
        if not T.is_closed(d):
            raise NotClosed(f"definition of {name!r} has free variables {sorted(T.free_vars(d))}")
        if mode is Mode.RIGID and not T.is_grounded(d):
            params = sorted(c.name for c in T.constants(d) if c.is_parameter)
            raise NotGrounded(f"definition of {name!r} mentions parameters {params}")
        if isinstance(d, T.Const):
            if d.sym.is_parameter:
                raise SignatureError(f"{name!r} is defined as parameter {d.sym.name!r}; keep the parameter instead")
            if d.sym.name != name:
                raise SignatureError(f"{name!r} is defined as the bare symbol {d.sym.name!r}; name it {d.sym.name!r}")
        symbols.append(connective(name, d.type))
    for pname in kept_params:
        p = origin.lookup(pname)
        if p is None or not p.is_parameter:
            raise UnknownParameter(f"{pname!r} is not a parameter of the origin signature")
        symbols.append(p)
    families = frozenset(families)
    if not families <= origin.families:
        raise UnknownParameter(f"families {sorted(families - origin.families)} are not in the origin signature")
    return Signature(frozenset(symbols), families, mode, origin, tuple(sorted(connective_defs.items())))


def check_derived(candidate: Signature, origin: Signature) -> bool:
    """Re-validate that ``candidate`` is derived from ``origin``.

    Every connective needs a definition that is a closed term of the origin
    language (grounded as well, if ``candidate`` claims rigidity) and every
    parameter must belong to the origin.
    """
    defs = candidate.definitions
    try:
        derive_signature(
            origin,
            {s.name: defs[s.name] for s in candidate.connectives()},
            [p.name for p in candidate.parameters()],
            candidate.mode or Mode.RIGID,
            candidate.families,
        )
    except (SignatureError, KeyError):
        return False
    return all(origin.lookup(p.name) == p for p in candidate.parameters())


def restrict(sig: Signature, names: Iterable[str]) -> Signature:
    """Sub-signature on the given symbol names, keeping provenance."""
    names = set(names)
    symbols = frozenset(s for s in sig.symbols if s.name in names)
    defs = tuple((n, d) for n, d in sig.defs if n in names)
    return Signature(symbols, frozenset(), sig.mode, sig.origin, defs)


def is_extension(derived: Signature, origin: Signature) -> bool:
    return derived.is_derived and sig_leq(origin, derived)
