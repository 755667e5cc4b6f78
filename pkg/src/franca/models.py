"""Finite standard models, term evaluation and bounded model checking.

Values are represented as follows: ``o`` is a Python bool, a base type is an
int in ``range(card)``, and a function value is either a tuple (its table,
listing results in canonical argument order) or a ``Fn`` wrapper around a
Python callable.  Canonical order puts F before T and enumerates tables
lexicographically.

The scalar evaluator here is deliberately simple; the search engine in
``franca.batch`` evaluates many models at once and every witness it finds
is re-checked with ``eval_term``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from franca import term as T
from franca.typesig import (
    Arrow,
    Base,
    FunctionalType,
    O,
    Signature,
    SymbolDecl,
    W,
    parse_type,
    show_type,
    split_family_name,
)


class ModelError(Exception):
    pass


class MissingDenotation(ModelError):
    pass


class SearchSpaceOverflow(ModelError):
    pass


class UnknownCondition(ModelError):
    pass


class WrongType(ModelError):
    pass


class WitnessMismatch(ModelError):
    """A witness failed its independent re-evaluation (an engine bug)."""


DEFAULT_CEILING = 2 ** 28


@dataclass(frozen=True)
class Bounds:
    """Maximum cardinality per base type and a wall-clock budget."""

    maxima: tuple = ((1, 3), (2, 2))
    budget_ms: int = 10_000
    ceiling: int = DEFAULT_CEILING
    default_max: int = 2

    def __post_init__(self):
        for _, n in self.maxima:
            if n < 1:
                raise ValueError("cardinality bounds must be at least 1")

    @staticmethod
    def of(budget_ms: int = 10_000, **maxima) -> "Bounds":
        """``Bounds.of(w=3, e=2)``; keys are type names such as ``w`` or ``b3``."""
        merged = dict(Bounds().maxima)
        for name, n in maxima.items():
            merged[parse_type(name).index] = n
        return Bounds(tuple(sorted(merged.items())), budget_ms)

    def max_for(self, base: int) -> int:
        return dict(self.maxima).get(base, self.default_max)

    def with_budget(self, budget_ms: int) -> "Bounds":
        return Bounds(self.maxima, budget_ms, self.ceiling, self.default_max)

    def describe(self) -> dict:
        return {show_type(Base(b)): n for b, n in self.maxima}


# ---------------------------------------------------------------------------
# value spaces

def type_size(t: FunctionalType, cards: dict) -> int:
    if isinstance(t, Base):
        if t.index == 0:
            return 2
        if t.index not in cards:
            raise MissingDenotation(f"no cardinality for base type {show_type(t)}")
        return cards[t.index]
    return type_size(t.cod, cards) ** type_size(t.dom, cards)


class Fn:
    """A function value given by a Python callable."""

    __slots__ = ("dom", "cod", "f")

    def __init__(self, dom, cod, f):
        self.dom = dom
        self.cod = cod
        self.f = f

    def __call__(self, x):
        return self.f(x)


def apply(fv, x, dom: FunctionalType, cards: dict):
    if isinstance(fv, Fn):
        return fv(x)
    return fv[value_index(dom, x, cards)]


def reify(v, t: FunctionalType, cards: dict):
    if not isinstance(t, Arrow):
        return v
    if isinstance(v, Fn):
        return tuple(reify(v(x), t.cod, cards) for x in domain(t.dom, _key(cards)))
    return tuple(reify(x, t.cod, cards) for x in v)


def value_index(t: FunctionalType, v, cards: dict) -> int:
    if isinstance(t, Base):
        return int(v)
    v = reify(v, t, cards)
    n = type_size(t.cod, cards)
    i = 0
    for x in v:
        i = i * n + value_index(t.cod, x, cards)
    return i


def value_at(t: FunctionalType, i: int, cards: dict):
    if isinstance(t, Base):
        return bool(i) if t.index == 0 else i
    n_dom = type_size(t.dom, cards)
    n_cod = type_size(t.cod, cards)
    digits = []
    for _ in range(n_dom):
        i, r = divmod(i, n_cod)
        digits.append(r)
    return tuple(value_at(t.cod, d, cards) for d in reversed(digits))


def _key(cards: dict) -> tuple:
    return tuple(sorted(cards.items()))


@lru_cache(maxsize=4096)
def domain(t: FunctionalType, cards_key: tuple) -> tuple:
    cards = dict(cards_key)
    size = type_size(t, cards)
    if size > 1 << 20:
        raise SearchSpaceOverflow(f"domain of {show_type(t)} has {size} elements")
    return tuple(value_at(t, i, cards) for i in range(size))


def to_json_value(v):
    if isinstance(v, tuple):
        return [to_json_value(x) for x in v]
    return v


def from_json_value(t: FunctionalType, v):
    if isinstance(t, Arrow):
        return tuple(from_json_value(t.cod, x) for x in v)
    return bool(v) if t.index == 0 else int(v)


# ---------------------------------------------------------------------------
# models

@dataclass
class FiniteModel:
    sig: Signature = field(repr=False)
    cards: dict
    denotations: dict = field(default_factory=dict)

    def validate(self) -> None:
        for b, n in self.cards.items():
            if b == 0 or n < 1:
                raise ModelError(f"bad cardinality {n} for {show_type(Base(b))}")
        for p in self.sig.parameters():
            if p.name not in self.denotations:
                raise MissingDenotation(p.name)
            v = self.denotations[p.name]
            if not _has_type(v, p.type, self.cards):
                raise ModelError(f"denotation of {p.name} does not have type {show_type(p.type)}")

    def to_json(self) -> dict:
        return {
            "cards": {show_type(Base(b)): n for b, n in sorted(self.cards.items())},
            "denotations": {k: to_json_value(v) for k, v in sorted(self.denotations.items())},
        }

    @staticmethod
    def from_json(sig: Signature, data: dict) -> "FiniteModel":
        cards = {parse_type(k).index: n for k, n in data["cards"].items()}
        dens = {}
        for name, v in data["denotations"].items():
            sym = sig.lookup(name)
            if sym is None:
                raise MissingDenotation(name)
            dens[name] = from_json_value(sym.type, v)
        return FiniteModel(sig, cards, dens)

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _has_type(v, t, cards) -> bool:
    if isinstance(t, Arrow):
        return (isinstance(v, tuple) and len(v) == type_size(t.dom, cards)
                and all(_has_type(x, t.cod, cards) for x in v))
    if t.index == 0:
        return isinstance(v, bool)
    return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < cards.get(t.index, 0)


# ---------------------------------------------------------------------------
# evaluation

BUILTINS = {"T", "F", "!", "&", "|", "=>"}


def _builtin(name: str, cards: dict):
    if name == "T":
        return True
    if name == "F":
        return False
    if name == "!":
        return Fn(O, O, lambda a: not a)
    ops = {
        "&": lambda a, b: a and b,
        "|": lambda a, b: a or b,
        "=>": lambda a, b: (not a) or b,
    }
    if name in ops:
        op = ops[name]
        return Fn(O, Arrow(O, O), lambda a: Fn(O, O, lambda b: op(a, b)))
    split = split_family_name(name)
    if split is None:
        return None
    fam, alpha = split
    key = _key(cards)
    if fam == "Pi":
        return Fn(Arrow(alpha, O), O, lambda f: all(apply(f, x, alpha, cards) for x in domain(alpha, key)))
    return Fn(alpha, Arrow(alpha, O), lambda x: Fn(
        alpha, O, lambda y: reify(x, alpha, cards) == reify(y, alpha, cards)))


class Evaluator:
    """Recursive evaluator for one model; derived connectives are evaluated
    through their definitions along the signature's provenance chain."""

    def __init__(self, m: FiniteModel, sig: Optional[Signature] = None):
        self.m = m
        self.defs = T.definition_table(sig or m.sig)
        self.memo: dict = {}

    def const(self, sym: SymbolDecl):
        name = sym.name
        if name in self.memo:
            return self.memo[name]
        if sym.is_parameter:
            if name not in self.m.denotations:
                raise MissingDenotation(name)
            v = self.m.denotations[name]
        else:
            v = _builtin(name, self.m.cards)
            if v is None:
                d = self.defs.get(name)
                if d is None:
                    raise MissingDenotation(f"connective {name} has no meaning in this model")
                v = self.ev(d, [], {})
        self.memo[name] = v
        return v

    def ev(self, t, stack, env):
        if isinstance(t, T.Const):
            return self.const(t.sym)
        if isinstance(t, T.Bound):
            return stack[-1 - t.index]
        if isinstance(t, T.Free):
            if t.name not in env:
                raise MissingDenotation(f"free variable {t.name}")
            return env[t.name]
        if isinstance(t, T.Lam):
            return Fn(t.var_type, t.body.type, lambda x: self.ev(t.body, stack + [x], env))
        if isinstance(t.fun, T.Lam):
            return self.ev(t.fun.body, stack + [self.ev(t.arg, stack, env)], env)
        f = self.ev(t.fun, stack, env)
        return apply(f, self.ev(t.arg, stack, env), t.arg.type, self.m.cards)


def eval_term(t: T.Term, m: FiniteModel, env: Optional[dict] = None, sig: Optional[Signature] = None):
    """Value of ``t`` in ``m``; function values come back as tables."""
    v = Evaluator(m, sig).ev(t, [], env or {})
    return reify(v, t.type, m.cards)


def holds(t: T.Term, m: FiniteModel, sig: Optional[Signature] = None) -> bool:
    return bool(eval_term(t, m, None, sig))


# ---------------------------------------------------------------------------
# frame conditions

FRAME_CONDITIONS = ("reflexive", "transitive", "symmetric", "serial", "euclidean")


def frame_condition(name: str, rel) -> T.Term:
    """Closed first-order condition on an accessibility relation ``w->w->o``."""
    if isinstance(rel, SymbolDecl):
        rel = T.Const(rel)
    if rel.type != Arrow(W, Arrow(W, O)):
        raise WrongType(f"frame conditions need a relation of type w->w->o, not {show_type(rel.type)}")
    x, y, z = (T.Free(n, W) for n in "xyz")

    def r(a, b):
        return T.app(rel, a, b)

    if name == "reflexive":
        return T.forall("x", W, r(x, x))
    if name == "symmetric":
        return T.forall_many([("x", W), ("y", W)], T.implies(r(x, y), r(y, x)))
    if name == "transitive":
        return T.forall_many([("x", W), ("y", W), ("z", W)],
                             T.implies(T.conj(r(x, y), r(y, z)), r(x, z)))
    if name == "serial":
        return T.forall("x", W, T.exists("y", W, r(x, y)))
    if name == "euclidean":
        return T.forall_many([("x", W), ("y", W), ("z", W)],
                             T.implies(T.conj(r(x, y), r(x, z)), r(y, z)))
    raise UnknownCondition(name)


# ---------------------------------------------------------------------------
# enumeration

def base_types_needed(params, terms=()) -> list:
    out = set()
    for p in params:
        _collect_bases(p.type, out)
    for t in terms:
        for ty in T.types_in(t):
            _collect_bases(ty, out)
    out.discard(0)
    return sorted(out)


def _collect_bases(t, out):
    if isinstance(t, Base):
        out.add(t.index)
    else:
        _collect_bases(t.dom, out)
        _collect_bases(t.cod, out)


def card_vectors(bases, bounds: Bounds):
    """Cardinality assignments, lexicographically ascending."""
    ranges = [range(1, bounds.max_for(b) + 1) for b in bases]
    for combo in itertools.product(*ranges):
        yield dict(zip(bases, combo))


def interpretation_count(params, cards) -> int:
    n = 1
    for p in params:
        n *= type_size(p.type, cards)
    return n


def enumerate_models(sig: Signature, bounds: Bounds = Bounds(), terms=()) -> Iterator[FiniteModel]:
    # terms: formulas to be evaluated, so bases they quantify over get a cardinality
    params = sorted(sig.parameters(), key=lambda p: p.name)
    bases = base_types_needed(params, terms)
    for cards in card_vectors(bases, bounds):
        total = interpretation_count(params, cards)
        if total > bounds.ceiling:
            raise SearchSpaceOverflow(f"{total} interpretations at cardinalities {cards}")
        key = _key(cards)
        spaces = [domain(p.type, key) for p in params]
        for combo in itertools.product(*spaces):
            yield FiniteModel(sig, dict(cards), dict(zip((p.name for p in params), combo)))


# ---------------------------------------------------------------------------
# check results

@dataclass
class SatisfiableWitness:
    model: FiniteModel
    verdict: str = "model"


@dataclass
class UnsatUpTo:
    bounds: Bounds
    verdict: str = "unsat"


@dataclass
class CountermodelWitness:
    model: FiniteModel
    verdict: str = "countermodel"


@dataclass
class ValidUpTo:
    bounds: Bounds
    verdict: str = "valid"


@dataclass
class Timeout:
    progress: str
    verdict: str = "timeout"


CheckResult = (SatisfiableWitness, UnsatUpTo, CountermodelWitness, ValidUpTo, Timeout)


def witness_of(result):
    return getattr(result, "model", None)


def check_satisfiable(axioms, goal, sig: Signature, bounds: Bounds = Bounds(), **kw):
    """First model (in canonical order) satisfying all axioms and the goal."""
    from franca.batch import search

    return search(list(axioms), goal, sig, bounds, want="sat", **kw)


def check_valid(axioms, goal, sig: Signature, bounds: Bounds = Bounds(), **kw):
    """First model satisfying the axioms and falsifying the goal, if any."""
    from franca.batch import search

    return search(list(axioms), goal, sig, bounds, want="valid", **kw)
