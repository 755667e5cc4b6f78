"""Vectorized bounded model search.

Models for a fixed cardinality vector are numbered in mixed radix over the
relevant parameters (sorted by name, first one most significant, each digit
the canonical index of that parameter's table).  A batch of model numbers
is decoded into stacked parameter tables and every formula is evaluated for
the whole batch at once.

Array layout: a value of type ``a1 -> ... -> ak -> b`` (b a base type or o)
inside a term with at most D nested binders is an array of shape
``(B, c_1, ..., c_D, |a1|, ..., |ak|)``.  Axis ``1+d`` ranges over the
values of the bound variable introduced at depth d; terms that do not
depend on it have size 1 there and rely on broadcasting.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from typing import Optional

import numpy as np

from franca import term as T
from franca.models import (
    Bounds,
    CountermodelWitness,
    FiniteModel,
    SatisfiableWitness,
    SearchSpaceOverflow,
    Timeout,
    UnsatUpTo,
    ValidUpTo,
    WitnessMismatch,
    base_types_needed,
    card_vectors,
    holds,
    type_size,
    value_at,
)
from franca.typesig import Arrow, Base, FunctionalType, Signature, arg_types, result_type, split_family_name

BUILTIN_ARITY = {"T": 0, "F": 0, "!": 1, "&": 2, "|": 2, "=>": 2}
MAX_TABLE_INDEX_BITS = 62
CELL_BUDGET = 1 << 22
MAX_BATCH = 1 << 16
CACHE_SUBSPACE_LIMIT = 1 << 18

_mask_cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_MASK_CACHE_SIZE = 512


def clear_cache() -> None:
    _mask_cache.clear()


# ---------------------------------------------------------------------------
# preprocessing

def builtin_arity(sym) -> Optional[int]:
    if sym.is_parameter:
        return None
    if sym.name in BUILTIN_ARITY:
        return BUILTIN_ARITY[sym.name]
    split = split_family_name(sym.name)
    if split is None:
        return None
    return 1 if split[0] == "Pi" else 2


def expand_definitions(t: T.Term, sig: Signature) -> T.Term:
    """Replace derived connectives by their definitions until none remain."""
    table = T.definition_table(sig)
    t = T.beta_normalize(t)
    for _ in range(64):
        names = {c.name for c in T.constants(t)} & set(table)
        if not names:
            return t
        t = T.beta_normalize(T.replace_consts(t, {n: table[n] for n in names}))
    raise RecursionError("definitions do not bottom out")


def saturate(t: T.Term) -> T.Term:
    """Eta-expand builtin connectives that are not fully applied."""
    if isinstance(t, T.Lam):
        return T.Lam(t.var_type, saturate(t.body), t.hint)
    head, args = T.spine(t)
    args = [saturate(a) for a in args]
    if isinstance(head, T.Const):
        k = builtin_arity(head.sym)
        if k is not None and len(args) < k:
            missing = arg_types(head.type)[len(args):k]
            shifted = [T.shift(a, len(missing)) for a in args]
            n = len(missing)
            extra = [T.Bound(n - 1 - i, ty, f"x{i}") for i, ty in enumerate(missing)]
            body = T.app(head, *shifted, *extra)
            for ty in reversed(missing):
                body = T.Lam(ty, body, "x")
            return body
    return T.app(head, *args)


def binder_depth(t: T.Term) -> int:
    if isinstance(t, T.Lam):
        return 1 + binder_depth(t.body)
    if isinstance(t, T.App):
        return max(binder_depth(t.fun), binder_depth(t.arg))
    return 0


def table_dims(t: FunctionalType, cards: dict) -> tuple:
    return tuple(type_size(a, cards) for a in arg_types(t))


def cell_cost(t: T.Term, cards: dict, axes: int = 1) -> int:
    """Rough number of array cells per model needed to evaluate ``t``."""
    here = axes
    for d in table_dims(t.type, cards):
        here *= d
    if isinstance(t, T.Lam):
        return max(here, cell_cost(t.body, cards, axes * type_size(t.var_type, cards)))
    if isinstance(t, T.App):
        return max(here, cell_cost(t.fun, cards, axes), cell_cost(t.arg, cards, axes))
    return here


# ---------------------------------------------------------------------------
# table decoding

def decode_tables(digits: np.ndarray, t: FunctionalType, cards: dict) -> np.ndarray:
    """Stack of tables (shape (len(digits), *dims)) for canonical indices."""
    dims = table_dims(t, cards)
    res = result_type(t)
    c = type_size(res, cards)
    n = int(np.prod(dims, dtype=np.int64)) if dims else 1
    if n * max(1, (c - 1).bit_length()) > MAX_TABLE_INDEX_BITS:
        raise SearchSpaceOverflow(f"tables of type {t} are too large to index")
    if not dims:
        out = digits
    else:
        powers = c ** np.arange(n - 1, -1, -1, dtype=np.int64)
        out = (digits[:, None] // powers) % c
        out = out.reshape((len(digits),) + dims)
    if isinstance(res, Base) and res.index == 0:
        return out.astype(bool)
    return out.astype(np.int64)


def table_index(a: np.ndarray, t: FunctionalType, cards: dict, lead: int) -> np.ndarray:
    """Canonical index of each table stacked in ``a`` (first ``lead`` axes are batch/context)."""
    dims = table_dims(t, cards)
    c = type_size(result_type(t), cards)
    n = int(np.prod(dims, dtype=np.int64))
    if n * max(1, (c - 1).bit_length()) > MAX_TABLE_INDEX_BITS:
        raise SearchSpaceOverflow(f"values of type {t} are too large to index")
    a = np.broadcast_to(a, a.shape[:lead] + dims)
    flat = a.reshape(a.shape[:lead] + (n,)).astype(np.int64)
    powers = c ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return flat @ powers


# ---------------------------------------------------------------------------
# evaluation

class BatchEvaluator:
    def __init__(self, cards: dict, depth: int, tables: dict, env: Optional[dict] = None):
        self.cards = cards
        self.D = depth
        self.tables = tables  # name -> array (B, *dims)
        self.env = env or {}

    def lead_shape(self, axis: Optional[int] = None, size: int = 1) -> tuple:
        shape = [1] * (1 + self.D)
        if axis is not None:
            shape[1 + axis] = size
        return tuple(shape)

    def ev(self, t: T.Term, k: int) -> np.ndarray:
        if isinstance(t, T.Lam):
            body = self.ev(t.body, k + 1)
            body = np.expand_dims(body, 1 + self.D)
            return np.swapaxes(body, 1 + k, 1 + self.D)
        head, args = T.spine(t)
        if isinstance(head, T.Const) and not head.sym.is_parameter:
            return self.builtin(head, args, k)
        f = self.atom(head, k)
        ty = head.type
        for a in args:
            f = self.apply(f, self.ev(a, k), ty.dom)
            ty = ty.cod
        return f

    def atom(self, t: T.Term, k: int) -> np.ndarray:
        dims = table_dims(t.type, self.cards)
        if isinstance(t, T.Const):
            tab = self.tables[t.sym.name]
            return tab.reshape((tab.shape[0],) + (1,) * self.D + dims)
        if isinstance(t, T.Bound):
            d = k - 1 - t.index
            n = type_size(t.type, self.cards)
            digits = np.arange(n, dtype=np.int64)
            vals = decode_tables(digits, t.type, self.cards)
            return vals.reshape(self.lead_shape(d, n) + dims)
        if isinstance(t, T.Free):
            from franca.models import value_index

            i = value_index(t.type, self.env[t.name], self.cards)
            vals = decode_tables(np.array([i], dtype=np.int64), t.type, self.cards)
            return vals.reshape(self.lead_shape() + dims)
        raise TypeError(t)

    def apply(self, f: np.ndarray, a: np.ndarray, dom: FunctionalType) -> np.ndarray:
        lead = 1 + self.D
        if isinstance(dom, Base):
            idx = a.astype(np.int64) if a.dtype == bool else a
        else:
            idx = table_index(a, dom, self.cards, lead)
        rest = f.ndim - lead - 1
        idx = idx.reshape(idx.shape + (1,) * (rest + 1))
        out = np.take_along_axis(f, idx, axis=lead)
        return np.squeeze(out, axis=lead)

    def builtin(self, head: T.Const, args, k: int) -> np.ndarray:
        name = head.sym.name
        if name == "T":
            return np.ones(self.lead_shape(), dtype=bool)
        if name == "F":
            return np.zeros(self.lead_shape(), dtype=bool)
        if name == "!":
            return ~self.ev(args[0], k)
        if name in ("&", "|", "=>"):
            a = self.ev(args[0], k)
            b = self.ev(args[1], k)
            if name == "&":
                return a & b
            if name == "|":
                return a | b
            return ~a | b
        fam, alpha = split_family_name(name)
        if fam == "Pi":
            f = self.ev(args[0], k)
            return f.all(axis=-1)
        x = self.ev(args[0], k)
        y = self.ev(args[1], k)
        m = len(arg_types(alpha))
        same = x == y
        if m:
            same = same.all(axis=tuple(range(-m, 0)))
        return same


# ---------------------------------------------------------------------------
# search

class Constraint:
    def __init__(self, term: T.Term, want: bool, label: str):
        self.term = saturate(term)
        self.want = want
        self.label = label
        self.params = sorted(T.parameters_of(self.term), key=lambda p: p.name)
        self.depth = binder_depth(self.term)

    def __repr__(self):
        return f"Constraint({self.label}, want={self.want})"


def split_goal(axioms, goal, want: str):
    """Constraints (term, wanted truth value) for the search."""
    out = []

    def add(t, truth, label):
        while isinstance(t, T.App) and isinstance(t.fun, T.Const) and t.fun.sym.name == "!":
            t, truth = t.arg, not truth
        head, args = T.spine(t)
        if isinstance(head, T.Const) and len(args) == 2:
            if head.sym.name == "&" and truth:
                add(args[0], True, label)
                add(args[1], True, label)
                return
            if head.sym.name == "|" and not truth:
                add(args[0], False, label)
                add(args[1], False, label)
                return
            if head.sym.name == "=>" and not truth:
                add(args[0], True, label)
                add(args[1], False, label)
                return
        out.append((t, truth, label))

    for i, a in enumerate(axioms):
        add(a, True, f"axiom{i}")
    add(goal, want == "sat", "goal")
    return out


def _cards_key(cards):
    return tuple(sorted(cards.items()))


def _param_digits(idx: np.ndarray, strides: dict, counts: dict, name: str) -> np.ndarray:
    return (idx // strides[name]) % counts[name]


def _eval_constraint(c: Constraint, idx: np.ndarray, strides, counts, cards) -> np.ndarray:
    tables = {
        p.name: decode_tables(_param_digits(idx, strides, counts, p.name), p.type, cards)
        for p in c.params
    }
    ev = BatchEvaluator(cards, c.depth, tables)
    out = ev.ev(c.term, 0)
    out = out.reshape(out.shape[0], -1)[:, 0] if out.ndim > 1 else out
    return np.broadcast_to(out, idx.shape) == c.want


def _subspace_mask(c: Constraint, cards: dict) -> np.ndarray:
    """Truth of ``c`` over all interpretations of its own parameters."""
    key = (c.term, c.want, _cards_key(cards))
    hit = _mask_cache.get(key)
    if hit is not None:
        _mask_cache.move_to_end(key)
        return hit
    counts = {p.name: type_size(p.type, cards) for p in c.params}
    strides = _strides(c.params, counts)
    total = int(np.prod([counts[p.name] for p in c.params], dtype=np.int64)) if c.params else 1
    parts = []
    step = _batch_size(c, cards)
    for start in range(0, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.int64)
        parts.append(_eval_constraint(c, idx, strides, counts, cards))
    mask = np.concatenate(parts)
    _mask_cache[key] = mask
    if len(_mask_cache) > _MASK_CACHE_SIZE:
        _mask_cache.popitem(last=False)
    return mask


def _strides(params, counts) -> dict:
    strides = {}
    s = 1
    for p in reversed(params):
        strides[p.name] = s
        s *= counts[p.name]
    return strides


def _batch_size(c: Constraint, cards: dict) -> int:
    cost = max(1, cell_cost(c.term, cards))
    return int(max(16, min(MAX_BATCH, CELL_BUDGET // cost)))


def search(
    axioms,
    goal: T.Term,
    sig: Signature,
    bounds: Bounds = Bounds(),
    want: str = "valid",
    self_check: bool = True,
):
    """Bounded search for a model of the axioms in which the goal is true
    (``want='sat'``) or false (``want='valid'``)."""
    for f in list(axioms) + [goal]:
        if f.type != Base(0):
            raise T.TypeMismatch("formulas must have type o", expected=Base(0), found=f.type)
    started = time.monotonic()
    deadline = started + bounds.budget_ms / 1000.0
    expanded_axioms = [expand_definitions(a, sig) for a in axioms]
    expanded_goal = expand_definitions(goal, sig)
    raw = split_goal(expanded_axioms, expanded_goal, want)
    constraints = [Constraint(t, truth, label) for t, truth, label in raw]
    # a constraint without parameters is decided once and for all per cardinality
    params = sorted({p for c in constraints for p in c.params}, key=lambda p: p.name)
    bases = base_types_needed(params, [c.term for c in constraints])

    searched = 0
    for cards in card_vectors(bases, bounds):
        counts = {p.name: type_size(p.type, cards) for p in params}
        total = 1
        for p in params:
            total *= counts[p.name]
        if total > bounds.ceiling:
            raise SearchSpaceOverflow(
                f"{total} interpretations at cardinalities "
                f"{ {str(Base(b)): n for b, n in cards.items()} } exceed the ceiling {bounds.ceiling}"
            )
        strides = _strides(params, counts)
        pre, rest = [], []
        for c in constraints:
            sub = 1
            for p in c.params:
                sub *= counts[p.name]
            if sub <= CACHE_SUBSPACE_LIMIT and (sub < total or total <= CACHE_SUBSPACE_LIMIT):
                pre.append((c, sub))
            else:
                rest.append(c)
        pre.sort(key=lambda cs: (cs[1], T.size(cs[0].term)))
        rest.sort(key=lambda c: cell_cost(c.term, cards))
        premasks = []
        for c, _ in pre:
            mask = _subspace_mask(c, cards)
            if not mask.any():
                premasks = None
                break
            sub_strides = _strides(c.params, {p.name: counts[p.name] for p in c.params})
            premasks.append((c, mask, sub_strides))
            if time.monotonic() > deadline:
                return Timeout(f"budget exhausted while preparing cardinalities {_show_cards(cards)}")
        if premasks is None:
            searched += total
            continue
        step = min([MAX_BATCH] + [_batch_size(c, cards) for c in rest]) if rest else MAX_BATCH * 16
        for start in range(0, total, step):
            idx = np.arange(start, min(start + step, total), dtype=np.int64)
            for c, mask, sub_strides in premasks:
                sub = np.zeros_like(idx)
                for p in c.params:
                    sub += _param_digits(idx, strides, counts, p.name) * sub_strides[p.name]
                idx = idx[mask[sub]]
                if idx.size == 0:
                    break
            for c in rest:
                if idx.size == 0:
                    break
                idx = idx[_eval_constraint(c, idx, strides, counts, cards)]
            if idx.size:
                model = _decode_model(int(idx[0]), params, strides, counts, cards, sig)
                if self_check:
                    _self_check(model, axioms, goal, want, sig)
                if want == "sat":
                    return SatisfiableWitness(model)
                return CountermodelWitness(model)
            searched += len(range(start, min(start + step, total)))
            if time.monotonic() > deadline:
                return Timeout(
                    f"budget exhausted at cardinalities {_show_cards(cards)} after {searched} models"
                )
    return UnsatUpTo(bounds) if want == "sat" else ValidUpTo(bounds)


def _show_cards(cards) -> str:
    return ",".join(f"{Base(b)}={n}" for b, n in sorted(cards.items()))


def _decode_model(i: int, params, strides, counts, cards, sig: Signature) -> FiniteModel:
    cards = dict(cards)
    dens = {}
    for p in params:
        digit = (i // strides[p.name]) % counts[p.name]
        dens[p.name] = value_at(p.type, digit, cards)
    for p in sorted(sig.parameters(), key=lambda p: p.name):
        if p.name in dens:
            continue
        for b in _bases(p.type):
            cards.setdefault(b, 1)
        dens[p.name] = value_at(p.type, 0, cards)
    return FiniteModel(sig, cards, dens)


def _bases(t):
    if isinstance(t, Base):
        return set() if t.index == 0 else {t.index}
    return _bases(t.dom) | _bases(t.cod)


def _self_check(model: FiniteModel, axioms, goal, want: str, sig: Signature) -> None:
    for a in axioms:
        if not holds(a, model, sig):
            raise WitnessMismatch(f"witness violates axiom {T.show(a)}")
    g = holds(goal, model, sig)
    if g != (want == "sat"):
        raise WitnessMismatch(f"witness gives goal {T.show(goal)} the value {g}")
