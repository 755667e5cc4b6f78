"""Propositional (multi)modal logic with its native Kripke semantics.

This module is the independent oracle for the modal embeddings: it never
goes through the higher-order kernel except in ``faithfulness_corpus_check``
and ``pointwise_transfer``, which compare the two sides.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class KripkeError(Exception):
    pass


class UnknownAtom(KripkeError):
    pass


class BoundTooLarge(KripkeError):
    pass


class ResourceLimit(KripkeError):
    pass


class TableauError(KripkeError):
    """Extracted countermodel failed its re-check (a prover bug)."""


# ---------------------------------------------------------------------------
# formulas

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Neg:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box:
    index: int
    sub: "Formula"


@dataclass(frozen=True)
class Dia:
    index: int
    sub: "Formula"


Formula = object
BINARY = {And: "&", Or: "|", Imp: "=>"}


def top() -> Formula:
    return Neg(Bot())


def children(f) -> tuple:
    if isinstance(f, (Neg, Box, Dia)):
        return (f.sub,)
    if isinstance(f, (And, Or, Imp)):
        return (f.left, f.right)
    return ()


def height(f) -> int:
    cs = children(f)
    return 1 + max(height(c) for c in cs) if cs else 0


def modal_depth(f) -> int:
    inner = max((modal_depth(c) for c in children(f)), default=0)
    return inner + 1 if isinstance(f, (Box, Dia)) else inner


def atoms(f) -> set:
    if isinstance(f, Atom):
        return {f.name}
    out = set()
    for c in children(f):
        out |= atoms(c)
    return out


def indices(f) -> set:
    out = {f.index} if isinstance(f, (Box, Dia)) else set()
    for c in children(f):
        out |= indices(c)
    return out


def show(f, prec: int = 0) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Neg):
        return "!" + show(f.sub, 9)
    if isinstance(f, (Box, Dia)):
        kw = "box" if isinstance(f, Box) else "dia"
        s = f"{kw}{f.index} {show(f.sub, 9)}"
        return f"({s})" if prec >= 9 else s
    op = BINARY[type(f)]
    p = {"=>": 1, "|": 2, "&": 3}[op]
    if op == "=>":
        s = f"{show(f.left, p + 1)} => {show(f.right, p)}"
    else:
        s = f"{show(f.left, p)} {op} {show(f.right, p + 1)}"
    return f"({s})" if prec > p else s


def parse_modal(text: str) -> Formula:
    """``box1 p => dia2 (q & !p)``; ``box``/``dia`` alone mean index 1."""
    from franca.parse import ParseError, TokenStream, tokenize

    ts = TokenStream(tokenize(text))
    f = _mimp(ts)
    if ts.peek().kind != "eof":
        ts.error(f"unexpected '{ts.peek().text}'")
    return f


def _mimp(ts):
    left = _mbin(ts, 2)
    if ts.at("=>"):
        ts.next()
        return Imp(left, _mimp(ts))
    return left


def _mbin(ts, level):
    if level == 4:
        return _munary(ts)
    left = _mbin(ts, level + 1)
    op = "|" if level == 2 else "&"
    while ts.at(op):
        ts.next()
        right = _mbin(ts, level + 1)
        left = Or(left, right) if op == "|" else And(left, right)
    return left


def _munary(ts):
    import re

    t = ts.peek()
    if t.text == "!":
        ts.next()
        return Neg(_munary(ts))
    if t.text == "(":
        ts.next()
        f = _mimp(ts)
        ts.expect(")")
        return f
    tok = ts.ident("a modal formula")
    m = re.fullmatch(r"(box|dia)([0-9]*)", tok.text)
    if m:
        i = int(m.group(2) or 1)
        sub = _munary(ts)
        return Box(i, sub) if m.group(1) == "box" else Dia(i, sub)
    if tok.text == "bot":
        return Bot()
    if tok.text == "top":
        return top()
    return Atom(tok.text)


def corpus(depth_max: int = 2, atom_names=("p", "q"), modal_index: int = 1) -> list:
    """Every formula of height at most ``depth_max`` built from the atoms with
    unary ``!``, ``box`` and binary ``&``, ``|``, ``=>``."""
    levels = [[Atom(a) for a in atom_names]]
    all_upto = list(levels[0])
    for _ in range(depth_max):
        prev = list(all_upto)
        new = []
        for f in prev:
            new.append(Neg(f))
            new.append(Box(modal_index, f))
        for ctor in (And, Or, Imp):
            for a in prev:
                for b in prev:
                    new.append(ctor(a, b))
        all_upto = [Atom(a) for a in atom_names] + new
    return all_upto


def atom_names(count: int) -> tuple:
    base = ("p", "q", "r", "s", "t")
    if count <= len(base):
        return base[:count]
    return tuple(f"p{i}" for i in range(count))


# ---------------------------------------------------------------------------
# models

@dataclass(frozen=True)
class KripkeModel:
    worlds: int
    relations: tuple = ()  # ((index, frozenset of (x, y)), ...)
    valuation: tuple = ()  # ((atom, frozenset of worlds), ...)

    @staticmethod
    def make(worlds: int, relations: dict, valuation: dict) -> "KripkeModel":
        rels = tuple(sorted((i, frozenset(map(tuple, r))) for i, r in relations.items()))
        val = tuple(sorted((a, frozenset(v)) for a, v in valuation.items()))
        m = KripkeModel(worlds, rels, val)
        for _, r in rels:
            for x, y in r:
                if not (0 <= x < worlds and 0 <= y < worlds):
                    raise KripkeError(f"edge {(x, y)} leaves the world set")
        for a, v in val:
            if any(not 0 <= x < worlds for x in v):
                raise KripkeError(f"valuation of {a} leaves the world set")
        return m

    def rel(self, index: int) -> frozenset:
        return dict(self.relations).get(index, frozenset())

    def val(self, atom: str) -> frozenset:
        d = dict(self.valuation)
        if atom not in d:
            raise UnknownAtom(atom)
        return d[atom]

    def to_json(self) -> dict:
        return {
            "worlds": self.worlds,
            "relations": {str(i): sorted(map(list, r)) for i, r in self.relations},
            "valuation": {a: sorted(v) for a, v in self.valuation},
        }


def kripke_eval(f, m: KripkeModel, x: int) -> bool:
    if isinstance(f, Atom):
        return x in m.val(f.name)
    if isinstance(f, Bot):
        return False
    if isinstance(f, Neg):
        return not kripke_eval(f.sub, m, x)
    if isinstance(f, And):
        return kripke_eval(f.left, m, x) and kripke_eval(f.right, m, x)
    if isinstance(f, Or):
        return kripke_eval(f.left, m, x) or kripke_eval(f.right, m, x)
    if isinstance(f, Imp):
        return (not kripke_eval(f.left, m, x)) or kripke_eval(f.right, m, x)
    succ = [y for (a, y) in m.rel(f.index) if a == x]
    if isinstance(f, Box):
        return all(kripke_eval(f.sub, m, y) for y in succ)
    return any(kripke_eval(f.sub, m, y) for y in succ)


# ---------------------------------------------------------------------------
# frame classes

LOGIC_CONDITIONS = {
    "K": (),
    "KT": ("reflexive",),
    "K4": ("transitive",),
    "S4": ("reflexive", "transitive"),
    "S5": ("reflexive", "symmetric", "transitive"),
    "KD": ("serial",),
}


def frame_conditions(frame_class) -> tuple:
    if isinstance(frame_class, str):
        if frame_class not in LOGIC_CONDITIONS:
            raise KripkeError(f"unknown frame class {frame_class!r}")
        return LOGIC_CONDITIONS[frame_class]
    return tuple(frame_class)


def relation_matrices(n: int) -> np.ndarray:
    """All n x n boolean matrices, canonical order (row-major, F<T)."""
    rows = list(itertools.product((False, True), repeat=n * n))
    return np.array(rows, dtype=bool).reshape(len(rows), n, n)


def satisfies_conditions(mats: np.ndarray, conditions) -> np.ndarray:
    """Mask of matrices (shape (N, n, n)) meeting every frame condition."""
    ok = np.ones(len(mats), dtype=bool)
    n = mats.shape[1]
    for c in conditions:
        if c == "reflexive":
            ok &= mats[:, np.arange(n), np.arange(n)].all(axis=1)
        elif c == "symmetric":
            ok &= (mats == mats.transpose(0, 2, 1)).all(axis=(1, 2))
        elif c == "transitive":
            two = np.einsum("kij,kjl->kil", mats.astype(np.int32), mats.astype(np.int32)) > 0
            ok &= (~two | mats).all(axis=(1, 2))
        elif c == "serial":
            ok &= mats.any(axis=2).all(axis=1)
        elif c == "euclidean":
            # R x y and R x z imply R y z
            lhs = mats[:, :, :, None] & mats[:, :, None, :]
            ok &= (~lhs | mats[:, None, :, :]).all(axis=(1, 2, 3))
        else:
            raise KripkeError(f"unknown frame condition {c!r}")
    return ok


def canonical_mask(mats: np.ndarray) -> np.ndarray:
    """Keep one matrix per isomorphism class (the smallest under relabeling)."""
    n = mats.shape[1]
    weights = 1 << np.arange(n * n - 1, -1, -1, dtype=np.int64)
    codes = mats.reshape(len(mats), -1).astype(np.int64) @ weights
    best = codes.copy()
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        permuted = mats[:, p][:, :, p]
        best = np.minimum(best, permuted.reshape(len(mats), -1).astype(np.int64) @ weights)
    return codes == best


def valuations(n: int, k: int) -> np.ndarray:
    """All valuations of k atoms over n worlds: shape (2**(n*k), k, n)."""
    rows = list(itertools.product((False, True), repeat=n * k))
    return np.array(rows, dtype=bool).reshape(len(rows), k, n)


def vector_eval(f, rels: dict, vals: np.ndarray, atom_index: dict) -> np.ndarray:
    """Truth of ``f`` at every world of every (relation, valuation) pair.

    ``rels`` maps a modal index to an array (NR, n, n); ``vals`` has shape
    (NV, k, n).  Result shape (NR, NV, n).
    """
    if isinstance(f, Atom):
        if f.name not in atom_index:
            raise UnknownAtom(f.name)
        return vals[None, :, atom_index[f.name], :]
    if isinstance(f, Bot):
        return np.zeros((1, 1, 1), dtype=bool)
    if isinstance(f, Neg):
        return ~vector_eval(f.sub, rels, vals, atom_index)
    if isinstance(f, (And, Or, Imp)):
        a = vector_eval(f.left, rels, vals, atom_index)
        b = vector_eval(f.right, rels, vals, atom_index)
        if isinstance(f, And):
            return a & b
        if isinstance(f, Or):
            return a | b
        return ~a | b
    sub = vector_eval(f.sub, rels, vals, atom_index)
    r = rels[f.index][:, None, :, :]
    s = sub[:, :, None, :]
    if isinstance(f, Box):
        return (~r | s).all(axis=-1)
    return (r & s).any(axis=-1)


@dataclass
class FrameVerdict:
    valid: bool
    witness: Optional[KripkeModel] = None
    world: Optional[int] = None
    frames_checked: int = 0

    def __bool__(self):
        return self.valid


def valid_over_frames(f, n_max: int, frame_class="K", iso: bool = True, chunk: int = 1 << 22) -> FrameVerdict:
    """Brute force: is ``f`` true at every world of every model on every frame
    with at most ``n_max`` worlds in the class?"""
    if n_max > 4:
        raise BoundTooLarge("frame enumeration is limited to 4 worlds")
    conds = frame_conditions(frame_class)
    names = sorted(atoms(f)) or ["p"]
    idx_of = {a: i for i, a in enumerate(names)}
    mods = sorted(indices(f)) or [1]
    checked = 0
    for n in range(1, n_max + 1):
        mats = relation_matrices(n)
        mats = mats[satisfies_conditions(mats, conds)]
        if iso and len(mods) == 1:
            mats = mats[canonical_mask(mats)]
        vals = valuations(n, len(names))
        per = max(1, chunk // max(1, len(vals) * n * n))
        combos = list(itertools.product(range(len(mats)), repeat=len(mods)))
        for start in range(0, len(combos), per):
            part = np.array(combos[start:start + per])
            rels = {i: mats[part[:, j]] for j, i in enumerate(mods)}
            truth = vector_eval(f, rels, vals, idx_of)
            truth = np.broadcast_to(truth, (len(part), len(vals), n))
            checked += len(part)
            bad = np.argwhere(~truth)
            if len(bad):
                ri, vi, x = bad[0]
                relations = {i: {(a, b) for a in range(n) for b in range(n) if rels[i][ri][a, b]}
                             for i in mods}
                valuation = {a: {w for w in range(n) if vals[vi][idx_of[a], w]} for a in names}
                m = KripkeModel.make(n, relations, valuation)
                assert not kripke_eval(f, m, int(x))
                return FrameVerdict(False, m, int(x), checked)
    return FrameVerdict(True, None, None, checked)


# ---------------------------------------------------------------------------
# tableau

def nnf(f, positive: bool = True):
    """Negation normal form over Atom, Neg(Atom), Bot, top, And, Or, Box, Dia."""
    if isinstance(f, Atom):
        return f if positive else Neg(f)
    if isinstance(f, Bot):
        return Bot() if positive else top()
    if isinstance(f, Neg):
        if isinstance(f.sub, Bot):
            return top() if positive else Bot()
        return nnf(f.sub, not positive)
    if isinstance(f, And):
        ctor = And if positive else Or
        return ctor(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Or):
        ctor = Or if positive else And
        return ctor(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Imp):
        ctor = Or if positive else And
        return ctor(nnf(f.left, not positive), nnf(f.right, positive))
    if isinstance(f, Box):
        return Box(f.index, nnf(f.sub, positive)) if positive else Dia(f.index, nnf(f.sub, False))
    return Dia(f.index, nnf(f.sub, positive)) if positive else Box(f.index, nnf(f.sub, False))


@dataclass
class Proof:
    logic: str
    formula: object
    branches_closed: int
    verdict: str = "proved"


@dataclass
class Countermodel:
    logic: str
    formula: object
    model: KripkeModel
    world: int = 0
    verdict: str = "countermodel"


TABLEAU_LOGICS = ("K", "KT", "K4", "S4", "S5")


@dataclass
class _Branch:
    labels: list  # list of sets of NNF formulas
    parent: list  # parent world or None
    edges: set  # (x, index, y) tree edges created by diamonds

    def copy(self):
        return _Branch([set(s) for s in self.labels], list(self.parent), set(self.edges))


class _Prover:
    def __init__(self, logic: str, max_steps: int, max_worlds: int):
        if logic not in TABLEAU_LOGICS:
            raise KripkeError(f"tableau supports {TABLEAU_LOGICS}, not {logic!r}")
        self.logic = logic
        self.refl = logic in ("KT", "S4", "S5")
        self.trans = logic in ("K4", "S4", "S5")
        self.symm = logic == "S5"
        self.max_steps = max_steps
        self.max_worlds = max_worlds
        self.steps = 0
        self.closed = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise ResourceLimit(f"tableau exceeded {self.max_steps} steps")

    def saturate(self, b: _Branch) -> bool:
        """Apply the deterministic rules to a fixpoint; False on a clash."""
        changed = True
        while changed:
            changed = False
            for x, label in enumerate(b.labels):
                for f in list(label):
                    if isinstance(f, Bot):
                        return False
                    if isinstance(f, Neg) and f.sub in label:
                        return False
                    if isinstance(f, And):
                        for g in (f.left, f.right):
                            if g not in label:
                                label.add(g)
                                changed = True
                    elif isinstance(f, Box):
                        targets = [(y, False) for (a, i, y) in b.edges if a == x and i == f.index]
                        if self.symm:
                            targets += [(a, False) for (a, i, y) in b.edges if y == x and i == f.index]
                        if self.refl and f.sub not in label:
                            label.add(f.sub)
                            changed = True
                        for y, _ in targets:
                            tl = b.labels[y]
                            if f.sub not in tl:
                                tl.add(f.sub)
                                changed = True
                            if self.trans and f not in tl:
                                tl.add(f)
                                changed = True
            self.tick()
        return True

    def reach(self, b: _Branch, x: int, index: int) -> set:
        """Worlds the final model will make accessible from x."""
        succ: dict = {}
        for (a, i, y) in b.edges:
            if i == index:
                succ.setdefault(a, set()).add(y)
                if self.symm:
                    succ.setdefault(y, set()).add(a)
        if not self.trans:
            out = set(succ.get(x, ()))
        else:
            out, stack = set(), list(succ.get(x, ()))
            while stack:
                y = stack.pop()
                if y not in out:
                    out.add(y)
                    stack.extend(succ.get(y, ()))
        if self.refl:
            out.add(x)
        return out

    def ancestors(self, b: _Branch, x: int):
        p = b.parent[x]
        while p is not None:
            yield p
            p = b.parent[p]

    def blocker(self, b: _Branch, x: int) -> Optional[int]:
        if self.logic not in ("K4", "S4"):
            return None
        for z in self.ancestors(b, x):
            if b.labels[x] <= b.labels[z]:
                return z
        return None

    def run(self, b: _Branch) -> Optional[_Branch]:
        while True:
            self.tick()
            if not self.saturate(b):
                self.closed += 1
                return None
            split = self._find_or(b)
            if split is not None:
                x, f = split
                for g in (f.left, f.right):
                    c = b.copy()
                    c.labels[x].add(g)
                    r = self.run(c)
                    if r is not None:
                        return r
                return None
            demand = self._find_demand(b)
            if demand is None:
                return b
            x, f = demand
            if len(b.labels) >= self.max_worlds:
                raise ResourceLimit(f"tableau exceeded {self.max_worlds} worlds")
            y = len(b.labels)
            b.labels.append({f.sub})
            b.parent.append(x)
            b.edges.add((x, f.index, y))

    def _find_or(self, b):
        for x, label in enumerate(b.labels):
            for f in sorted(label, key=repr):
                if isinstance(f, Or) and f.left not in label and f.right not in label:
                    return x, f
        return None

    def _find_demand(self, b):
        for x, label in enumerate(b.labels):
            if self.blocker(b, x) is not None:
                continue
            for f in sorted(label, key=repr):
                if not isinstance(f, Dia):
                    continue
                if self.symm:
                    pool = range(len(b.labels))
                else:
                    pool = self.reach(b, x, f.index)
                if any(f.sub in b.labels[y] for y in pool):
                    continue
                return x, f
        return None

    def model(self, b: _Branch, mods) -> KripkeModel:
        n = len(b.labels)
        rels = {}
        for i in mods:
            edges = {(a, y) for (a, j, y) in b.edges if j == i}
            for x in range(n):
                z = self.blocker(b, x)
                if z is not None:
                    edges |= {(x, y) for (a, y) in edges if a == z}
                    if self.refl:
                        edges.add((x, z))
            edges = _close(edges, n, self.refl, self.symm, self.trans)
            rels[i] = edges
        names = set()
        for label in b.labels:
            for f in label:
                if isinstance(f, Atom):
                    names.add(f.name)
                elif isinstance(f, Neg) and isinstance(f.sub, Atom):
                    names.add(f.sub.name)
        val = {a: {x for x in range(n) if Atom(a) in b.labels[x]} for a in names}
        return KripkeModel.make(n, rels, val)


def _close(edges: set, n: int, refl: bool, symm: bool, trans: bool) -> set:
    edges = set(edges)
    if refl:
        edges |= {(x, x) for x in range(n)}
    if symm:
        edges |= {(y, x) for (x, y) in edges}
    if trans:
        changed = True
        while changed:
            new = {(a, d) for (a, b) in edges for (c, d) in edges if b == c} - edges
            changed = bool(new)
            edges |= new
    return edges


def tableau_prove(f, logic: str = "K", max_steps: int = 200_000, max_worlds: int = 200):
    """Proof if ``f`` is valid in ``logic``, else a verified Countermodel."""
    prover = _Prover(logic, max_steps, max_worlds)
    root = nnf(f, positive=False)
    b = _Branch([{root}], [None], set())
    open_branch = prover.run(b)
    if open_branch is None:
        return Proof(logic, f, prover.closed)
    mods = sorted(indices(f)) or [1]
    m = prover.model(open_branch, mods)
    full_atoms = atoms(f) - {a for a, _ in m.valuation}
    if full_atoms:
        val = dict(m.valuation)
        val.update({a: frozenset() for a in full_atoms})
        m = KripkeModel(m.worlds, m.relations, tuple(sorted(val.items())))
    if kripke_eval(f, m, 0):
        raise TableauError(f"extracted model does not refute {show(f)} in {logic}")
    conds = frame_conditions(logic)
    for i, r in m.relations:
        mat = np.zeros((1, m.worlds, m.worlds), dtype=bool)
        for (a, y) in r:
            mat[0, a, y] = True
        if not satisfies_conditions(mat, conds)[0]:
            raise TableauError(f"extracted frame is not {logic}")
    return Countermodel(logic, f, m, 0)


# ---------------------------------------------------------------------------
# differential testing against an embedding

@dataclass
class Discrepancy:
    formula: str
    native: str
    embedded: str
    detail: str = ""


@dataclass
class FaithfulnessReport:
    logic: str
    formulas: int = 0
    native_valid: int = 0
    discrepancies: list = field(default_factory=list)
    oracle_disagreements: list = field(default_factory=list)
    max_countermodel_worlds: int = 0
    pointwise_triples: int = 0
    pointwise_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.discrepancies or self.oracle_disagreements or self.pointwise_failures)

    def to_json(self) -> dict:
        return {
            "logic": self.logic,
            "formulas": self.formulas,
            "native_valid": self.native_valid,
            "discrepancies": [d.__dict__ for d in self.discrepancies],
            "oracle_disagreements": [d.__dict__ for d in self.oracle_disagreements],
            "max_countermodel_worlds": self.max_countermodel_worlds,
            "pointwise_triples": self.pointwise_triples,
            "pointwise_failures": [d.__dict__ for d in self.pointwise_failures],
        }


def faithfulness_corpus_check(
    emb=None,
    logic: str = "K",
    depth_max: int = 2,
    atom_count: int = 2,
    frame_bound: int = 3,
    pointwise: bool = True,
    formulas=None,
    budget_ms: int = 60_000,
) -> FaithfulnessReport:
    """Compare native verdicts with bounded verdicts of the embedding."""
    from franca.embed import catalog, translate, vld_wrap
    from franca.models import Bounds, ValidUpTo, check_valid

    names = atom_names(atom_count)
    if emb is None:
        emb = catalog(logic, props=names)
    report = FaithfulnessReport(logic)
    formulas = corpus(depth_max, names) if formulas is None else formulas
    bounds = Bounds.of(budget_ms=budget_ms, w=frame_bound)
    sig = emb.language
    for f in formulas:
        report.formulas += 1
        proof = tableau_prove(f, logic)
        native_tab = isinstance(proof, Proof)
        if not native_tab:
            report.max_countermodel_worlds = max(report.max_countermodel_worlds, proof.model.worlds)
        frames = valid_over_frames(f, frame_bound, logic)
        if native_tab != frames.valid:
            report.oracle_disagreements.append(Discrepancy(
                show(f), "valid" if native_tab else "invalid", "frames:" + ("valid" if frames.valid else "invalid"),
                "tableau and frame enumeration disagree"))
        report.native_valid += native_tab
        goal = vld_wrap(emb, translate(f, emb))
        res = check_valid(list(emb.frame_axioms), goal, sig, bounds)
        embedded = isinstance(res, ValidUpTo)
        if res.verdict == "timeout" or embedded != native_tab:
            detail = ""
            if getattr(res, "model", None) is not None:
                detail = str(res.model)
            report.discrepancies.append(Discrepancy(
                show(f), "valid" if native_tab else "invalid", res.verdict, detail))
    if pointwise:
        failures, triples = pointwise_transfer(formulas, emb, frame_bound)
        report.pointwise_triples = triples
        report.pointwise_failures = failures
    return report


def encode_tables(mats: np.ndarray, vals: np.ndarray, emb, names) -> dict:
    """Parameter tables of the embedding's finite models for stacked Kripke
    models: the accessibility matrix becomes the relation parameter and each
    atom's world set becomes its ``w->o`` table."""
    tables = {emb.rels[0]: mats}
    for j, a in enumerate(names):
        tables[a] = vals[:, j, :]
    return tables


def encode(m: KripkeModel, emb):
    """The finite model of the host logic corresponding to ``m``."""
    from franca.models import FiniteModel

    n = m.worlds
    dens = {}
    for i, r in zip(emb.rels, [m.rel(j) for j in range(1, len(emb.rels) + 1)]):
        dens[i] = tuple(tuple((x, y) in r for y in range(n)) for x in range(n))
    for a, v in m.valuation:
        dens[a] = tuple(x in v for x in range(n))
    return FiniteModel(emb.language, {1: n}, dens)


def pointwise_transfer(formulas, emb, n_max: int = 3):
    """Check native truth against the embedded term's value at every world of
    every model with at most ``n_max`` worlds (single modality)."""
    from franca.batch import BatchEvaluator, binder_depth, expand_definitions, saturate
    from franca.embed import translate

    names = sorted({a for f in formulas for a in atoms(f)})
    idx_of = {a: i for i, a in enumerate(names)}
    failures, triples = [], 0
    for n in range(1, n_max + 1):
        mats = relation_matrices(n)
        vals = valuations(n, len(names))
        nr, nv = len(mats), len(vals)
        flat_r = np.repeat(mats, nv, axis=0)
        flat_v = np.tile(vals, (nr, 1, 1))
        tables = encode_tables(flat_r, flat_v, emb, names)
        for f in formulas:
            native = np.broadcast_to(vector_eval(f, {1: mats}, vals, idx_of), (nr, nv, n)).reshape(nr * nv, n)
            t = saturate(expand_definitions(translate(f, emb), emb.language))
            ev = BatchEvaluator({1: n}, binder_depth(t), tables)
            emb_vals = ev.ev(t, 0)
            emb_vals = np.broadcast_to(emb_vals.reshape(emb_vals.shape[0], n), (nr * nv, n))
            triples += nr * nv * n
            bad = np.argwhere(native != emb_vals)
            if len(bad):
                k, x = bad[0]
                failures.append(Discrepancy(show(f), str(bool(native[k, x])), str(bool(emb_vals[k, x])),
                                            f"n={n} model={k} world={x}"))
    return failures, triples
