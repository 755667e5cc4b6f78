"""Structured argumentation on top of the embeddings.

Arguments have premises and a conclusion, each either a host formula (type
``o``) or an object formula of some embedded logic (type ``w->o``), which is
wrapped with that logic's ``vld`` before anything is checked.  Attack and
support claims become host-logic validity checks, optionally with implicit
premises; the resulting attack graph can be evaluated with Dung semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from franca import term as T
from franca.embed import Embedding, global_consequence, local_consequence, vld_wrap
from franca.models import (
    Bounds,
    CountermodelWitness,
    SatisfiableWitness,
    ValidUpTo,
    check_satisfiable,
    check_valid,
)
from franca.typesig import O, Signature, show_type

MODES = ("global", "local", "meta")


class ArgumentError(Exception):
    pass


class GraphTooLarge(ArgumentError):
    pass


@dataclass(frozen=True)
class Argument:
    label: str
    premises: tuple
    conclusion: T.Term
    mode: str = "meta"
    logic: Optional[Embedding] = field(default=None, compare=False)
    premise_names: tuple = field(default=(), compare=False)
    conclusion_name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ArgumentError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode in ("global", "local") and self.logic is None:
            raise ArgumentError(f"{self.label}: {self.mode} consequence needs an object logic")

    @property
    def logic_ref(self) -> str:
        return self.logic.name if self.logic is not None else "meta"

    def wrap(self, t: T.Term) -> T.Term:
        """Meta-level (type o) version of one of this argument's formulas."""
        if t.type == O:
            return t
        if self.logic is None:
            raise T.TypeMismatch(
                f"{self.label}: formula of type {show_type(t.type)} but no object logic to wrap it",
                expected=O, found=t.type)
        return vld_wrap(self.logic, t)

    def wrapped_premises(self) -> list:
        return [self.wrap(p) for p in self.premises]

    def wrapped_conclusion(self) -> T.Term:
        return self.wrap(self.conclusion)

    def frame_axioms(self) -> list:
        return list(self.logic.frame_axioms) if self.logic is not None else []


def sentence_argument(label: str, claim: T.Term, logic: Optional[Embedding] = None, name: str = "") -> Argument:
    """A bare claim, read as the one-premise argument from itself."""
    mode = "global" if claim.type != O else "meta"
    return Argument(label, (claim,), claim, mode, logic, (name,), name)


def consequence_formula(a: Argument, premises: Optional[Sequence[T.Term]] = None) -> T.Term:
    prem = list(a.premises if premises is None else premises)
    if a.mode == "global":
        return global_consequence(a.logic, prem, a.conclusion)
    if a.mode == "local":
        return local_consequence(a.logic, prem, a.conclusion)
    wrapped = [a.wrap(p) for p in prem]
    concl = a.wrap(a.conclusion)
    return T.implies(T.conj(*wrapped), concl) if wrapped else concl


def is_deductive(a: Argument, sig: Signature, bounds: Bounds = Bounds(), axioms=()):
    return check_valid(list(axioms) + a.frame_axioms(), consequence_formula(a), sig, bounds)


def is_consistent(a: Argument, sig: Signature, bounds: Bounds = Bounds(), axioms=(), premises_only: bool = False):
    """Satisfiability of the (wrapped) premises, together with the conclusion
    unless ``premises_only``."""
    parts = a.wrapped_premises()
    if not premises_only:
        parts.append(a.wrapped_conclusion())
    return check_satisfiable(list(axioms) + a.frame_axioms(), T.conj(*parts), sig, bounds)


@dataclass
class MinimalityResult:
    minimal: bool
    witness: Optional[tuple] = None  # indices of a proper subset that already entails
    checked: int = 0

    @property
    def verdict(self) -> str:
        return "minimal" if self.minimal else "not-minimal"


def is_minimal(a: Argument, sig: Signature, bounds: Bounds = Bounds(), axioms=()) -> MinimalityResult:
    """No proper subset of the premises entails the conclusion."""
    n = len(a.premises)
    checked = 0
    for k in range(n):
        for subset in itertools.combinations(range(n), k):
            checked += 1
            goal = consequence_formula(a, [a.premises[i] for i in subset])
            res = check_valid(list(axioms) + a.frame_axioms(), goal, sig, bounds)
            if isinstance(res, ValidUpTo):
                return MinimalityResult(False, subset, checked)
            if res.verdict == "timeout":
                raise ArgumentError(f"minimality check of {a.label} timed out")
    return MinimalityResult(True, None, checked)


def _target_premises(target: Argument, premise: Optional[int]) -> list:
    wrapped = target.wrapped_premises()
    if premise is None:
        return wrapped
    if not 1 <= premise <= len(wrapped):
        raise ArgumentError(f"{target.label} has no premise {premise}")
    return [wrapped[premise - 1]]


def attack_formula(attackers: Sequence[Argument], target: Argument, implicit=(), premise: Optional[int] = None) -> T.Term:
    """(implicit & attacker conclusions & target premises) => F"""
    if not attackers:
        raise ArgumentError("an attack needs at least one attacker")
    parts = list(implicit) + [a.wrapped_conclusion() for a in attackers] + _target_premises(target, premise)
    return T.implies(T.conj(*parts), T.FALSE)


def support_formula(supporters: Sequence[Argument], target: Argument, implicit=(), premise: int = 1) -> T.Term:
    """(implicit & supporter conclusions) => target premise"""
    if not supporters:
        raise ArgumentError("a support needs at least one supporter")
    x = _target_premises(target, premise)[0]
    parts = list(implicit) + [a.wrapped_conclusion() for a in supporters]
    return T.implies(T.conj(*parts), x)


def _axioms_for(args, axioms):
    out = list(axioms)
    for a in args:
        for ax in a.frame_axioms():
            if ax not in out:
                out.append(ax)
    return out


def attacks(attackers, target, implicit=(), sig: Signature = None, bounds: Bounds = Bounds(),
            premise: Optional[int] = None, axioms=()):
    goal = attack_formula(attackers, target, implicit, premise)
    return check_valid(_axioms_for(list(attackers) + [target], axioms), goal, sig, bounds)


def supports(supporters, target, implicit=(), sig: Signature = None, bounds: Bounds = Bounds(),
             premise: Optional[int] = None, axioms=()):
    """Check support of one premise (1-based) or, if ``premise`` is None, of
    the first premise that is entailed.  Returns (premise index, result)."""
    ax = _axioms_for(list(supporters) + [target], axioms)
    candidates = [premise] if premise is not None else range(1, len(target.premises) + 1)
    last = None
    for i in candidates:
        res = check_valid(ax, support_formula(supporters, target, implicit, i), sig, bounds)
        if isinstance(res, ValidUpTo):
            return i, res
        last = (i, res)
    return last


# ---------------------------------------------------------------------------
# graphs

@dataclass(frozen=True)
class EdgeSpec:
    kind: str  # "attack" or "support"
    sources: tuple
    target: str
    premise: Optional[int] = None
    implicit: tuple = ()
    implicit_text: tuple = ()


@dataclass
class Edge:
    kind: str
    sources: tuple
    target: str
    premise: Optional[int]
    implicit: tuple
    verified: bool
    verdict: str
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "sources": list(self.sources),
            "target": self.target,
            "premise": self.premise,
            "implicit": list(self.implicit),
            "verified": self.verified,
            "verdict": self.verdict,
            "witness": self.witness,
        }


@dataclass
class ArgumentGraph:
    nodes: tuple = ()
    attacks: list = field(default_factory=list)
    supports: list = field(default_factory=list)

    def attack_relation(self, setaf: bool = False) -> set:
        """Verified attacks as (frozenset of attackers, target); joint attacks
        are split into one edge per attacker unless ``setaf``."""
        out = set()
        for e in self.attacks:
            if not e.verified:
                continue
            if setaf:
                out.add((frozenset(e.sources), e.target))
            else:
                for s in e.sources:
                    out.add((frozenset([s]), e.target))
        return out

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "attacks": [e.to_json() for e in self.attacks],
            "supports": [e.to_json() for e in self.supports],
        }

    def to_dot(self) -> str:
        lines = ["digraph arguments {", "  rankdir=BT;"]
        for n in self.nodes:
            lines.append(f'  "{n}";')
        joint = 0
        for e in self.supports + self.attacks:
            sign = "+" if e.kind == "support" else "-"
            style = "" if e.verified else ", style=dashed"
            if len(e.sources) == 1:
                lines.append(f'  "{e.sources[0]}" -> "{e.target}" [label="{sign}"{style}];')
            else:
                joint += 1
                j = f"joint{joint}"
                lines.append(f'  "{j}" [label="⊕", shape=circle];')
                for s in e.sources:
                    lines.append(f'  "{s}" -> "{j}"{" [style=dashed]" if style else ""};')
                lines.append(f'  "{j}" -> "{e.target}" [label="{sign}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(arguments: dict, specs: Sequence[EdgeSpec], sig: Signature, bounds: Bounds = Bounds(), axioms=()):
    """Check every edge; unverified edges are kept and flagged."""
    graph = ArgumentGraph(tuple(sorted(arguments)))
    for spec in specs:
        for label in spec.sources + (spec.target,):
            if label not in arguments:
                raise ArgumentError(f"edge mentions unknown argument {label!r}")
        srcs = [arguments[s] for s in spec.sources]
        tgt = arguments[spec.target]
        if spec.kind == "attack":
            res = attacks(srcs, tgt, spec.implicit, sig, bounds, spec.premise, axioms)
            premise = spec.premise
            bucket = graph.attacks
        elif spec.kind == "support":
            premise, res = supports(srcs, tgt, spec.implicit, sig, bounds, spec.premise, axioms)
            bucket = graph.supports
        else:
            raise ArgumentError(f"unknown edge kind {spec.kind!r}")
        model = getattr(res, "model", None)
        bucket.append(Edge(
            spec.kind, spec.sources, spec.target, premise,
            tuple(spec.implicit_text) or tuple(T.show(t) for t in spec.implicit),
            isinstance(res, ValidUpTo), res.verdict, model.to_json() if model is not None else None,
        ))
    return graph


# ---------------------------------------------------------------------------
# Dung semantics

SEMANTICS = ("conflict-free", "admissible", "complete", "grounded", "preferred", "stable")
MAX_NODES = 15


class _Framework:
    """Bitmask encoding of a (possibly collective) attack relation."""

    def __init__(self, nodes, relation):
        self.nodes = tuple(nodes)
        self.bit = {n: 1 << i for i, n in enumerate(self.nodes)}
        self.attacks = []  # (attacker mask, target index)
        for srcs, tgt in relation:
            mask = 0
            for s in srcs:
                mask |= self.bit[s]
            self.attacks.append((mask, self.nodes.index(tgt)))
        self.by_target = [[m for m, t in self.attacks if t == i] for i in range(len(self.nodes))]

    def attacked_by(self, s: int) -> int:
        out = 0
        for m, t in self.attacks:
            if m & s == m:
                out |= 1 << t
        return out

    def conflict_free(self, s: int) -> bool:
        return self.attacked_by(s) & s == 0

    def defends(self, s: int, i: int) -> bool:
        hit = self.attacked_by(s)
        return all(m & hit for m in self.by_target[i])

    def defended(self, s: int) -> int:
        out = 0
        for i in range(len(self.nodes)):
            if self.defends(s, i):
                out |= 1 << i
        return out

    def admissible(self, s: int) -> bool:
        return self.conflict_free(s) and self.defended(s) & s == s

    def complete(self, s: int) -> bool:
        return self.admissible(s) and self.defended(s) == s

    def stable(self, s: int) -> bool:
        everyone = (1 << len(self.nodes)) - 1
        return self.conflict_free(s) and self.attacked_by(s) | s == everyone

    def grounded(self) -> int:
        s = 0
        while True:
            nxt = self.defended(s)
            if nxt == s:
                return s
            s = nxt

    def names(self, s: int) -> frozenset:
        return frozenset(n for n in self.nodes if s & self.bit[n])


def dung_extensions(graph, semantics: str, setaf: bool = False) -> list:
    """Extensions under ``semantics``, sorted by size then name.

    ``graph`` is an ArgumentGraph, or a pair (nodes, attacks) where attacks
    are (attacker, target) or (iterable of attackers, target) pairs."""
    if isinstance(graph, ArgumentGraph):
        nodes, relation = graph.nodes, graph.attack_relation(setaf)
    else:
        nodes, pairs = graph
        relation = set()
        for a, b in pairs:
            relation.add((frozenset([a]) if isinstance(a, str) else frozenset(a), b))
    if len(nodes) > MAX_NODES:
        raise GraphTooLarge(f"{len(nodes)} arguments; brute force handles at most {MAX_NODES}")
    if semantics not in SEMANTICS:
        raise ArgumentError(f"unknown semantics {semantics!r}")
    fw = _Framework(nodes, relation)
    if semantics == "grounded":
        return [fw.names(fw.grounded())]
    everything = range(1 << len(fw.nodes))
    if semantics == "conflict-free":
        found = [s for s in everything if fw.conflict_free(s)]
    elif semantics == "admissible":
        found = [s for s in everything if fw.admissible(s)]
    elif semantics == "complete":
        found = [s for s in everything if fw.complete(s)]
    elif semantics == "stable":
        found = [s for s in everything if fw.stable(s)]
    else:
        adm = [s for s in everything if fw.admissible(s)]
        found = [s for s in adm if not any(t != s and t & s == s for t in adm)]
    exts = [fw.names(s) for s in found]
    return sorted(exts, key=lambda e: (len(e), sorted(e)))
