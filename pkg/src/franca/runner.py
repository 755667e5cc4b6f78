"""Elaborate a parsed theory file and execute its directives in order."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from franca import argnet
from franca import term as T
from franca.embed import Embedding, catalog, host_signature, vld_wrap
from franca.kripke import faithfulness_corpus_check
from franca.models import Bounds, check_satisfiable, check_valid, frame_condition
from franca.parse import show_raw, typecheck
from franca.theory import (
    ArgRef,
    ArgumentDecl,
    Assume,
    AssumeFrame,
    BaseTypeDecl,
    Check,
    ClearAssumptions,
    ConstDecl,
    DefDecl,
    EdgeDecl,
    LogicDecl,
    TheoryFile,
    show_check,
)
from franca.typesig import O, parameter, show_type, sig_union


class ElaborationError(Exception):
    pass


@dataclass
class Context:
    sig: object = field(default_factory=host_signature)
    basetypes: dict = field(default_factory=dict)
    logics: dict = field(default_factory=dict)
    default_logic: Optional[str] = None
    defs: dict = field(default_factory=dict)
    arguments: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)

    @property
    def logic(self) -> Optional[Embedding]:
        return self.logics.get(self.default_logic)

    def term(self, raw) -> T.Term:
        defs = dict(self.defs)
        if self.logic is not None:
            defs.setdefault("vld", self.logic.vld)
        return T.beta_normalize(typecheck(raw, self.sig, defs=defs))

    def meta(self, t: T.Term, logic: Optional[Embedding] = None) -> T.Term:
        """Host-level (type o) reading of a formula."""
        if t.type == O:
            return t
        logic = logic or self.logic
        if logic is None:
            raise T.TypeMismatch(f"formula of type {show_type(t.type)} needs a logic to be wrapped",
                                 expected=O, found=t.type)
        return vld_wrap(logic, t)

    # declarations -----------------------------------------------------

    def declare(self, it):
        if isinstance(it, BaseTypeDecl):
            self.basetypes[it.name] = len(self.basetypes) + 3
        elif isinstance(it, LogicDecl):
            emb = catalog(it.name, it.rels or None, it.props)
            if it.frames:
                if not emb.rels:
                    raise ElaborationError(f"logic {it.name} has no accessibility relation for frame conditions")
                extra = tuple(frame_condition(f, T.Const(emb.sig.lookup(emb.rels[0]))) for f in it.frames)
                emb = replace(emb, frame_axioms=emb.frame_axioms + extra, frame_names=emb.frame_names + it.frames)
            self.logics[it.key] = emb
            self.sig = sig_union(self.sig, emb.language)
            if self.default_logic is None:
                self.default_logic = it.key
        elif isinstance(it, ConstDecl):
            self.sig = self.sig.with_symbols([parameter(it.name, it.type)])
        elif isinstance(it, DefDecl):
            self.defs[it.name] = self.term(it.body)
        elif isinstance(it, ArgumentDecl):
            logic = self.logics[it.logic] if it.logic else (self.logic if it.mode != "meta" else None)
            named = lambda n: self.defs[n] if n in self.defs else T.Const(self.sig.lookup(n))
            premises = tuple(named(p) for p in it.premises)
            conclusion = named(it.conclusion)
            if logic is None and any(x.type != O for x in premises + (conclusion,)):
                logic = self.logic
            self.arguments[it.label] = argnet.Argument(
                it.label, premises, conclusion, it.mode, logic, it.premises, it.conclusion)
        elif isinstance(it, EdgeDecl):
            target = self.arguments[it.target]
            implicit = tuple(self.meta(self.term(r), target.logic) for r in it.implicit)
            self.edges.append(argnet.EdgeSpec(
                it.kind, it.sources, it.target, it.premise, implicit, tuple(show_raw(r) for r in it.implicit)))
        elif isinstance(it, AssumeFrame):
            rel = self.sig.lookup(it.rel)
            self.assumptions.append(frame_condition(it.condition, T.Const(rel)))
        elif isinstance(it, Assume):
            self.assumptions.append(self.meta(self.term(it.body)))
        elif isinstance(it, ClearAssumptions):
            self.assumptions.clear()

    def graph(self, bounds: Bounds) -> argnet.ArgumentGraph:
        return argnet.build_graph(self.arguments, self.edges, self.sig, bounds, self.assumptions)


def elaborate(tf: TheoryFile) -> Context:
    """Declarations of the file and its imports (no directives)."""
    ctx = Context()
    try:
        for it in tf.declarations():
            ctx.declare(it)
    except Exception as exc:
        raise ElaborationError(f"{tf.name}: {exc}") from exc
    return ctx


# ---------------------------------------------------------------------------
# reports

@dataclass
class Record:
    directive: str
    line: int
    verdict: str
    expect: object = None
    passed: bool = True
    witness: object = None
    bounds: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    error: Optional[str] = None

    def to_json(self) -> dict:
        exp = self.expect
        if isinstance(exp, tuple):
            exp = [list(s) for s in exp]
        return {
            "directive": self.directive,
            "line": self.line,
            "verdict": self.verdict,
            "expect": exp,
            "passed": self.passed,
            "witness": self.witness,
            "bounds": self.bounds,
            "elapsed_ms": self.elapsed_ms,
            "error": self.error,
        }

    def __str__(self) -> str:
        mark = "ok  " if self.passed else "FAIL"
        extra = f": {self.error}" if self.error else ""
        return f"{mark} line {self.line}: check {self.directive} -> {self.verdict}{extra}"


def _show_expect(e):
    if isinstance(e, tuple):
        return " ".join("{" + ", ".join(s) + "}" for s in e)
    return str(e)


@dataclass
class Report:
    theory: str
    records: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "bounds": self.bounds,
            "passed": self.passed,
            "results": [r.to_json() for r in self.records],
        }

    def __str__(self) -> str:
        lines = [str(r) for r in self.records]
        n_ok = sum(r.passed for r in self.records)
        lines.append(f"{self.theory}: {n_ok}/{len(self.records)} directives passed")
        return "\n".join(lines)


def _model_json(res):
    m = getattr(res, "model", None)
    return m.to_json() if m is not None else None


def execute(check: Check, ctx: Context, bounds: Bounds, setaf: bool = False):
    """Run one directive; returns (verdict, witness)."""
    k = check.kind
    axioms = list(ctx.assumptions)
    if k in ("sat", "valid"):
        s = check.subject
        if isinstance(s, ArgRef):
            a = ctx.arguments[s.label]
            a = argnet.Argument(a.label, a.premises, a.conclusion, s.mode, a.logic or ctx.logic)
            goal = argnet.consequence_formula(a)
            axioms += a.frame_axioms()
        else:
            goal = ctx.meta(ctx.term(s))
        fn = check_satisfiable if k == "sat" else check_valid
        res = fn(axioms, goal, ctx.sig, bounds)
        return res.verdict, _model_json(res)
    if k == "deductive":
        res = argnet.is_deductive(ctx.arguments[check.subject], ctx.sig, bounds, axioms)
        return res.verdict, _model_json(res)
    if k == "consistent":
        res = argnet.is_consistent(ctx.arguments[check.subject], ctx.sig, bounds, axioms,
                                   premises_only=bool(check.option("premises_only")))
        return res.verdict, _model_json(res)
    if k == "minimal":
        a = ctx.arguments[check.subject]
        res = argnet.is_minimal(a, ctx.sig, bounds, axioms)
        wit = None if res.witness is None else [a.premise_names[i] if a.premise_names else i + 1
                                                for i in res.witness]
        return res.verdict, wit
    if k in ("attacks", "supports"):
        srcs = [ctx.arguments[s] for s in check.sources]
        target = ctx.arguments[check.subject]
        implicit = tuple(ctx.meta(ctx.term(r), target.logic) for r in check.implicit)
        if k == "attacks":
            res = argnet.attacks(srcs, target, implicit, ctx.sig, bounds, check.premise, axioms)
        else:
            _, res = argnet.supports(srcs, target, implicit, ctx.sig, bounds, check.premise, axioms)
        return res.verdict, _model_json(res)
    if k == "dung":
        graph = ctx.graph(bounds)
        exts = argnet.dung_extensions(graph, check.subject, setaf=setaf or bool(check.option("setaf")))
        found = tuple(tuple(sorted(e)) for e in exts)
        return found, graph.to_json()
    if k == "faithful":
        rep = faithfulness_corpus_check(
            logic=check.subject,
            depth_max=check.option("depth", 2),
            atom_count=check.option("atoms", 2),
            frame_bound=check.option("frames", 3),
            budget_ms=bounds.budget_ms,
        )
        return ("ok" if rep.ok else "discrepancy"), rep.to_json()
    raise ElaborationError(f"unknown directive {k!r}")


def run(tf: TheoryFile, bounds: Bounds = Bounds(), deterministic: bool = False, setaf: bool = False) -> Report:
    """Execute directives in file order, interleaved with local declarations."""
    ctx = Context()
    try:
        for it in tf.imported_declarations():
            ctx.declare(it)
    except Exception as exc:
        raise ElaborationError(f"{tf.name}: {exc}") from exc
    report = Report(tf.name, bounds=bounds.describe())
    for it in tf.items:
        if not isinstance(it, Check):
            try:
                ctx.declare(it)
            except Exception as exc:
                raise ElaborationError(f"{tf.name}: {exc}") from exc
            continue
        text = show_check(it)
        t0 = time.perf_counter()
        rec = Record(text, it.line, "error", it.expect, bounds=bounds.describe())
        try:
            rec.verdict, rec.witness = execute(it, ctx, bounds, setaf)
            rec.passed = it.expect is None or rec.verdict == it.expect
        except Exception as exc:  # recorded; the run continues
            rec.error = f"{type(exc).__name__}: {exc}"
            rec.passed = False
        rec.elapsed_ms = 0.0 if deterministic else round((time.perf_counter() - t0) * 1000, 3)
        if isinstance(rec.verdict, tuple):
            rec.verdict = _show_expect(rec.verdict)
            rec.passed = it.expect is None or rec.verdict == _show_expect(it.expect)
        report.records.append(rec)
    return report
