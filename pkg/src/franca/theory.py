"""Theory files: a line-oriented format for declarations and check directives.

One declaration or directive per line; ``--`` starts a comment.  Terms use
the syntax of ``franca.parse``.  Parsing resolves names (so that a typo is
reported with its line and column) but does not typecheck; elaboration and
execution happen in ``franca.runner``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from franca.embed import CATALOG, ALIASES, catalog
from franca.parse import (
    ParseError,
    RApp,
    RBind,
    RName,
    TokenStream,
    parse_term,
    parse_type_tokens,
    show_raw,
    tokenize,
)
from franca.typesig import Arrow, Base, FunctionalType, FAMILIES

CORPUS_DIR = Path(__file__).parent / "corpus"
MODES = ("global", "local", "meta")
FRAME_CONDITIONS = ("reflexive", "symmetric", "transitive", "serial", "euclidean")
CHECKS = ("sat", "valid", "deductive", "consistent", "minimal", "attacks", "supports", "dung", "faithful")
BUILTIN_NAMES = {"T", "F", "!", "&", "|", "=>", "vld"} | set(FAMILIES)


class DuplicateName(ParseError):
    pass


class UseBeforeDeclaration(ParseError):
    pass


# ---------------------------------------------------------------------------
# items

@dataclass(frozen=True)
class BaseTypeDecl:
    name: str


@dataclass(frozen=True)
class LogicDecl:
    name: str
    rels: tuple = ()
    props: tuple = ()
    alias: str = ""
    frames: tuple = ()

    @property
    def key(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: FunctionalType


@dataclass(frozen=True)
class DefDecl:
    name: str
    body: object  # raw term


@dataclass(frozen=True)
class ArgumentDecl:
    label: str
    premises: tuple
    conclusion: str
    mode: str = "meta"
    logic: str = ""


@dataclass(frozen=True)
class AssumeFrame:
    condition: str
    rel: str


@dataclass(frozen=True)
class Assume:
    body: object


@dataclass(frozen=True)
class ClearAssumptions:
    pass


@dataclass(frozen=True)
class EdgeDecl:
    kind: str  # attack | support
    sources: tuple
    target: str
    premise: Optional[int] = None
    implicit: tuple = ()


@dataclass(frozen=True)
class ArgRef:
    """``global(A)``, ``local(A)`` or ``meta(A)``: an argument's consequence formula."""

    mode: str
    label: str


@dataclass(frozen=True)
class Check:
    kind: str
    subject: Union[object, ArgRef, str, None] = None
    sources: tuple = ()
    premise: Optional[int] = None
    implicit: tuple = ()
    options: tuple = ()
    expect: Union[str, tuple, None] = None
    line: int = field(default=0, compare=False)

    def option(self, key, default=None):
        return dict(self.options).get(key, default)


Item = Union[BaseTypeDecl, LogicDecl, ConstDecl, DefDecl, ArgumentDecl, AssumeFrame, Assume,
             ClearAssumptions, EdgeDecl, Check]


@dataclass
class TheoryFile:
    name: str
    imports: tuple = ()
    items: tuple = ()
    path: Optional[Path] = field(default=None, compare=False)
    imported: tuple = field(default=(), compare=False, repr=False)

    @property
    def basetypes(self) -> dict:
        out = {}
        for tf in self.imported:
            out.update(tf.basetypes)
        for it in self.items:
            if isinstance(it, BaseTypeDecl):
                out[it.name] = Base(3 + len(out))
        return out

    def declarations(self, _seen=None) -> list:
        """Declarations of this file and its imports, imports first, each
        theory included once."""
        seen = set() if _seen is None else _seen
        out = []
        if self.name in seen:
            return out
        seen.add(self.name)
        for tf in self.imported:
            out.extend(tf.declarations(seen))
        out.extend(it for it in self.items if not isinstance(it, (Check, Assume, AssumeFrame, ClearAssumptions)))
        return out

    def imported_declarations(self) -> list:
        seen = {self.name}
        out = []
        for tf in self.imported:
            out.extend(tf.declarations(seen))
        return out

    @property
    def checks(self) -> list:
        return [it for it in self.items if isinstance(it, Check)]


# ---------------------------------------------------------------------------
# parsing

def resolve_import(name: str, base: Optional[Path]) -> Path:
    candidates = []
    if base is not None:
        candidates.append(base / f"{name}.thy")
    candidates.append(CORPUS_DIR / f"{name}.thy")
    for c in candidates:
        if c.exists():
            return c
    raise FileNotFoundError(f"cannot find theory {name!r} (looked in {', '.join(str(c.parent) for c in candidates)})")


def parse_theory(path, _stack=()) -> TheoryFile:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_theory_text(text, path, _stack)


def parse_theory_text(text: str, path: Optional[Path] = None, _stack=()) -> TheoryFile:
    return _Parser(text, path, _stack).run()


class _Parser:
    def __init__(self, text, path, stack):
        self.lines = text.splitlines()
        self.path = path
        self.stack = stack
        self.name = ""
        self.imports = []
        self.imported = []
        self.items = []
        self.basetypes = {}
        self.names = {}  # declared term-level names -> kind
        self.arguments = set()
        self.logic_keys = set()

    # line helpers -----------------------------------------------------

    def run(self) -> TheoryFile:
        for i, raw in enumerate(self.lines, start=1):
            toks = tokenize(raw, i, 1)
            if toks[0].kind == "eof":
                continue
            self.line_text, self.lineno = raw, i
            self.statement(TokenStream(toks))
        if not self.name:
            raise ParseError("missing 'theory <name>' header", 1, 1)
        return TheoryFile(self.name, tuple(self.imports), tuple(self.items), self.path, tuple(self.imported))

    def slice_from(self, tok, end_tok=None) -> str:
        start = tok.col - 1
        stop = len(self.line_text) if end_tok is None or end_tok.kind == "eof" else end_tok.col - 1
        return self.line_text[start:stop]

    def term_until(self, ts: TokenStream, stops=("expect",)) -> object:
        """Parse the tokens up to a stop keyword (or end of line) as one term."""
        first = ts.peek()
        if first.kind == "eof" or first.text in stops:
            ts.error("expected a term")
        while ts.peek().kind != "eof" and not (ts.peek().kind == "ident" and ts.peek().text in stops):
            ts.next()
        text = self.slice_from(first, ts.peek())
        raw = parse_term(text, self.basetypes, first.line, first.col)
        self.check_names(raw, [])
        return raw

    def term_list(self, ts, stops) -> tuple:
        """Comma-separated terms; commas never occur inside terms."""
        out = []
        while True:
            first = ts.peek()
            depth = 0
            while ts.peek().kind != "eof" and not (depth == 0 and (ts.at(",") or (ts.peek().kind == "ident" and ts.peek().text in stops))):
                if ts.at("("):
                    depth += 1
                elif ts.at(")"):
                    depth -= 1
                ts.next()
            if ts.peek() is first:
                ts.error("expected a term")
            raw = parse_term(self.slice_from(first, ts.peek()), self.basetypes, first.line, first.col)
            self.check_names(raw, [])
            out.append(raw)
            if not ts.at(","):
                return tuple(out)
            ts.next()

    def end(self, ts):
        if ts.peek().kind != "eof":
            ts.error(f"unexpected '{ts.peek().text}'")

    def declare(self, tok, kind):
        if tok.text in self.names or tok.text in BUILTIN_NAMES:
            raise DuplicateName(f"'{tok.text}' is already declared", tok.line, tok.col)
        self.names[tok.text] = kind

    def check_names(self, raw, scope):
        if isinstance(raw, RName):
            n = raw.name
            if n in scope or n in self.names or n in BUILTIN_NAMES:
                return
            base = n.split("[", 1)[0]
            if base in self.names or base in BUILTIN_NAMES or any(k.startswith(base + "[") for k in self.names):
                return
            raise UseBeforeDeclaration(f"'{n}' is used before it is declared", *raw.pos)
        if isinstance(raw, RApp):
            self.check_names(raw.fun, scope)
            self.check_names(raw.arg, scope)
        elif isinstance(raw, RBind):
            if raw.kind in ("all", "some") and not any(k.startswith("all[") for k in self.names):
                raise UseBeforeDeclaration(f"'{raw.kind}' needs a logic with quantifiers", *raw.pos)
            self.check_names(raw.body, scope + [raw.var])

    def argument_ref(self, tok):
        if tok.text not in self.arguments:
            raise UseBeforeDeclaration(f"argument '{tok.text}' is used before it is declared", tok.line, tok.col)
        return tok.text

    # statements -------------------------------------------------------

    def statement(self, ts):
        head = ts.peek()
        if head.kind != "ident":
            ts.error(f"expected a declaration or directive, found '{head.text}'")
        if not self.name and head.text != "theory":
            ts.error("expected 'theory <name>' first")
        handler = getattr(self, "st_" + head.text, None)
        if handler is None:
            ts.error(f"unknown statement '{head.text}'")
        ts.next()
        handler(ts)

    def st_theory(self, ts):
        if self.name:
            ts.error("duplicate theory header")
        self.name = ts.ident("theory name").text
        self.end(ts)

    def st_import(self, ts):
        while True:
            tok = ts.ident("theory name")
            if tok.text in self.stack:
                raise ParseError(f"import cycle through '{tok.text}'", tok.line, tok.col)
            base = self.path.parent if self.path is not None else None
            try:
                sub = parse_theory(resolve_import(tok.text, base), self.stack + (self.name,))
            except FileNotFoundError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
            self.absorb(sub)
            self.imports.append(tok.text)
            self.imported.append(sub)
            if not ts.at(","):
                break
            ts.next()
        self.end(ts)

    def absorb(self, sub: TheoryFile):
        for tf in sub.imported:
            self.absorb(tf)
        for it in sub.items:
            if isinstance(it, BaseTypeDecl):
                self.basetypes.setdefault(it.name, Base(3 + len(self.basetypes)))
            elif isinstance(it, LogicDecl):
                self.logic_keys.add(it.key)
                self._logic_names(it)
            elif isinstance(it, (ConstDecl, DefDecl)):
                self.names[it.name] = type(it).__name__
            elif isinstance(it, ArgumentDecl):
                self.arguments.add(it.label)

    def st_basetype(self, ts):
        tok = ts.ident("type name")
        if tok.text in self.basetypes or tok.text in ("o", "w", "e") or re.fullmatch(r"b[0-9]+", tok.text):
            raise DuplicateName(f"type '{tok.text}' is already declared", tok.line, tok.col)
        self.basetypes[tok.text] = Base(3 + len(self.basetypes))
        self.end(ts)
        self.items.append(BaseTypeDecl(tok.text))

    def _logic_names(self, decl: LogicDecl):
        emb = catalog(decl.name, decl.rels or None, decl.props)
        for n in emb.language.names():
            self.names.setdefault(n, "logic")

    def st_logic(self, ts):
        tok = ts.ident("logic name")
        name = ALIASES.get(tok.text, tok.text)
        if name not in CATALOG:
            raise ParseError(f"unknown logic '{tok.text}'; expected one of {', '.join(CATALOG)}", tok.line, tok.col)
        rels, props, alias, frames = (), (), "", ()
        while ts.peek().kind != "eof":
            kw = ts.ident("'rel', 'props', 'frame' or 'as'")
            if kw.text == "rel":
                rels = self.idents(ts)
            elif kw.text == "props":
                props = self.idents(ts)
            elif kw.text == "frame":
                frames = self.idents(ts)
                for f in frames:
                    if f not in FRAME_CONDITIONS:
                        raise ParseError(f"unknown frame condition '{f}'", kw.line, kw.col)
            elif kw.text == "as":
                alias = ts.ident("alias").text
            else:
                raise ParseError(f"expected 'rel', 'props', 'frame' or 'as', found '{kw.text}'", kw.line, kw.col)
        decl = LogicDecl(tok.text, rels, props, alias, frames)
        if decl.key in self.logic_keys:
            raise DuplicateName(f"logic '{decl.key}' is already declared", tok.line, tok.col)
        self.logic_keys.add(decl.key)
        self._logic_names(decl)
        self.items.append(decl)

    def idents(self, ts) -> tuple:
        out = []
        while ts.peek().kind == "ident" and ts.peek().text not in ("rel", "props", "frame", "as"):
            out.append(ts.next().text)
        return tuple(out)

    def st_const(self, ts):
        toks = [ts.ident("constant name")]
        while ts.at(","):
            ts.next()
            toks.append(ts.ident("constant name"))
        ts.expect(":")
        typ = parse_type_tokens(ts, self.basetypes)
        self.end(ts)
        for tok in toks:
            self.declare(tok, "const")
            self.items.append(ConstDecl(tok.text, typ))

    def st_def(self, ts):
        tok = ts.ident("definition name")
        ts.expect(":")
        ts.expect("=")
        body = self.term_until(ts, ())
        self.declare(tok, "def")
        self.items.append(DefDecl(tok.text, body))

    def st_argument(self, ts):
        tok = ts.ident("argument label")
        if tok.text in self.arguments:
            raise DuplicateName(f"argument '{tok.text}' is already declared", tok.line, tok.col)
        kw = ts.ident("'premises'")
        if kw.text != "premises":
            raise ParseError(f"expected 'premises', found '{kw.text}'", kw.line, kw.col)
        premises = []
        while not (ts.peek().kind == "ident" and ts.peek().text == "conclusion"):
            premises.append(self.def_ref(ts.ident("premise name")))
            if ts.at(","):
                ts.next()
            elif not (ts.peek().kind == "ident" and ts.peek().text == "conclusion"):
                ts.error(f"expected ',' or 'conclusion', found '{ts.peek().text or 'end of line'}'")
        ts.next()
        conclusion = self.def_ref(ts.ident("conclusion name"))
        mode, logic = "meta", ""
        while ts.peek().kind != "eof":
            kw = ts.ident("'mode' or 'logic'")
            if kw.text == "mode":
                m = ts.ident("mode")
                if m.text not in MODES:
                    raise ParseError(f"expected one of {', '.join(MODES)}, found '{m.text}'", m.line, m.col)
                mode = m.text
            elif kw.text == "logic":
                lt = ts.ident("logic")
                if lt.text not in self.logic_keys:
                    raise UseBeforeDeclaration(f"logic '{lt.text}' is used before it is declared", lt.line, lt.col)
                logic = lt.text
            else:
                raise ParseError(f"expected 'mode' or 'logic', found '{kw.text}'", kw.line, kw.col)
        self.arguments.add(tok.text)
        self.items.append(ArgumentDecl(tok.text, tuple(premises), conclusion, mode, logic))

    def def_ref(self, tok) -> str:
        if self.names.get(tok.text) not in ("def", "DefDecl", "const", "ConstDecl"):
            raise UseBeforeDeclaration(f"'{tok.text}' is used before it is declared", tok.line, tok.col)
        return tok.text

    def st_assume(self, ts):
        if ts.peek().kind == "ident" and ts.peek().text == "frame":
            ts.next()
            cond = ts.ident("frame condition")
            if cond.text not in FRAME_CONDITIONS:
                raise ParseError(
                    f"expected one of {', '.join(FRAME_CONDITIONS)}, found '{cond.text}'", cond.line, cond.col)
            rel = ts.ident("relation")
            if rel.text not in self.names:
                raise UseBeforeDeclaration(f"'{rel.text}' is used before it is declared", rel.line, rel.col)
            self.end(ts)
            self.items.append(AssumeFrame(cond.text, rel.text))
            return
        self.items.append(Assume(self.term_until(ts, ())))

    def st_clear(self, ts):
        kw = ts.ident("'assumptions'")
        if kw.text != "assumptions":
            raise ParseError(f"expected 'assumptions', found '{kw.text}'", kw.line, kw.col)
        self.end(ts)
        self.items.append(ClearAssumptions())

    def relation(self, ts, stops):
        """``A [+ B ...] -> C [premise N] [implicit t, ...]``"""
        sources = [self.argument_ref(ts.ident("argument"))]
        while ts.at("+"):
            ts.next()
            sources.append(self.argument_ref(ts.ident("argument")))
        ts.expect("->")
        target = self.argument_ref(ts.ident("argument"))
        premise, implicit = None, ()
        while ts.peek().kind == "ident" and ts.peek().text in ("premise", "implicit"):
            kw = ts.next()
            if kw.text == "premise":
                num = ts.next()
                if num.kind != "num":
                    raise ParseError(f"expected a premise number, found '{num.text}'", num.line, num.col)
                premise = int(num.text)
            else:
                implicit = self.term_list(ts, stops)
        return tuple(sources), target, premise, implicit

    def st_edge(self, ts):
        kind = ts.ident("'attack' or 'support'")
        if kind.text not in ("attack", "support"):
            raise ParseError(f"expected 'attack' or 'support', found '{kind.text}'", kind.line, kind.col)
        sources, target, premise, implicit = self.relation(ts, ("premise", "implicit"))
        self.end(ts)
        self.items.append(EdgeDecl(kind.text, sources, target, premise, implicit))

    def st_check(self, ts):
        kind = ts.ident("check kind")
        if kind.text not in CHECKS:
            raise ParseError(f"expected one of {', '.join(CHECKS)}, found '{kind.text}'", kind.line, kind.col)
        k = kind.text
        subject, sources, premise, implicit, options = None, (), None, (), []
        if k in ("sat", "valid"):
            subject = self.subject(ts)
        elif k in ("deductive", "consistent", "minimal"):
            subject = self.argument_ref(ts.ident("argument"))
            while ts.peek().kind == "ident" and ts.peek().text == "premises_only":
                ts.next()
                options.append(("premises_only", True))
        elif k in ("attacks", "supports"):
            sources, subject, premise, implicit = self.relation(ts, ("premise", "implicit", "expect"))
        elif k == "dung":
            sem = ts.next()
            from franca.argnet import SEMANTICS

            if sem.text not in SEMANTICS and sem.text.replace("_", "-") not in SEMANTICS:
                raise ParseError(f"expected one of {', '.join(SEMANTICS)}, found '{sem.text}'", sem.line, sem.col)
            subject = sem.text.replace("_", "-")
            while ts.peek().kind == "ident" and ts.peek().text == "setaf":
                ts.next()
                options.append(("setaf", True))
        elif k == "faithful":
            subject = ts.ident("logic").text
            while ts.peek().kind == "ident" and ts.peek().text != "expect":
                key = ts.next()
                ts.expect("=")
                val = ts.next()
                if val.kind != "num" or key.text not in ("depth", "atoms", "frames"):
                    raise ParseError("expected depth=, atoms= or frames= with a number", key.line, key.col)
                options.append((key.text, int(val.text)))
        expect = None
        if ts.peek().kind == "ident" and ts.peek().text == "expect":
            ts.next()
            expect = self.expectation(ts, k)
        self.end(ts)
        self.items.append(Check(k, subject, sources, premise, implicit, tuple(options), expect, self.lineno))

    def subject(self, ts):
        t0, t1, t2, t3 = ts.peek(), ts.peek(1), ts.peek(2), ts.peek(3)
        if t0.text in MODES and t1.text == "(" and t2.kind == "ident" and t3.text == ")":
            for _ in range(4):
                ts.next()
            return ArgRef(t0.text, self.argument_ref(t2))
        return self.term_until(ts)

    def expectation(self, ts, kind):
        if kind == "dung":
            sets = []
            while ts.at("{"):
                ts.next()
                members = []
                while not ts.at("}"):
                    members.append(self.argument_ref(ts.ident("argument")))
                    if ts.at(","):
                        ts.next()
                    elif not ts.at("}"):
                        ts.error("expected ',' or '}'")
                ts.next()
                sets.append(tuple(sorted(members)))
            if not sets:
                ts.error("expected one or more sets like {A, B}")
            return tuple(sorted(sets, key=lambda s: (len(s), s)))
        tok = ts.next()
        allowed = EXPECTATIONS[kind]
        if tok.text not in allowed:
            raise ParseError(f"expected one of {', '.join(allowed)}, found '{tok.text}'", tok.line, tok.col)
        return tok.text


EXPECTATIONS = {
    "sat": ("model", "unsat", "timeout"),
    "valid": ("valid", "countermodel", "timeout"),
    "deductive": ("valid", "countermodel", "timeout"),
    "consistent": ("model", "unsat", "timeout"),
    "minimal": ("minimal", "not-minimal"),
    "attacks": ("valid", "countermodel", "timeout"),
    "supports": ("valid", "countermodel", "timeout"),
    "faithful": ("ok", "discrepancy"),
}


# ---------------------------------------------------------------------------
# printing

def show_type_named(t: FunctionalType, names: dict) -> str:
    rev = {v: k for k, v in names.items()}
    if isinstance(t, Base):
        if t in rev:
            return rev[t]
        return {0: "o", 1: "w", 2: "e"}.get(t.index, f"b{t.index}")
    dom = show_type_named(t.dom, names)
    if isinstance(t.dom, Arrow):
        dom = f"({dom})"
    return f"{dom}->{show_type_named(t.cod, names)}"


def _show_relation(sources, target, premise, implicit) -> str:
    out = " + ".join(sources) + f" -> {target}"
    if premise is not None:
        out += f" premise {premise}"
    if implicit:
        out += " implicit " + ", ".join(show_raw(r) for r in implicit)
    return out


def show_item(it: Item, names: dict) -> str:
    if isinstance(it, BaseTypeDecl):
        return f"basetype {it.name}"
    if isinstance(it, LogicDecl):
        out = f"logic {it.name}"
        if it.rels:
            out += " rel " + " ".join(it.rels)
        if it.props:
            out += " props " + " ".join(it.props)
        if it.frames:
            out += " frame " + " ".join(it.frames)
        if it.alias:
            out += f" as {it.alias}"
        return out
    if isinstance(it, ConstDecl):
        return f"const {it.name} : {show_type_named(it.type, names)}"
    if isinstance(it, DefDecl):
        return f"def {it.name} := {show_raw(it.body)}"
    if isinstance(it, ArgumentDecl):
        out = f"argument {it.label} premises {', '.join(it.premises)} conclusion {it.conclusion} mode {it.mode}"
        return out + (f" logic {it.logic}" if it.logic else "")
    if isinstance(it, AssumeFrame):
        return f"assume frame {it.condition} {it.rel}"
    if isinstance(it, Assume):
        return f"assume {show_raw(it.body)}"
    if isinstance(it, ClearAssumptions):
        return "clear assumptions"
    if isinstance(it, EdgeDecl):
        return f"edge {it.kind} " + _show_relation(it.sources, it.target, it.premise, it.implicit)
    if isinstance(it, Check):
        return "check " + show_check(it)
    raise TypeError(f"not a theory item: {it!r}")


def show_check(c: Check) -> str:
    out = c.kind
    if c.kind in ("sat", "valid"):
        s = c.subject
        out += f" {s.mode}({s.label})" if isinstance(s, ArgRef) else f" {show_raw(s)}"
    elif c.kind in ("attacks", "supports"):
        out += " " + _show_relation(c.sources, c.subject, c.premise, c.implicit)
    elif c.kind == "faithful":
        out += f" {c.subject}" + "".join(f" {k}={v}" for k, v in c.options)
    else:
        out += " " + (c.subject.replace("-", "_") if c.kind == "dung" else c.subject)
        out += "".join(f" {k}" for k, v in c.options if v is True)
    if c.expect is not None:
        if isinstance(c.expect, tuple):
            out += " expect " + " ".join("{" + ", ".join(s) + "}" for s in c.expect)
        else:
            out += f" expect {c.expect}"
    return out


def show_theory(tf: TheoryFile) -> str:
    lines = [f"theory {tf.name}"]
    if tf.imports:
        lines.append("import " + ", ".join(tf.imports))
    names = tf.basetypes
    lines.extend(show_item(it, names) for it in tf.items)
    return "\n".join(lines) + "\n"
