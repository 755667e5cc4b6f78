"""Concrete syntax for terms: tokenizer, raw trees, printer and type checker.

Raw trees are untyped and keep the user's names; ``typecheck`` turns them
into kernel terms against a signature.  Binder sugar:

    \\x:T. b        abstraction
    forall x:T. b   Pi (\\x:T. b)
    exists x:T. b   !(forall x:T. !b)
    all x:T. b      lifted quantifier ``all[T]`` (world-relative)
    some x:T. b     not (all x:T. not b)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from franca import term as T
from franca.typesig import (
    Arrow,
    Base,
    FunctionalType,
    Signature,
    family_member,
    show_type,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.bare = message


# ---------------------------------------------------------------------------
# raw trees

@dataclass(frozen=True)
class RName:
    name: str
    pos: tuple = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class RApp:
    fun: "Raw"
    arg: "Raw"
    pos: tuple = field(default=(1, 1), compare=False)


@dataclass(frozen=True)
class RBind:
    """Abstraction or quantifier sugar; ``kind`` is one of BINDERS."""

    kind: str
    var: str
    type: FunctionalType
    body: "Raw"
    pos: tuple = field(default=(1, 1), compare=False)


Raw = Union[RName, RApp, RBind]

BINDERS = {"\\": "lam", "forall": "forall", "exists": "exists", "all": "all", "some": "some"}
KEYWORDS = {"forall", "exists", "all", "some"}
BIN_PREC = {"=>": 1, "|": 2, "&": 3, "==": 4}


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<op>=>|==|->|[\\.:()!&|,{}=+])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(\[[^\]\s]+\])?)
  | (?P<num>[0-9]+)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        s = m.group(0)
        if m.lastgroup not in ("ws", "comment"):
            out.append(Token(m.lastgroup, s, line, col))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        i = m.end()
    out.append(Token("eof", "", line, col))
    return out


class TokenStream:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, *texts) -> bool:
        t = self.peek()
        return t.kind != "eof" and t.text in texts

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            got = t.text or "end of input"
            raise ParseError(f"expected '{text}', found '{got}'", t.line, t.col)
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            got = t.text or "end of input"
            raise ParseError(f"expected {what}, found '{got}'", t.line, t.col)
        return self.next()

    def error(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)


# ---------------------------------------------------------------------------
# types

def parse_type_tokens(ts: TokenStream, basetypes: Optional[dict] = None) -> FunctionalType:
    left = _type_atom(ts, basetypes)
    if ts.at("->"):
        ts.next()
        return Arrow(left, parse_type_tokens(ts, basetypes))
    return left


def _type_atom(ts, basetypes):
    if ts.at("("):
        ts.next()
        t = parse_type_tokens(ts, basetypes)
        ts.expect(")")
        return t
    tok = ts.ident("a type")
    name = tok.text
    if name == "o":
        return Base(0)
    if name == "w":
        return Base(1)
    if name == "e":
        return Base(2)
    m = re.fullmatch(r"b([0-9]+)", name)
    if m:
        return Base(int(m.group(1)))
    if basetypes and name in basetypes:
        return basetypes[name]
    raise ParseError(f"unknown type '{name}'", tok.line, tok.col)


# ---------------------------------------------------------------------------
# terms

def parse_term(text: str, basetypes: Optional[dict] = None, line: int = 1, col: int = 1) -> Raw:
    ts = TokenStream(tokenize(text, line, col))
    r = parse_expr(ts, basetypes)
    if ts.peek().kind != "eof":
        ts.error(f"unexpected '{ts.peek().text}' after term")
    return r


def parse_expr(ts: TokenStream, basetypes=None) -> Raw:
    if _binder_ahead(ts):
        return _binder(ts, basetypes)
    return _binary(ts, 1, basetypes)


def _binder_ahead(ts) -> bool:
    t = ts.peek()
    return t.text == "\\" or (t.kind == "ident" and t.text in KEYWORDS)


def _binder(ts, basetypes):
    tok = ts.next()
    kind = BINDERS[tok.text]
    var = ts.ident("a bound variable").text
    ts.expect(":")
    typ = parse_type_tokens(ts, basetypes)
    ts.expect(".")
    body = parse_expr(ts, basetypes)
    return RBind(kind, var, typ, body, (tok.line, tok.col))


def _binary(ts, min_prec, basetypes):
    left = _unary(ts, basetypes)
    while True:
        t = ts.peek()
        if t.kind != "op" or t.text not in BIN_PREC or BIN_PREC[t.text] < min_prec:
            return left
        op = t.text
        prec = BIN_PREC[op]
        ts.next()
        if _binder_ahead(ts):
            right = _binder(ts, basetypes)
        elif op == "=>":
            right = _binary(ts, prec, basetypes)  # right associative
        else:
            right = _binary(ts, prec + 1, basetypes)
        left = RApp(RApp(RName(op, (t.line, t.col)), left, (t.line, t.col)), right, (t.line, t.col))
        if op == "==" and ts.at("=="):
            ts.error("'==' does not chain; add parentheses")


def _unary(ts, basetypes):
    if ts.at("!"):
        t = ts.next()
        arg = _binder(ts, basetypes) if _binder_ahead(ts) else _unary(ts, basetypes)
        return RApp(RName("!", (t.line, t.col)), arg, (t.line, t.col))
    return _application(ts, basetypes)


def _application(ts, basetypes):
    head = _atom(ts, basetypes)
    while True:
        if _atom_ahead(ts):
            head = RApp(head, _atom(ts, basetypes), head.pos)
        elif _binder_ahead(ts):
            return RApp(head, _binder(ts, basetypes), head.pos)
        else:
            return head


def _atom_ahead(ts) -> bool:
    t = ts.peek()
    return (t.kind == "ident" and t.text not in KEYWORDS) or t.text == "("


def _atom(ts, basetypes):
    t = ts.peek()
    if t.text == "(":
        ts.next()
        if ts.peek().kind == "op" and ts.peek().text in ("&", "|", "=>", "==", "!") and ts.peek(1).text == ")":
            op = ts.next()
            ts.next()
            return RName(op.text, (op.line, op.col))
        r = parse_expr(ts, basetypes)
        ts.expect(")")
        return r
    tok = ts.ident("a term")
    return RName(tok.text, (tok.line, tok.col))


# ---------------------------------------------------------------------------
# printing raw trees

def show_raw(r: Raw, prec: int = 0) -> str:
    if isinstance(r, RName):
        return f"({r.name})" if r.name in BIN_PREC or r.name == "!" else r.name
    if isinstance(r, RBind):
        lead = "\\" if r.kind == "lam" else r.kind + " "
        s = f"{lead}{r.var}:{_show_type_tok(r.type)}. {show_raw(r.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(r.fun, RApp) and isinstance(r.fun.fun, RName) and r.fun.fun.name in BIN_PREC:
        op = r.fun.fun.name
        p = BIN_PREC[op]
        lp, rp = (p + 1, p) if op == "=>" else (p, p + 1)
        if op == "==":
            lp = rp = p + 1
        s = f"{show_raw(r.fun.arg, lp)} {op} {show_raw(r.arg, rp)}"
        return f"({s})" if prec > p else s
    if isinstance(r.fun, RName) and r.fun.name == "!":
        s = "!" + show_raw(r.arg, 10)
        return f"({s})" if prec > 9 else s
    s = f"{show_raw(r.fun, 9)} {show_raw(r.arg, 10)}"
    return f"({s})" if prec >= 10 else s


def _show_type_tok(t: FunctionalType) -> str:
    s = show_type(t)
    return f"({s})" if isinstance(t, Arrow) else s


# ---------------------------------------------------------------------------
# type checking

def _err_pos(r):
    return getattr(r, "pos", (1, 1))


def typecheck(
    raw: Raw,
    sig: Signature,
    env: Optional[dict] = None,
    defs: Optional[dict] = None,
) -> T.Term:
    """Annotate ``raw`` against ``sig``.

    Names resolve innermost-first: bound variables, then ``env`` (free
    variables with declared types), then ``defs`` (named closed terms that
    are inlined), then symbols of ``sig``.  Type-indexed families such as
    ``Pi`` or ``==`` pick their instance from the type of their argument.
    """
    checker = _Checker(sig, env or {}, defs or {})
    return checker.check(raw, [])


class _Checker:
    def __init__(self, sig, env, defs):
        self.sig = sig
        self.env = env
        self.defs = defs

    def check(self, r, scope):
        if isinstance(r, RName):
            t = self.name(r, scope)
            if t is None:
                if self._indexed_candidates(r.name):
                    raise T.TypeMismatch(
                        f"{r.pos[0]}:{r.pos[1]}: '{r.name}' needs an argument to fix its type",
                        position=r.pos,
                    )
                raise T.UnknownSymbol(f"{r.pos[0]}:{r.pos[1]}: unknown symbol '{r.name}'")
            return t
        if isinstance(r, RBind):
            return self.binder(r, scope)
        if isinstance(r.fun, RName) and self.name(r.fun, scope) is None:
            arg = self.check(r.arg, scope)
            head = self.indexed(r.fun, arg.type)
            return self.apply(head, arg, r)
        return self.apply(self.check(r.fun, scope), self.check(r.arg, scope), r)

    def apply(self, f, a, r):
        try:
            return T.App(f, a)
        except T.TypeMismatch as exc:
            pos = _err_pos(r)
            raise T.TypeMismatch(f"{pos[0]}:{pos[1]}: {exc}", exc.expected, exc.found, pos) from None

    def name(self, r, scope):
        n = r.name
        for depth, (vname, vtype) in enumerate(reversed(scope)):
            if vname == n:
                return T.Bound(depth, vtype, vname)
        if n in self.env:
            return T.Free(n, self.env[n])
        if n in self.defs:
            return self.defs[n]
        s = self.sig.lookup(n)
        return None if s is None else T.Const(s)

    def _indexed_candidates(self, n):
        if n in self.sig.families:
            return [n]
        prefix = n + "["
        return sorted((s for s in self.sig.symbols if s.name.startswith(prefix)), key=lambda s: s.name)

    def indexed(self, r, argtype):
        n = r.name
        if n in self.sig.families:
            if n == "Pi" and not isinstance(argtype, Arrow):
                raise T.TypeMismatch(f"{r.pos[0]}:{r.pos[1]}: Pi expects a predicate", position=r.pos)
            index = argtype.dom if n == "Pi" else argtype
            return T.Const(family_member(n, index))
        candidates = self._indexed_candidates(n)
        for s in candidates:
            if isinstance(s.type, Arrow) and s.type.dom == argtype:
                return T.Const(s)
        if candidates:
            raise T.TypeMismatch(
                f"{r.pos[0]}:{r.pos[1]}: no instance of '{n}' accepts {show_type(argtype)}",
                found=argtype, position=r.pos,
            )
        raise T.UnknownSymbol(f"{r.pos[0]}:{r.pos[1]}: unknown symbol '{n}'")

    def binder(self, r, scope):
        body = self.check(r.body, scope + [(r.var, r.type)])
        lam = T.Lam(r.type, body, r.var)
        if r.kind == "lam":
            return lam
        if r.kind in ("forall", "exists"):
            if body.type != Base(0):
                raise T.TypeMismatch(
                    f"{r.pos[0]}:{r.pos[1]}: body of {r.kind} must have type o, not {show_type(body.type)}",
                    Base(0), body.type, r.pos,
                )
            if r.kind == "forall":
                return T.App(T.Const(family_member("Pi", r.type)), lam)
            inner = T.Lam(r.type, T.neg(body), r.var)
            return T.neg(T.App(T.Const(family_member("Pi", r.type)), inner))
        head = self.indexed(RName("all", r.pos), lam.type)
        if r.kind == "all":
            return self.apply(head, lam, r)
        not_ = self.sig.lookup("not")
        if not_ is None:
            raise T.UnknownSymbol(f"{r.pos[0]}:{r.pos[1]}: 'some' needs the lifted 'not'")
        notc = T.Const(not_)
        inner = T.Lam(r.type, self.apply(notc, body, r), r.var)
        return self.apply(notc, self.apply(head, inner, r), r)


def term(text: str, sig: Signature, env: Optional[dict] = None, defs: Optional[dict] = None) -> T.Term:
    """Parse and typecheck in one go."""
    return typecheck(parse_term(text), sig, env, defs)
