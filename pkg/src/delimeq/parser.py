"""Concrete syntax: a small s-expression reader plus parsers and printers for
terms, evaluation contexts, and multi-hole contexts of both calculi.

Round trip is exact: parse(format(x)) == x.  Macros expand at parse time and
print in expanded form.  `;` starts a comment running to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import contexts as mc
from . import lamshift as ls
from . import stdlib
from .terms import (
    App,
    AppL,
    AppR,
    ContVal,
    Delim,
    EvalCtx,
    Grab,
    HOLE,
    Hole,
    Lam,
    New,
    PromptVal,
    Reset,
    Term,
    Throw,
    Var,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"{msg}{where}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int


SExp = Atom | SList

_DELIMS = set("() \t\n\r;")


def tokenize(src: str):
    line, col, i = 1, 1, 0
    out = []
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < len(src) and src[i] != "\n":
                i += 1
        elif ch in "()":
            out.append((ch, line, col))
            i += 1
            col += 1
        else:
            j = i
            while j < len(src) and src[j] not in _DELIMS:
                j += 1
            out.append((src[i:j], line, col))
            col += j - i
            i = j
    return out


def read_sexps(src: str) -> list[SExp]:
    toks = tokenize(src)
    pos = 0

    def read() -> SExp:
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of input")
        text, ln, cl = toks[pos]
        pos += 1
        if text == "(":
            items = []
            while True:
                if pos >= len(toks):
                    raise ParseError("missing closing paren", ln, cl)
                if toks[pos][0] == ")":
                    pos += 1
                    return SList(tuple(items), ln, cl)
                items.append(read())
        if text == ")":
            raise ParseError("unexpected )", ln, cl)
        return Atom(text, ln, cl)

    out = []
    while pos < len(toks):
        out.append(read())
    return out


def read_one(src: str) -> SExp:
    sx = read_sexps(src)
    if len(sx) != 1:
        raise ParseError(f"expected exactly one expression, found {len(sx)}")
    return sx[0]


def _err(sx: SExp, msg: str):
    raise ParseError(msg, sx.line, sx.col)


def _name(sx: SExp) -> str:
    if not isinstance(sx, Atom) or sx.text in ("_",) or sx.text.startswith("#"):
        _err(sx, "expected a variable name")
    return sx.text


# ---------------------------------------------------------------------------
# Multi-prompt terms


def term_of_sexp(sx: SExp, overrides: dict[str, str] | None = None) -> Term:
    ov = overrides or {}

    def go(sx: SExp) -> Term:
        match sx:
            case Atom(text, _, _):
                nm = ov.get(text, text)
                if stdlib.is_macro(nm) and nm in stdlib._NULLARY:
                    return stdlib.expand(nm)
                if text == "_" or text.startswith("#"):
                    _err(sx, f"{text} is only valid inside a context")
                return Var(text)
            case SList((Atom("lam", _, _), x, b), _, _):
                return Lam(_name(x), go(b))
            case SList((Atom("new", _, _), x, b), _, _):
                return New(_name(x), go(b))
            case SList((Atom("reset", _, _), v, b), _, _):
                return Reset(go(v), go(b))
            case SList((Atom("grab", _, _), v, x, b), _, _):
                return Grab(go(v), _name(x), go(b))
            case SList((Atom("throw", _, _), v, b), _, _):
                return Throw(go(v), go(b))
            case SList((Atom("prompt", _, _), Atom(n, ln, cl)), _, _):
                if not n.isdigit():
                    raise ParseError("prompt id must be a natural number", ln, cl)
                return PromptVal(int(n))
            case SList((Atom("cont", _, _), e), _, _):
                return ContVal(ctx_of_sexp(e, ov))
            case SList((Atom(head, _, _), *args), _, _) if stdlib.is_macro(ov.get(head, head)):
                nm = ov.get(head, head)
                if nm in stdlib._NULLARY:
                    out = stdlib.expand(nm)
                    for a in args:
                        out = App(out, go(a))
                    return out
                if nm == "let":
                    if len(args) != 3:
                        _err(sx, "let takes (let x e1 e2)")
                    return stdlib.expand("let", _name(args[0]), go(args[1]), go(args[2]))
                if nm == "fix":
                    if len(args) != 3:
                        _err(sx, "fix takes (fix f x body)")
                    return stdlib.expand("fix", _name(args[0]), _name(args[1]), go(args[2]))
                return stdlib.expand(nm, *(go(a) for a in args))
            case SList((f, a), _, _):
                return App(go(f), go(a))
        _err(sx, "cannot parse term")

    return go(sx)


def _holes_on_spine(sx: SExp) -> int:
    """Count `_` atoms reachable without entering a (cont ...) subtree."""
    match sx:
        case Atom("_", _, _):
            return 1
        case Atom(_, _, _):
            return 0
        case SList((Atom("cont", _, _), _), _, _):
            return 0
        case SList(items, _, _):
            return sum(_holes_on_spine(i) for i in items)
    return 0


def ctx_of_sexp(sx: SExp, ov: dict[str, str] | None = None) -> EvalCtx:
    ov = ov or {}
    match sx:
        case Atom("_", _, _):
            return HOLE
        case SList((Atom("reset", _, _), p, c), _, _):
            pv = term_of_sexp(p, ov)
            if not isinstance(pv, PromptVal):
                _err(p, "context delimiter must be a prompt literal")
            return Delim(pv.prompt, ctx_of_sexp(c, ov))
        case SList((a, b), _, _):
            la, lb = _holes_on_spine(a), _holes_on_spine(b)
            if la == 1 and lb == 0:
                return AppL(ctx_of_sexp(a, ov), term_of_sexp(b, ov))
            if la == 0 and lb == 1:
                return AppR(term_of_sexp(a, ov), ctx_of_sexp(b, ov))
            _err(sx, "a context needs exactly one hole on its spine")
    _err(sx, "cannot parse evaluation context")


def parse_term(src: str, calculus: str = "lambdabla", overrides: dict[str, str] | None = None):
    sx = read_one(src)
    if calculus == "lambdabla":
        return term_of_sexp(sx, overrides)
    if calculus == "lamshift":
        return sterm_of_sexp(sx)
    raise ValueError(f"unknown calculus {calculus!r}")


def parse_eval_ctx(src: str) -> EvalCtx:
    return ctx_of_sexp(read_one(src))


# ---------------------------------------------------------------------------
# Multi-hole contexts (labels, candidate files)


def _hole_index(text: str, sx: SExp) -> int:
    if not text.startswith("#") or not text[1:].isdigit():
        _err(sx, f"expected #<index>, got {text}")
    return int(text[1:])


def mctx_of_sexp(sx: SExp, kind: str):
    """kind: "c" | "cv" | "edia"."""
    if kind == "cv":
        match sx:
            case Atom(text, _, _) if text.startswith("#"):
                return mc.CvHole(_hole_index(text, sx))
            case Atom("_", _, _):
                _err(sx, "a value context has no run hole")
            case Atom(text, _, _):
                if stdlib.is_macro(text) or text.isdigit() or text in ("prompt", "cont", "star"):
                    _err(sx, f"{text} is not a context variable (contexts are promptless)")
                return mc.CvVar(text)
            case SList((Atom("lam", _, _), x, b), _, _):
                return mc.CvLam(_name(x), mctx_of_sexp(b, "c"))
            case SList((Atom("cont", _, _), e), _, _):
                return mc.CvCont(mctx_of_sexp(e, "edia"))
        _err(sx, "cannot parse value context")
    if kind == "c":
        match sx:
            case SList((Atom("new", _, _), x, b), _, _):
                return mc.CNew(_name(x), mctx_of_sexp(b, "c"))
            case SList((Atom("reset", _, _), v, b), _, _):
                return mc.CReset(mctx_of_sexp(v, "cv"), mctx_of_sexp(b, "c"))
            case SList((Atom("grab", _, _), v, x, b), _, _):
                return mc.CGrab(mctx_of_sexp(v, "cv"), _name(x), mctx_of_sexp(b, "c"))
            case SList((Atom("throw", _, _), v, b), _, _):
                return mc.CThrow(mctx_of_sexp(v, "cv"), mctx_of_sexp(b, "c"))
            case SList((Atom("star", _, _), Atom(n, _, _), b), _, _):
                return mc.CStar(int(n), mctx_of_sexp(b, "c"))
            case SList((f, a), _, _) if not isinstance(f, Atom) or f.text not in ("lam", "cont"):
                return mc.CApp(mctx_of_sexp(f, "c"), mctx_of_sexp(a, "c"))
            case _:
                return mc.CVal(mctx_of_sexp(sx, "cv"))
    if kind == "edia":
        match sx:
            case Atom("_", _, _):
                return mc.E_HOLE
            case SList((Atom("reset", _, _), Atom(t, _, _), c), _, _) if t.startswith("#"):
                return mc.EDelim(_hole_index(t, sx), mctx_of_sexp(c, "edia"))
            case SList((Atom("star", _, _), Atom(n, _, _), c), _, _):
                return mc.EStar(int(n), mctx_of_sexp(c, "edia"))
            case SList((a, b), _, _):
                la, lb = _holes_on_spine(a), _holes_on_spine(b)
                if la == 1 and lb == 0:
                    return mc.EAppL(mctx_of_sexp(a, "edia"), mctx_of_sexp(b, "c"))
                if la == 0 and lb == 1:
                    return mc.EAppR(mctx_of_sexp(a, "cv"), mctx_of_sexp(b, "edia"))
                _err(sx, "an evaluation context needs exactly one run hole")
        _err(sx, "cannot parse multi-hole evaluation context")
    raise ValueError(f"unknown context kind {kind!r}")


# ---------------------------------------------------------------------------
# Shift/reset terms and contexts

_S_MACROS = {"omega", "unit"}


def sterm_of_sexp(sx: SExp) -> ls.STerm:
    def lift(t: Term) -> ls.STerm:
        match t:
            case Var(x):
                return ls.SVar(x)
            case Lam(x, b):
                return ls.SLam(x, lift(b))
            case App(f, a):
                return ls.SApp(lift(f), lift(a))
        raise AssertionError

    match sx:
        case Atom(text, _, _) if text in _S_MACROS:
            return lift(stdlib.expand(text))
        case Atom("_", _, _):
            _err(sx, "_ is only valid inside a context")
        case Atom(text, _, _):
            return ls.SVar(text)
        case SList((Atom("lam", _, _), x, b), _, _):
            return ls.SLam(_name(x), sterm_of_sexp(b))
        case SList((Atom("reset", _, _), b), _, _):
            return ls.SReset(sterm_of_sexp(b))
        case SList((Atom("shift", _, _), x, b), _, _):
            return ls.SShift(_name(x), sterm_of_sexp(b))
        case SList((Atom("let", _, _), x, e1, e2), _, _):
            return ls.SApp(ls.SLam(_name(x), sterm_of_sexp(e2)), sterm_of_sexp(e1))
        case SList((Atom("seq", _, _), e1, e2), _, _):
            return ls.SApp(ls.SLam("_ignore", sterm_of_sexp(e2)), sterm_of_sexp(e1))
        case SList((f, a), _, _):
            return ls.SApp(sterm_of_sexp(f), sterm_of_sexp(a))
    _err(sx, "cannot parse shift/reset term")


def sctx_of_sexp(sx: SExp) -> ls.SCtx:
    match sx:
        case Atom("_", _, _):
            return ls.S_HOLE
        case SList((Atom("reset", _, _), c), _, _):
            return ls.SDelim(sctx_of_sexp(c))
        case SList((a, b), _, _):
            la, lb = _holes_on_spine(a), _holes_on_spine(b)
            if la == 1 and lb == 0:
                return ls.SAppL(sctx_of_sexp(a), sterm_of_sexp(b))
            if la == 0 and lb == 1:
                return ls.SAppR(sterm_of_sexp(a), sctx_of_sexp(b))
            _err(sx, "a context needs exactly one hole on its spine")
    _err(sx, "cannot parse shift/reset context")


def parse_sctx(src: str) -> ls.SCtx:
    return sctx_of_sexp(read_one(src))


# ---------------------------------------------------------------------------
# Printing


def fmt(x) -> str:
    match x:
        case Var(n):
            return n
        case Lam(n, b):
            return f"(lam {n} {fmt(b)})"
        case App(f, a):
            return f"({fmt(f)} {fmt(a)})"
        case New(n, b):
            return f"(new {n} {fmt(b)})"
        case Reset(v, b):
            return f"(reset {fmt(v)} {fmt(b)})"
        case Grab(v, n, b):
            return f"(grab {fmt(v)} {n} {fmt(b)})"
        case Throw(v, b):
            return f"(throw {fmt(v)} {fmt(b)})"
        case PromptVal(p):
            return f"(prompt {p})"
        case ContVal(e):
            return f"(cont {fmt(e)})"
        case Hole():
            return "_"
        case AppL(c, a):
            return f"({fmt(c)} {fmt(a)})"
        case AppR(f, c):
            return f"({fmt(f)} {fmt(c)})"
        case Delim(p, c):
            return f"(reset (prompt {p}) {fmt(c)})"
        # multi-hole contexts
        case mc.CvVar(n):
            return n
        case mc.CvLam(n, b):
            return f"(lam {n} {fmt(b)})"
        case mc.CvCont(e):
            return f"(cont {fmt(e)})"
        case mc.CvHole(i):
            return f"#{i}"
        case mc.CVal(v):
            return fmt(v)
        case mc.CApp(f, a):
            return f"({fmt(f)} {fmt(a)})"
        case mc.CNew(n, b):
            return f"(new {n} {fmt(b)})"
        case mc.CReset(v, b):
            return f"(reset {fmt(v)} {fmt(b)})"
        case mc.CGrab(v, n, b):
            return f"(grab {fmt(v)} {n} {fmt(b)})"
        case mc.CThrow(v, b):
            return f"(throw {fmt(v)} {fmt(b)})"
        case mc.CStar(i, b):
            return f"(star {i} {fmt(b)})"
        case mc.EHole():
            return "_"
        case mc.EAppL(c, a):
            return f"({fmt(c)} {fmt(a)})"
        case mc.EAppR(f, c):
            return f"({fmt(f)} {fmt(c)})"
        case mc.EDelim(i, c):
            return f"(reset #{i} {fmt(c)})"
        case mc.EStar(i, c):
            return f"(star {i} {fmt(c)})"
        # shift/reset
        case ls.SVar(n):
            return n
        case ls.SLam(n, b):
            return f"(lam {n} {fmt(b)})"
        case ls.SApp(f, a):
            return f"({fmt(f)} {fmt(a)})"
        case ls.SReset(b):
            return f"(reset {fmt(b)})"
        case ls.SShift(n, b):
            return f"(shift {n} {fmt(b)})"
        case ls.SHole():
            return "_"
        case ls.SAppL(c, a):
            return f"({fmt(c)} {fmt(a)})"
        case ls.SAppR(f, c):
            return f"({fmt(f)} {fmt(c)})"
        case ls.SDelim(c):
            return f"(reset {fmt(c)})"
    raise TypeError(f"cannot print {x!r}")
