"""Candidate relation files: named seeds plus generator rules whose
conclusions are templates over the premise pair's environments.

Template syntax extends the term syntax with:
  #n            value at environment position n (1-based)
  (param X)     a context parameter applied to this side's environment
  (contparam X) the captured-context value built from an Edia parameter
  (freshp X)    a per-side canonically fresh prompt
  (star i T)    plug context-environment entry i (or a stored continuation)
  (plug X T)    wrap T in the context bound to parameter X (pure kinds)
Rules carry parameter kind annotations: cv, c, edia (multi-prompt) and
cv, c, fdia, pure (shift/reset), each with a size bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import contexts as mc
from . import lamshift as ls
from . import stdlib
from .lts import State, mk_state
from .parser import (
    Atom,
    ParseError,
    SExp,
    SList,
    _err,
    _name,
    ctx_of_sexp,
    mctx_of_sexp,
    read_sexps,
    sctx_of_sexp,
    sterm_of_sexp,
    term_of_sexp,
)
from .reduction import least_fresh_prompt
from .terms import App, ContVal, PromptVal, Term, is_value, plug, prompts_of


class IllFormedRule(Exception):
    pass


class SkipInstance(Exception):
    """A template does not fit this particular premise instantiation."""



@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # cv | c | edia | fdia | pure
    size: int


@dataclass(frozen=True)
class Rule:
    name: str
    premise: str  # "pair" | "axiom"
    params: tuple[Param, ...]
    fresh: tuple[str, ...]
    left: tuple[tuple[str, SExp], ...]  # ("term"|"ctx", template)
    right: tuple[tuple[str, SExp], ...]


@dataclass
class Candidate:
    calculus: str  # lambdabla | lamshift
    variant: str = "standard"  # lambdabla: standard | star
    semantics: str = "relaxed"  # lamshift: original | relaxed
    prompt_check: bool = True
    seeds: list = field(default_factory=list)  # list of (stateL, stateR)
    rules: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing


def parse_candidate(src: str) -> Candidate:
    sxs = read_sexps(src)
    if len(sxs) != 1:
        raise ParseError("candidate file must hold one (candidate ...) form")
    sx = sxs[0]
    match sx:
        case SList((Atom("candidate", _, _), *items), _, _):
            pass
        case _:
            raise ParseError("expected (candidate ...)")
    cand = Candidate(calculus="lambdabla")
    for item in items:
        match item:
            case SList((Atom("calculus", _, _), Atom(v, _, _)), _, _):
                if v not in ("lambdabla", "lamshift"):
                    _err(item, f"unknown calculus {v}")
                cand.calculus = v
            case SList((Atom("variant", _, _), Atom(v, _, _)), _, _):
                if v not in ("standard", "star"):
                    _err(item, f"unknown variant {v}")
                cand.variant = v
            case SList((Atom("semantics", _, _), Atom(v, _, _)), _, _):
                if v not in ("original", "relaxed"):
                    _err(item, f"unknown semantics {v}")
                cand.semantics = v
            case SList((Atom("promptcheck", _, _), Atom(v, _, _)), _, _):
                cand.prompt_check = v in ("on", "true")
            case SList((Atom("seed", _, _), left, right), _, _):
                cand.seeds.append((_state_of_sexp(left, cand.calculus), _state_of_sexp(right, cand.calculus)))
            case SList((Atom("rule", _, _), Atom(nm, _, _), *body), _, _):
                cand.rules.append(_rule_of_sexp(nm, body, cand.calculus))
            case _:
                _err(item, "unknown candidate clause")
    return cand


def _state_of_sexp(sx: SExp, calculus: str):
    match sx:
        case SList((Atom("state", _, _), *parts), _, _):
            ctxenv: list = []
            env: list = []
            running = None
            for p in parts:
                match p:
                    case SList((Atom("ctxenv", _, _), *cs), _, _):
                        ctxenv = [sctx_of_sexp(c) for c in cs]
                    case SList((Atom("env", _, _), *vs), _, _):
                        env = [_term(v, calculus) for v in vs]
                    case SList((Atom("run", _, _), t), _, _):
                        running = _term(t, calculus)
                    case _:
                        _err(p, "unknown state component")
            if calculus == "lambdabla":
                if ctxenv:
                    raise ParseError("multi-prompt states have no context environment")
                return mk_state(env, running)
            return ls.mk_sstate(ctxenv, env, running)
    _err(sx, "expected (state ...)")


def _term(sx: SExp, calculus: str):
    return term_of_sexp(sx) if calculus == "lambdabla" else sterm_of_sexp(sx)


def _rule_of_sexp(name: str, body, calculus: str) -> Rule:
    premise = "pair"
    params: list[Param] = []
    fresh: list[str] = []
    left: list = []
    right: list = []
    for item in body:
        match item:
            case SList((Atom("premise", _, _), Atom(v, _, _)), _, _):
                if v not in ("pair", "axiom"):
                    _err(item, f"unknown premise kind {v}")
                premise = v
            case SList((Atom("param", _, _), Atom(nm, _, _), Atom(kind, _, _), Atom(sz, _, _)), _, _):
                if kind not in ("cv", "c", "edia", "fdia", "pure"):
                    _err(item, f"unknown parameter kind {kind}")
                params.append(Param(nm, kind, int(sz)))
            case SList((Atom("freshp", _, _), Atom(nm, _, _)), _, _):
                fresh.append(nm)
            case SList((Atom("left", _, _), *items), _, _):
                left = [_side_item(i) for i in items]
            case SList((Atom("right", _, _), *items), _, _):
                right = [_side_item(i) for i in items]
            case _:
                _err(item, "unknown rule clause")
    return Rule(name, premise, tuple(params), tuple(fresh), tuple(left), tuple(right))


def _side_item(sx: SExp):
    match sx:
        case SList((Atom("ctx", _, _), c), _, _):
            return ("ctx", c)
        case _:
            return ("term", sx)


# ---------------------------------------------------------------------------
# Template instantiation


def _param_instance(p: Param, ctx_obj, side_state, calculus: str):
    """Context parameter applied to one side's environments, as a term."""
    if calculus == "lambdabla":
        return mc.plug_multi(ctx_obj, side_state.env)
    return ls.s_plug_mc(ctx_obj, side_state)


def instantiate_term(sx: SExp, side, params: dict, kinds: dict, fresh: dict, calculus: str):
    """side: a State/SState supplying the environments of the premise pair."""
    if calculus == "lambdabla":
        return _inst_bla(sx, side, params, kinds, fresh)
    return _inst_shift(sx, side, params, kinds, fresh)


def _inst_bla(sx: SExp, side: State, params, kinds, fresh) -> Term:
    def go(sx: SExp) -> Term:
        match sx:
            case Atom(t, _, _) if t.startswith("#") and t[1:].isdigit():
                i = int(t[1:])
                if not 1 <= i <= len(side.env):
                    raise SkipInstance(f"environment reference {t} out of range")
                return side.env[i - 1]
            case SList((Atom("param", _, _), Atom(nm, _, _)), _, _):
                if nm not in params:
                    raise IllFormedRule(f"unbound parameter {nm}")
                if kinds[nm] == "edia":
                    return ContVal(mc.eval_ctx_of(params[nm], side.env))
                return mc.plug_multi(params[nm], side.env)
            case SList((Atom("contparam", _, _), Atom(nm, _, _)), _, _):
                if kinds.get(nm) != "edia":
                    raise IllFormedRule(f"contparam needs an edia parameter, got {nm}")
                return ContVal(mc.eval_ctx_of(params[nm], side.env))
            case SList((Atom("freshp", _, _), Atom(nm, _, _)), _, _):
                if nm not in fresh:
                    raise IllFormedRule(f"unbound fresh prompt {nm}")
                return PromptVal(fresh[nm])
            case SList((Atom("star", _, _), Atom(n, _, _), body), _, _):
                i = int(n)
                if not 1 <= i <= len(side.env) or not isinstance(side.env[i - 1], ContVal):
                    raise SkipInstance(f"star index {i} needs a stored continuation")
                return plug(side.env[i - 1].ctx, go(body))
            case SList((Atom(h, _, _), *rest), _, _) if h in ("lam", "new", "grab"):
                # binding forms: rebuild around instantiated subtemplates
                return _rebuild_binding(sx, go)
            case SList((Atom("reset", _, _), v, b), _, _):
                from .terms import Reset

                return Reset(go(v), go(b))
            case SList((Atom("throw", _, _), v, b), _, _):
                from .terms import Throw

                return Throw(go(v), go(b))
            case SList((f, a), _, _) if _is_template_form(f) or _is_template_form(a):
                return App(go(f), go(a))
            case _:
                return term_of_sexp(sx)

    def _is_template_form(sx: SExp) -> bool:
        match sx:
            case Atom(t, _, _):
                return t.startswith("#")
            case SList((Atom(h, _, _), *_), _, _):
                return h in ("param", "contparam", "freshp", "star", "plug") or any(
                    _contains_template(i) for i in sx.items
                )
        return False

    def _rebuild_binding(sx: SExp, go):
        from .terms import Grab, Lam, New

        match sx:
            case SList((Atom("lam", _, _), x, b), _, _):
                return Lam(_name(x), go(b))
            case SList((Atom("new", _, _), x, b), _, _):
                return New(_name(x), go(b))
            case SList((Atom("grab", _, _), v, x, b), _, _):
                return Grab(go(v), _name(x), go(b))
        raise AssertionError

    return go(sx)


def _contains_template(sx: SExp) -> bool:
    match sx:
        case Atom(t, _, _):
            return t.startswith("#")
        case SList(items, _, _):
            if items and isinstance(items[0], Atom) and items[0].text in (
                "param",
                "contparam",
                "freshp",
                "star",
                "plug",
            ):
                return True
            return any(_contains_template(i) for i in items)
    return False


def _inst_shift(sx: SExp, side: "ls.SState", params, kinds, fresh) -> ls.STerm:
    def go(sx: SExp) -> ls.STerm:
        match sx:
            case Atom(t, _, _) if t.startswith("#") and t[1:].isdigit():
                i = int(t[1:])
                if not 1 <= i <= len(side.env):
                    raise SkipInstance(f"environment reference {t} out of range")
                return side.env[i - 1]
            case SList((Atom("param", _, _), Atom(nm, _, _)), _, _):
                if nm not in params:
                    raise IllFormedRule(f"unbound parameter {nm}")
                if kinds[nm] in ("pure", "fdia"):
                    raise IllFormedRule(f"context parameter {nm} needs (plug {nm} ...)")
                return ls.s_plug_mc(params[nm], side)
            case SList((Atom("plug", _, _), Atom(nm, _, _), body), _, _):
                return ls.s_plug(_sctx_param(nm, params, kinds, side), go(body))
            case SList((Atom("star", _, _), Atom(n, _, _), body), _, _):
                i = int(n)
                if not 1 <= i <= len(side.ctxenv):
                    raise SkipInstance(f"star index {i} out of range")
                return ls.s_plug(side.ctxenv[i - 1], go(body))
            case SList((Atom("lam", _, _), x, b), _, _):
                return ls.SLam(_name(x), go(b))
            case SList((Atom("shift", _, _), x, b), _, _):
                return ls.SShift(_name(x), go(b))
            case SList((Atom("reset", _, _), b), _, _):
                return ls.SReset(go(b))
            case SList((f, a), _, _) if _contains_template(f) or _contains_template(a):
                return ls.SApp(go(f), go(a))
            case _:
                return sterm_of_sexp(sx)

    return go(sx)


def _sctx_param(nm, params, kinds, side):
    if nm not in params:
        raise IllFormedRule(f"unbound parameter {nm}")
    if kinds[nm] == "pure":
        return params[nm]
    if kinds[nm] == "fdia":
        return ls.s_ctx_of_fd(params[nm], side)
    raise IllFormedRule(f"parameter {nm} is not a context kind")


def instantiate_ctx(sx: SExp, side: "ls.SState", params, kinds, fresh) -> ls.SCtx:
    """Shift/reset context template: like contexts but with template splices."""

    def go(sx: SExp) -> ls.SCtx:
        match sx:
            case Atom("_", _, _):
                return ls.S_HOLE
            case SList((Atom("reset", _, _), c), _, _):
                return ls.SDelim(go(c))
            case SList((Atom("plug", _, _), Atom(nm, _, _), body), _, _):
                return ls.s_compose(_sctx_param(nm, params, kinds, side), go(body))
            case SList((Atom("star", _, _), Atom(n, _, _), body), _, _):
                i = int(n)
                if not 1 <= i <= len(side.ctxenv):
                    raise SkipInstance(f"star index {i} out of range")
                return ls.s_compose(side.ctxenv[i - 1], go(body))
            case SList((a, b), _, _):
                ha, hb = _ctx_holes(a), _ctx_holes(b)
                if ha == 1 and hb == 0:
                    return ls.SAppL(go(a), _inst_shift(b, side, params, kinds, fresh))
                if ha == 0 and hb == 1:
                    return ls.SAppR(_inst_shift(a, side, params, kinds, fresh), go(b))
                _err(sx, "a context template needs exactly one hole on its spine")
        _err(sx, "cannot parse context template")

    return go(sx)


def _ctx_holes(sx: SExp) -> int:
    match sx:
        case Atom("_", _, _):
            return 1
        case Atom(_, _, _):
            return 0
        case SList((Atom("plug", _, _), Atom(_, _, _), body), _, _):
            return _ctx_holes(body)
        case SList((Atom("star", _, _), Atom(_, _, _), body), _, _):
            return _ctx_holes(body)
        case SList(items, _, _):
            return sum(_ctx_holes(i) for i in items)
    return 0


def instantiate_side(items, side, params, kinds, fresh, calculus: str):
    """Build the conclusion state for one side: premise environments extended
    with instantiated templates; at most the final term may run."""
    ctx_extra = []
    terms = []
    for tag, sx in items:
        if tag == "ctx":
            if calculus != "lamshift":
                raise IllFormedRule("context entries only exist for shift/reset states")
            ctx_extra.append(instantiate_ctx(sx, side, params, kinds, fresh))
        else:
            terms.append(instantiate_term(sx, side, params, kinds, fresh, calculus))
    running = None
    values = []
    for k, t in enumerate(terms):
        vp = is_value(t) if calculus == "lambdabla" else ls.s_is_value(t)
        if vp:
            values.append(t)
        elif k == len(terms) - 1:
            running = t
        else:
            raise IllFormedRule("only the final conclusion item may be a non-value")
    if calculus == "lambdabla":
        return mk_state(tuple(side.env) + tuple(values), running)
    return ls.mk_sstate(
        tuple(side.ctxenv) + tuple(ctx_extra), tuple(side.env) + tuple(values), running
    )
