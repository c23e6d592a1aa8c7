"""The single-delimiter calculus of shift and reset: syntax, the original and
relaxed semantics, observables, states with context environments, the labelled
transitions, and the encoding into the multi-prompt calculus.

Under the original semantics a term only reduces when it carries an outermost
delimiter; testers therefore wrap terms in a delimiter before observing them.
Under the relaxed semantics reduction applies anywhere, and a shift with no
surrounding delimiter is a stuck normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from . import stdlib
from .terms import (
    App,
    Lam,
    OpenTermError,
    PromptVal,
    Term,
    Throw,
    Var,
    fresh_name,
)

Semantics = Literal["original", "relaxed"]


class IllFormedSTerm(Exception):
    pass


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class STerm:
    __slots__ = ()


@dataclass(frozen=True)
class SVar(STerm):
    name: str


@dataclass(frozen=True)
class SLam(STerm):
    name: str
    body: STerm


@dataclass(frozen=True)
class SApp(STerm):
    fn: STerm
    arg: STerm


@dataclass(frozen=True)
class SReset(STerm):
    body: STerm


@dataclass(frozen=True)
class SShift(STerm):
    name: str
    body: STerm


def s_is_value(t: STerm) -> bool:
    return isinstance(t, (SVar, SLam))


def s_free_vars(m) -> frozenset[str]:
    match m:
        case SVar(x):
            return frozenset((x,))
        case SLam(x, b) | SShift(x, b):
            return s_free_vars(b) - {x}
        case SApp(f, a):
            return s_free_vars(f) | s_free_vars(a)
        case SReset(b):
            return s_free_vars(b)
        case SHole():
            return frozenset()
        case SAppL(c, a):
            return s_free_vars(c) | s_free_vars(a)
        case SAppR(f, c):
            return s_free_vars(f) | s_free_vars(c)
        case SDelim(c):
            return s_free_vars(c)
    raise TypeError(f"not a shift/reset term or context: {m!r}")


def s_subst(m, x: str, v: STerm):
    if not s_is_value(v):
        raise IllFormedSTerm(f"only values may be substituted, got {v}")
    fv = s_free_vars(v)

    def go(m):
        match m:
            case SVar(y):
                return v if y == x else m
            case SLam(y, b):
                if y == x:
                    return m
                y2, b2 = avoid(y, b)
                return SLam(y2, go(b2))
            case SShift(y, b):
                if y == x:
                    return m
                y2, b2 = avoid(y, b)
                return SShift(y2, go(b2))
            case SApp(f, a):
                return SApp(go(f), go(a))
            case SReset(b):
                return SReset(go(b))
            case SHole():
                return m
            case SAppL(c, a):
                return SAppL(go(c), go(a))
            case SAppR(f, c):
                return SAppR(go(f), go(c))
            case SDelim(c):
                return SDelim(go(c))
        raise TypeError(f"not a shift/reset term or context: {m!r}")

    def avoid(y, b):
        if y not in fv:
            return y, b
        y2 = fresh_name(y, fv | s_free_vars(b) | {x})
        return y2, s_subst(b, y, SVar(y2))

    return go(m)


def s_canon(m):
    counter = [0]

    def go(m, env):
        match m:
            case SVar(y):
                return SVar(env.get(y, y))
            case SLam(y, b):
                y2 = f"!{counter[0]}"
                counter[0] += 1
                return SLam(y2, go(b, {**env, y: y2}))
            case SShift(y, b):
                y2 = f"!{counter[0]}"
                counter[0] += 1
                return SShift(y2, go(b, {**env, y: y2}))
            case SApp(f, a):
                return SApp(go(f, env), go(a, env))
            case SReset(b):
                return SReset(go(b, env))
            case SHole():
                return m
            case SAppL(c, a):
                return SAppL(go(c, env), go(a, env))
            case SAppR(f, c):
                return SAppR(go(f, env), go(c, env))
            case SDelim(c):
                return SDelim(go(c, env))
        raise TypeError(f"not a shift/reset term or context: {m!r}")

    return go(m, {})


def s_alpha_eq(a, b) -> bool:
    return s_canon(a) == s_canon(b)


# ---------------------------------------------------------------------------
# Evaluation contexts; pure means no delimiter on the hole path


@dataclass(frozen=True)
class SCtx:
    __slots__ = ()


@dataclass(frozen=True)
class SHole(SCtx):
    pass


@dataclass(frozen=True)
class SAppL(SCtx):
    ctx: SCtx
    arg: STerm


@dataclass(frozen=True)
class SAppR(SCtx):
    fn: STerm
    ctx: SCtx

    def __post_init__(self):
        if not s_is_value(self.fn):
            raise IllFormedSTerm(f"left of a hole must be a value: {self.fn}")


@dataclass(frozen=True)
class SDelim(SCtx):
    ctx: SCtx


S_HOLE = SHole()


def s_plug(c: SCtx, t: STerm) -> STerm:
    match c:
        case SHole():
            return t
        case SAppL(c1, a):
            return SApp(s_plug(c1, t), a)
        case SAppR(f, c1):
            return SApp(f, s_plug(c1, t))
        case SDelim(c1):
            return SReset(s_plug(c1, t))
    raise TypeError(f"not a context: {c!r}")


def s_compose(outer: SCtx, inner: SCtx) -> SCtx:
    match outer:
        case SHole():
            return inner
        case SAppL(c, a):
            return SAppL(s_compose(c, inner), a)
        case SAppR(f, c):
            return SAppR(f, s_compose(c, inner))
        case SDelim(c):
            return SDelim(s_compose(c, inner))
    raise TypeError(f"not a context: {outer!r}")


def is_pure(c: SCtx) -> bool:
    match c:
        case SHole():
            return True
        case SAppL(c1, _) | SAppR(_, c1):
            return is_pure(c1)
        case SDelim(_):
            return False
    raise TypeError(f"not a context: {c!r}")


def split_at_reset(c: SCtx) -> tuple[SCtx, SCtx] | None:
    """Write c = F[<E>] with E the maximal pure part around the hole.

    Returns (F, E); None when c is pure."""
    match c:
        case SHole():
            return None
        case SAppL(c1, a):
            r = split_at_reset(c1)
            return None if r is None else (SAppL(r[0], a), r[1])
        case SAppR(f, c1):
            r = split_at_reset(c1)
            return None if r is None else (SAppR(f, r[0]), r[1])
        case SDelim(c1):
            r = split_at_reset(c1)
            if r is None:
                return S_HOLE, c1
            return SDelim(r[0]), r[1]
    raise TypeError(f"not a context: {c!r}")


# ---------------------------------------------------------------------------
# Reduction


@dataclass(frozen=True)
class SSplit:
    ctx: SCtx
    redex: STerm
    rule: str  # beta | reset | capture


@dataclass(frozen=True)
class SNfValue:
    pass


@dataclass(frozen=True)
class SNfStuck:
    ctx: SCtx  # pure
    binder: str
    body: STerm

    def term(self) -> STerm:
        return s_plug(self.ctx, SShift(self.binder, self.body))


S_VALUE = SNfValue()


def s_decompose(t: STerm) -> SSplit | SNfValue | SNfStuck:
    if s_is_value(t):
        return S_VALUE
    match t:
        case SApp(f, a):
            if not s_is_value(f):
                return _under(s_decompose(f), lambda c: SAppL(c, a))
            if not s_is_value(a):
                return _under(s_decompose(a), lambda c: SAppR(f, c))
            if isinstance(f, SLam):
                return SSplit(S_HOLE, t, "beta")
            raise OpenTermError(f"free variable in function position: {f}")
        case SReset(b):
            if s_is_value(b):
                return SSplit(S_HOLE, t, "reset")
            inner = s_decompose(b)
            match inner:
                case SSplit(c, r, rule):
                    return SSplit(SDelim(c), r, rule)
                case SNfStuck(_, _, _):
                    return SSplit(S_HOLE, t, "capture")
        case SShift(x, b):
            return SNfStuck(S_HOLE, x, b)
    raise TypeError(f"not a shift/reset term: {t!r}")


def _under(inner, frame):
    match inner:
        case SSplit(c, r, rule):
            return SSplit(frame(c), r, rule)
        case SNfStuck(c, x, b):
            return SNfStuck(frame(c), x, b)
    raise AssertionError("value in redex position")


def s_contract(redex: STerm, rule: str) -> STerm:
    match rule, redex:
        case "beta", SApp(SLam(x, b), v):
            return s_subst(b, x, v)
        case "reset", SReset(v):
            return v
        case "capture", SReset(b):
            d = s_decompose(b)
            assert isinstance(d, SNfStuck)
            y = fresh_name("y", s_free_vars(d.body) | s_free_vars(d.ctx) | {d.binder})
            captured = SLam(y, SReset(s_plug(d.ctx, SVar(y))))
            return SReset(s_subst(d.body, d.binder, captured))
    raise AssertionError(f"rule {rule} does not match {redex}")


@dataclass(frozen=True)
class SReduced:
    term: STerm
    rule: str


def s_step(t: STerm, semantics: Semantics = "relaxed") -> SReduced | SNfValue | SNfStuck | None:
    """One step; None means inert under the original semantics (no outermost
    delimiter and not a value/stuck form)."""
    if semantics == "original" and not isinstance(t, SReset) and not s_is_value(t):
        d = s_decompose(t)
        return d if isinstance(d, SNfStuck) else None
    d = s_decompose(t)
    if isinstance(d, SSplit):
        return SReduced(s_plug(d.ctx, s_contract(d.redex, d.rule)), d.rule)
    return d


def s_red_hat(t: STerm, semantics: Semantics) -> STerm:
    r = s_step(t, semantics)
    return r.term if isinstance(r, SReduced) else t


@dataclass(frozen=True)
class SOutcome:
    kind: str  # value | stuck | inert | fuel
    term: STerm
    steps: int


def s_eval(t: STerm, fuel: int, semantics: Semantics = "relaxed") -> SOutcome:
    if s_free_vars(t):
        raise OpenTermError(f"evaluation requires a closed term; free: {sorted(s_free_vars(t))}")
    cur = t
    for n in range(fuel + 1):
        r = s_step(cur, semantics)
        match r:
            case SReduced(nxt, _):
                if n == fuel:
                    return SOutcome("fuel", cur, n)
                cur = nxt
            case SNfValue():
                return SOutcome("value", cur, n)
            case SNfStuck(_, _, _):
                return SOutcome("stuck", cur, n)
            case None:
                return SOutcome("inert", cur, n)
    return SOutcome("fuel", cur, fuel)


def s_observable(t: STerm, fuel: int, semantics: Semantics):
    """Observable class; the original-semantics tester wraps in a delimiter."""
    from .reduction import Obs

    if semantics == "original":
        out = s_eval(SReset(t), fuel, "original")
        return Obs("value") if out.kind == "value" else Obs("unknown", fuel)
    out = s_eval(t, fuel, "relaxed")
    match out.kind:
        case "value":
            return Obs("value")
        case "stuck":
            return Obs("stuck")
        case _:
            return Obs("unknown", fuel)


# ---------------------------------------------------------------------------
# Encoding into the multi-prompt calculus


def encode_to_lambdabla(t: STerm, p: int) -> Term:
    """Homomorphic translation using the single-prompt operator macros."""
    rp = stdlib.reset_p(PromptVal(p))
    sp = stdlib.shift_p(PromptVal(p))

    def go(t: STerm) -> Term:
        match t:
            case SVar(x):
                return Var(x)
            case SLam(x, b):
                return Lam(x, go(b))
            case SApp(f, a):
                return App(go(f), go(a))
            case SReset(b):
                return Throw(rp, go(b))
            case SShift(x, b):
                return App(sp, Lam(x, go(b)))
        raise TypeError(f"not a shift/reset term: {t!r}")

    return go(t)


# ---------------------------------------------------------------------------
# States: a sequence of evaluation contexts, a sequence of values, and an
# optional running term.


@dataclass(frozen=True)
class SState:
    ctxenv: tuple[SCtx, ...]
    env: tuple[STerm, ...]
    running: STerm | None = None


def mk_sstate(ctxenv: Sequence[SCtx], env: Sequence[STerm], running: STerm | None = None) -> SState:
    ctxenv = tuple(ctxenv)
    env = tuple(env)
    for c in ctxenv:
        if s_free_vars(c):
            raise ValueError(f"context entries must be closed: {c}")
    for v in env:
        if not s_is_value(v) or s_free_vars(v):
            raise ValueError(f"value entries must be closed values: {v}")
    if running is not None:
        if s_free_vars(running):
            raise ValueError(f"running term must be closed: {running}")
        if s_is_value(running):
            env = env + (running,)
            running = None
    return SState(ctxenv, env, running)


_S_CANON_CACHE: dict = {}


def s_canonical_state(s: SState) -> SState:
    hit = _S_CANON_CACHE.get(id(s))
    if hit is not None and hit[0] is s:
        return hit[1]
    out = _s_canonical_state(s)
    _S_CANON_CACHE[id(s)] = (s, out)
    return out


def _s_canonical_state(s: SState) -> SState:
    return SState(
        tuple(s_canon(c) for c in s.ctxenv),
        tuple(s_canon(v) for v in s.env),
        None if s.running is None else s_canon(s.running),
    )


def s_state_key(s: SState):
    c = s_canonical_state(s)
    return (c.ctxenv, c.env, c.running)


# ---------------------------------------------------------------------------
# Multi-hole contexts over (ctxenv, env): star holes take context entries,
# indexed value holes take value entries.


@dataclass(frozen=True)
class SCvVar:
    name: str


@dataclass(frozen=True)
class SCvLam:
    name: str
    body: "SMc"


@dataclass(frozen=True)
class SCvHole:
    index: int


SCv = SCvVar | SCvLam | SCvHole


@dataclass(frozen=True)
class SMcVal:
    value: SCv


@dataclass(frozen=True)
class SMcApp:
    fn: "SMc"
    arg: "SMc"


@dataclass(frozen=True)
class SMcReset:
    body: "SMc"


@dataclass(frozen=True)
class SMcShift:
    name: str
    body: "SMc"


@dataclass(frozen=True)
class SMcStar:
    index: int
    body: "SMc"


SMc = SMcVal | SMcApp | SMcReset | SMcShift | SMcStar


@dataclass(frozen=True)
class SFHole:
    pass


@dataclass(frozen=True)
class SFAppL:
    ctx: "SFd"
    arg: SMc


@dataclass(frozen=True)
class SFAppR:
    fn: SCv
    ctx: "SFd"


@dataclass(frozen=True)
class SFReset:
    ctx: "SFd"


@dataclass(frozen=True)
class SFStar:
    index: int
    ctx: "SFd"


SFd = SFHole | SFAppL | SFAppR | SFReset | SFStar

SF_HOLE = SFHole()


class SPlugError(Exception):
    pass


def _sctx_at(s: SState, i: int) -> SCtx:
    if not 1 <= i <= len(s.ctxenv):
        raise SPlugError(f"star index {i} for context environment of size {len(s.ctxenv)}")
    return s.ctxenv[i - 1]


def _sval_at(s: SState, i: int) -> STerm:
    if not 1 <= i <= len(s.env):
        raise SPlugError(f"hole index {i} for value environment of size {len(s.env)}")
    return s.env[i - 1]


def s_plug_cv(cv: SCv, s: SState) -> STerm:
    match cv:
        case SCvVar(x):
            return SVar(x)
        case SCvLam(x, b):
            return SLam(x, s_plug_mc(b, s))
        case SCvHole(i):
            return _sval_at(s, i)
    raise TypeError(f"not a value context: {cv!r}")


def s_plug_mc(c: SMc, s: SState) -> STerm:
    match c:
        case SMcVal(v):
            return s_plug_cv(v, s)
        case SMcApp(f, a):
            return SApp(s_plug_mc(f, s), s_plug_mc(a, s))
        case SMcReset(b):
            return SReset(s_plug_mc(b, s))
        case SMcShift(x, b):
            return SShift(x, s_plug_mc(b, s))
        case SMcStar(i, b):
            return s_plug(_sctx_at(s, i), s_plug_mc(b, s))
    raise TypeError(f"not a multi-hole context: {c!r}")


def s_ctx_of_fd(fd: SFd, s: SState) -> SCtx:
    match fd:
        case SFHole():
            return S_HOLE
        case SFAppL(c, a):
            return SAppL(s_ctx_of_fd(c, s), s_plug_mc(a, s))
        case SFAppR(f, c):
            fn = s_plug_cv(f, s)
            return SAppR(fn, s_ctx_of_fd(c, s))
        case SFReset(c):
            return SDelim(s_ctx_of_fd(c, s))
        case SFStar(i, c):
            return s_compose(_sctx_at(s, i), s_ctx_of_fd(c, s))
    raise TypeError(f"not a multi-hole evaluation context: {fd!r}")


def s_plug_fd(fd: SFd, run: STerm, s: SState) -> STerm:
    return s_plug(s_ctx_of_fd(fd, s), run)


def smc_of_fd(fd: SFd, fill: SMc) -> SMc:
    match fd:
        case SFHole():
            return fill
        case SFAppL(c, a):
            return SMcApp(smc_of_fd(c, fill), a)
        case SFAppR(f, c):
            return SMcApp(SMcVal(f), smc_of_fd(c, fill))
        case SFReset(c):
            return SMcReset(smc_of_fd(c, fill))
        case SFStar(i, c):
            return SMcStar(i, smc_of_fd(c, fill))
    raise TypeError(f"not a multi-hole evaluation context: {fd!r}")


# ---------------------------------------------------------------------------
# Bounded enumeration (closed contexts, two-name binder pool)


class SEnumerator:
    def __init__(self, n_ctx: int, n_val: int, pool=("a", "b")):
        self.n_ctx = n_ctx
        self.n_val = n_val
        self.pool = pool
        self._memo: dict = {}

    def _binder(self, scope):
        for nm in self.pool:
            if nm not in scope:
                return nm
        return self.pool[0]

    def values(self, n, scope):
        key = ("cv", n, scope)
        if key in self._memo:
            return self._memo[key]
        out = []
        if n == 1:
            out.extend(SCvVar(x) for x in self.pool if x in scope)
            out.extend(SCvHole(i) for i in range(1, self.n_val + 1))
        elif n >= 2:
            b = self._binder(scope)
            out.extend(SCvLam(b, c) for c in self.general(n - 1, scope | {b}))
        self._memo[key] = out
        return out

    def general(self, n, scope):
        key = ("c", n, scope)
        if key in self._memo:
            return self._memo[key]
        out = [SMcVal(v) for v in self.values(n, scope)]
        if n >= 2:
            b = self._binder(scope)
            for k in range(1, n - 1):
                for f in self.general(k, scope):
                    out.extend(SMcApp(f, a) for a in self.general(n - 1 - k, scope))
            out.extend(SMcReset(c) for c in self.general(n - 1, scope))
            out.extend(SMcShift(b, c) for c in self.general(n - 1, scope | {b}))
            out.extend(SMcStar(i, c) for i in range(1, self.n_ctx + 1) for c in self.general(n - 1, scope))
        self._memo[key] = out
        return out

    def evals(self, n, scope):
        key = ("fd", n, scope)
        if key in self._memo:
            return self._memo[key]
        out = []
        if n == 1:
            out.append(SF_HOLE)
        elif n >= 2:
            for k in range(1, n - 1):
                for e in self.evals(k, scope):
                    out.extend(SFAppL(e, a) for a in self.general(n - 1 - k, scope))
                for f in self.values(k, scope):
                    out.extend(SFAppR(f, e) for e in self.evals(n - 1 - k, scope))
            out.extend(SFReset(c) for c in self.evals(n - 1, scope))
            out.extend(SFStar(i, c) for i in range(1, self.n_ctx + 1) for c in self.evals(n - 1, scope))
        self._memo[key] = out
        return out

    def pure(self, n, scope):
        """Closed pure evaluation contexts of exactly n nodes (plain SCtx).

        Only meaningful with empty environments: term slots are closed."""
        assert self.n_ctx == 0 and self.n_val == 0
        key = ("pure", n, scope)
        if key in self._memo:
            return self._memo[key]
        empty = SState((), ())
        out = []
        if n == 1:
            out.append(S_HOLE)
        elif n >= 2:
            for k in range(1, n - 1):
                for e in self.pure(k, scope):
                    out.extend(SAppL(e, s_plug_mc(a, empty)) for a in self.general(n - 1 - k, scope))
                for f in self.values(k, scope):
                    fv = s_plug_cv(f, empty)
                    out.extend(SAppR(fv, e) for e in self.pure(n - 1 - k, scope))
        self._memo[key] = out
        return out


_S_ENUMS: dict = {}


def s_enumerate(kind: str, size: int, n_ctx: int, n_val: int):
    key = (n_ctx, n_val)
    enum = _S_ENUMS.get(key)
    if enum is None:
        enum = _S_ENUMS[key] = SEnumerator(n_ctx, n_val)
    empty: frozenset[str] = frozenset()
    for n in range(1, size + 1):
        if kind == "cv":
            yield from enum.values(n, empty)
        elif kind == "c":
            yield from enum.general(n, empty)
        elif kind == "fd":
            yield from enum.evals(n, empty)
        elif kind == "pure":
            yield from enum.pure(n, empty)
        else:
            raise ValueError(f"unknown kind {kind!r}")


def s_enumerate_pure_ctxs(size: int):
    """Closed pure evaluation contexts up to the size bound."""
    yield from s_enumerate("pure", size, 0, 0)


# ---------------------------------------------------------------------------
# Labels


@dataclass(frozen=True)
class SLTau:
    pass


@dataclass(frozen=True)
class SLLam:
    index: int
    arg: SCv


@dataclass(frozen=True)
class SLVal:
    pass


@dataclass(frozen=True)
class SLStuck:
    ctx: SFd


@dataclass(frozen=True)
class SLCtxEnv:
    index: int
    arg: SCv


@dataclass(frozen=True)
class SLPure:
    index: int


@dataclass(frozen=True)
class SLSplitC:
    index: int


SLabel = SLTau | SLLam | SLVal | SLStuck | SLCtxEnv | SLPure | SLSplitC

S_TAU = SLTau()
S_VAL = SLVal()


def s_is_passive(lab: SLabel) -> bool:
    return isinstance(lab, (SLCtxEnv, SLVal))


def s_apply_label(s: SState, lab: SLabel, semantics: Semantics) -> SState | None:
    match lab:
        case SLTau():
            if s.running is None:
                return None
            r = s_step(s.running, semantics)
            if not isinstance(r, SReduced):
                return None
            return mk_sstate(s.ctxenv, s.env, r.term)
        case SLVal():
            return s if s.running is None else None
        case SLLam(j, arg):
            if s.running is not None or not 1 <= j <= len(s.env):
                return None
            v = s.env[j - 1]
            if not isinstance(v, SLam):
                return None
            try:
                filled = s_plug_cv(arg, s)
            except SPlugError:
                return None
            return mk_sstate(s.ctxenv, s.env, s_subst(v.body, v.name, filled))
        case SLStuck(fd):
            if s.running is None:
                return None
            stuck = isinstance(s_decompose(s.running), SNfStuck)
            if not stuck and semantics != "original":
                return None
            try:
                filled = s_plug_fd(fd, s.running, s)
            except SPlugError:
                return None
            # only the genuine stuck test performs the one-step unsticking;
            # the original-semantics extra rule plugs the term as is
            result = s_red_hat(filled, semantics) if stuck else filled
            return mk_sstate(s.ctxenv, s.env, result)
        case SLCtxEnv(i, arg):
            if s.running is not None or not 1 <= i <= len(s.ctxenv):
                return None
            try:
                filled = s_plug_cv(arg, s)
            except SPlugError:
                return None
            return mk_sstate(s.ctxenv, s.env, s_plug(s.ctxenv[i - 1], filled))
        case SLPure(i):
            if s.running is not None or not 1 <= i <= len(s.ctxenv):
                return None
            return s if is_pure(s.ctxenv[i - 1]) else None
        case SLSplitC(i):
            if s.running is not None or not 1 <= i <= len(s.ctxenv):
                return None
            parts = split_at_reset(s.ctxenv[i - 1])
            if parts is None:
                return None
            f, e = parts
            return mk_sstate(
                s.ctxenv + (s_compose(f, SDelim(S_HOLE)), SDelim(e)), s.env
            )
    raise TypeError(f"not a label: {lab!r}")


def s_enumerate_labels(s: SState, ctx_size: int, semantics: Semantics) -> list[SLabel]:
    labels: list[SLabel] = []
    n_ctx, n_val = len(s.ctxenv), len(s.env)
    if s.running is not None:
        if isinstance(s_step(s.running, semantics), SReduced):
            labels.append(S_TAU)
        stuck = isinstance(s_decompose(s.running), SNfStuck)
        if stuck or semantics == "original":
            for fd in s_enumerate("fd", ctx_size, n_ctx, n_val):
                labels.append(SLStuck(fd))
        return labels
    labels.append(S_VAL)
    for j, v in enumerate(s.env, 1):
        if isinstance(v, SLam):
            for cv in s_enumerate("cv", ctx_size, n_ctx, n_val):
                labels.append(SLLam(j, cv))
    for i, c in enumerate(s.ctxenv, 1):
        for cv in s_enumerate("cv", ctx_size, n_ctx, n_val):
            labels.append(SLCtxEnv(i, cv))
        if is_pure(c):
            labels.append(SLPure(i))
        else:
            labels.append(SLSplitC(i))
    return labels


def s_tau_chain(s: SState, fuel: int, semantics: Semantics):
    out = [s]
    cur = s
    for _ in range(fuel):
        nxt = s_apply_label(cur, S_TAU, semantics)
        if nxt is None:
            return out, True
        out.append(nxt)
        cur = nxt
    return out, s_apply_label(cur, S_TAU, semantics) is None


def s_weak_apply(s: SState, lab: SLabel, fuel: int, semantics: Semantics):
    pre, pre_decided = s_tau_chain(s, fuel, semantics)
    if isinstance(lab, SLTau):
        return pre, pre_decided
    out = []
    seen = set()
    decided = pre_decided
    for k, mid in enumerate(pre):
        nxt = s_apply_label(mid, lab, semantics)
        if nxt is None:
            continue
        post, post_decided = s_tau_chain(nxt, fuel - k, semantics)
        decided = decided and post_decided
        for t in post:
            key = s_state_key(t)
            if key not in seen:
                seen.add(key)
                out.append(t)
    return out, decided
