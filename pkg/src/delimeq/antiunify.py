"""Anti-unification of state pairs: compute a maximal common promptless
skeleton such that both states are the skeleton filled with environment values
(at shared indices), re-applied stored continuations (star holes), residual
value pairs (candidate new environment entries), and at most one residual run
pair sitting in evaluation position.

The walker is greedy with local backtracking; failure degrades to the whole
running pair as residual.  Residual values must be closed, so nothing bound by
a skeleton binder can leak out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import contexts as mc
from . import lamshift as ls
from .terms import (
    App,
    AppL,
    AppR,
    ContVal,
    Delim,
    EvalCtx,
    Grab,
    Hole,
    Lam,
    New,
    PromptVal,
    Reset,
    Term,
    Throw,
    Var,
    alpha_eq,
    free_vars,
    is_value,
)

MAX_VALUE_RESIDUALS = 6


class Bail(Exception):
    pass


@dataclass
class AU:
    """Outcome of anti-unifying a pair of running terms."""

    run_skeleton: object | None  # multi-hole evaluation context when a run residual exists
    ctx_skeleton: object | None  # general/value context otherwise
    value_residuals: list
    run_residual: tuple | None
    ctx_residuals: list = field(default_factory=list)  # shift/reset only
    degraded: bool = False


# ---------------------------------------------------------------------------
# Multi-prompt calculus


def ctx_strip_prefix(prefix: EvalCtx, big: EvalCtx) -> EvalCtx | None:
    """If big = prefix[rest] for some rest, return rest."""
    match prefix:
        case Hole():
            return big
        case AppL(c, a):
            if isinstance(big, AppL) and alpha_eq(big.arg, a):
                return ctx_strip_prefix(c, big.ctx)
            return None
        case AppR(f, c):
            if isinstance(big, AppR) and alpha_eq(big.fn, f):
                return ctx_strip_prefix(c, big.ctx)
            return None
        case Delim(p, c):
            if isinstance(big, Delim) and big.prompt == p:
                return ctx_strip_prefix(c, big.ctx)
            return None
    raise TypeError(f"not an evaluation context: {prefix!r}")


class BlaAntiUnifier:
    def __init__(self, env_s, env_t, generation: str):
        assert len(env_s) == len(env_t)
        self.env_s = tuple(env_s)
        self.env_t = tuple(env_t)
        self.n = len(env_s)
        self.star = generation == "star"
        self.resid: list[tuple[Term, Term]] = []
        self.run: tuple[Term, Term] | None = None
        self.binders = 0
        self.allow_residuals = True
        self.target: tuple[Term, Term] | None = None

    # -- residual bookkeeping with snapshot support

    def _snap(self):
        return len(self.resid), self.run, self.binders

    def _restore(self, snap):
        n, run, b = snap
        del self.resid[n:]
        self.run = run
        self.binders = b

    def _fresh_binder(self) -> str:
        nm = f"%{self.binders}"
        self.binders += 1
        return nm

    def _residual_value(self, u: Term, v: Term):
        if not self.allow_residuals:
            raise Bail
        if not (is_value(u) and is_value(v)) or free_vars(u) or free_vars(v):
            raise Bail
        for j, (a, b) in enumerate(self.resid):
            if alpha_eq(a, u) and alpha_eq(b, v):
                return mc.CvHole(self.n + j + 1)
        if len(self.resid) >= MAX_VALUE_RESIDUALS:
            raise Bail
        self.resid.append((u, v))
        return mc.CvHole(self.n + len(self.resid))

    # -- the walk; returns (tag, skeleton) with tag in {"cv", "c", "e"}

    def walk(self, u: Term, v: Term, ren_a: dict, ren_b: dict, eval_ok: bool):
        # the member's running pair, when matching against a member
        if self.target is not None and self.run is None and eval_ok:
            e1, e2 = self.target
            if alpha_eq(u, e1) and alpha_eq(v, e2):
                self.run = (u, v)
                return "e", mc.E_HOLE
        # shared environment value at the same index
        for i in range(self.n):
            if alpha_eq(u, self.env_s[i]) and alpha_eq(v, self.env_t[i]):
                return "cv", mc.CvHole(i + 1)
        # re-applied continuation stored at the same index
        if self.star:
            for i in range(self.n):
                es, et = self.env_s[i], self.env_t[i]
                if not (isinstance(es, ContVal) and isinstance(et, ContVal)):
                    continue
                if isinstance(es.ctx, Hole) and isinstance(et.ctx, Hole):
                    continue
                from .terms import strip_ctx

                su = strip_ctx(es.ctx, u)
                sv = strip_ctx(et.ctx, v)
                if su is None or sv is None:
                    continue
                snap = self._snap()
                try:
                    tag, sk = self.walk(su, sv, ren_a, ren_b, eval_ok)
                    if tag == "e":
                        return "e", mc.EStar(i + 1, sk)
                    return "c", mc.CStar(i + 1, _as_c(tag, sk))
                except Bail:
                    self._restore(snap)
        return self._structural(u, v, ren_a, ren_b, eval_ok)

    def _structural(self, u, v, ren_a, ren_b, eval_ok):
        snap = self._snap()
        try:
            return self._strict(u, v, ren_a, ren_b, eval_ok)
        except Bail:
            self._restore(snap)
            return self._mismatch(u, v, eval_ok)

    def _strict(self, u, v, ren_a, ren_b, eval_ok):
        match u, v:
            case Var(x), Var(y):
                ca, cb = ren_a.get(x), ren_b.get(y)
                if ca is None and cb is None and x == y:
                    return "cv", mc.CvVar(x)
                if ca is not None and ca == cb:
                    return "cv", mc.CvVar(ca)
                raise Bail
            case Lam(x1, b1), Lam(x2, b2):
                c = self._fresh_binder()
                tag, sk = self.walk(b1, b2, {**ren_a, x1: c}, {**ren_b, x2: c}, False)
                return "cv", mc.CvLam(c, _as_c(tag, sk))
            case App(f1, a1), App(f2, a2):
                ftag, fsk = self.walk(f1, f2, ren_a, ren_b, eval_ok)
                if ftag == "e":
                    atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                    if atag == "e":
                        raise Bail
                    return "e", mc.EAppL(fsk, _as_c(atag, ask))
                if ftag == "cv":
                    atag, ask = self.walk(a1, a2, ren_a, ren_b, eval_ok)
                    if atag == "e":
                        return "e", mc.EAppR(fsk, ask)
                    return "c", mc.CApp(mc.CVal(fsk), _as_c(atag, ask))
                atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                if atag == "e":
                    raise Bail
                return "c", mc.CApp(fsk, _as_c(atag, ask))
            case New(x1, b1), New(x2, b2):
                c = self._fresh_binder()
                tag, sk = self.walk(b1, b2, {**ren_a, x1: c}, {**ren_b, x2: c}, False)
                if tag == "e":
                    raise Bail
                return "c", mc.CNew(c, _as_c(tag, sk))
            case Reset(d1, b1), Reset(d2, b2):
                dtag, dsk = self.walk(d1, d2, ren_a, ren_b, False)
                if dtag != "cv":
                    raise Bail
                body_eval = eval_ok and isinstance(dsk, mc.CvHole)
                if body_eval and dsk.index > self.n:
                    pair = self.resid[dsk.index - self.n - 1]
                    body_eval = isinstance(pair[0], PromptVal) and isinstance(pair[1], PromptVal)
                btag, bsk = self.walk(b1, b2, ren_a, ren_b, body_eval)
                if btag == "e":
                    if not isinstance(dsk, mc.CvHole):
                        raise Bail
                    return "e", mc.EDelim(dsk.index, bsk)
                return "c", mc.CReset(dsk, _as_c(btag, bsk))
            case Grab(d1, x1, b1), Grab(d2, x2, b2):
                dtag, dsk = self.walk(d1, d2, ren_a, ren_b, False)
                if dtag != "cv":
                    raise Bail
                c = self._fresh_binder()
                btag, bsk = self.walk(b1, b2, {**ren_a, x1: c}, {**ren_b, x2: c}, False)
                if btag == "e":
                    raise Bail
                return "c", mc.CGrab(dsk, c, _as_c(btag, bsk))
            case Throw(k1, a1), Throw(k2, a2):
                ktag, ksk = self.walk(k1, k2, ren_a, ren_b, False)
                if ktag != "cv":
                    raise Bail
                atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                if atag == "e":
                    raise Bail
                return "c", mc.CThrow(ksk, _as_c(atag, ask))
            case ContVal(e1), ContVal(e2):
                return "cv", mc.CvCont(self.walk_ctx(e1, e2, ren_a, ren_b))
            case _:
                raise Bail

    def _mismatch(self, u, v, eval_ok):
        if is_value(u) and is_value(v):
            return "cv", self._residual_value(u, v)
        if (
            self.allow_residuals
            and eval_ok
            and self.run is None
            and not is_value(u)
            and not is_value(v)
        ):
            if free_vars(u) or free_vars(v):
                raise Bail
            self.run = (u, v)
            return "e", mc.E_HOLE
        raise Bail

    def walk_ctx(self, e1: EvalCtx, e2: EvalCtx, ren_a, ren_b):
        if self.star:
            for i in range(self.n):
                es, et = self.env_s[i], self.env_t[i]
                if not (isinstance(es, ContVal) and isinstance(et, ContVal)):
                    continue
                if isinstance(es.ctx, Hole) and isinstance(et.ctx, Hole):
                    continue
                r1 = ctx_strip_prefix(es.ctx, e1)
                r2 = ctx_strip_prefix(et.ctx, e2)
                if r1 is None or r2 is None:
                    continue
                snap = self._snap()
                try:
                    return mc.EStar(i + 1, self.walk_ctx(r1, r2, ren_a, ren_b))
                except Bail:
                    self._restore(snap)
        match e1, e2:
            case Hole(), Hole():
                return mc.E_HOLE
            case AppL(c1, a1), AppL(c2, a2):
                inner = self.walk_ctx(c1, c2, ren_a, ren_b)
                atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                if atag == "e":
                    raise Bail
                return mc.EAppL(inner, _as_c(atag, ask))
            case AppR(f1, c1), AppR(f2, c2):
                ftag, fsk = self.walk(f1, f2, ren_a, ren_b, False)
                if ftag != "cv":
                    raise Bail
                return mc.EAppR(fsk, self.walk_ctx(c1, c2, ren_a, ren_b))
            case Delim(p1, c1), Delim(p2, c2):
                for i in range(self.n):
                    if self.env_s[i] == PromptVal(p1) and self.env_t[i] == PromptVal(p2):
                        return mc.EDelim(i + 1, self.walk_ctx(c1, c2, ren_a, ren_b))
                raise Bail
        raise Bail


def _as_c(tag, sk):
    if tag == "cv":
        return mc.CVal(sk)
    if tag == "c":
        return sk
    raise Bail


def anti_unify_runs(run_s: Term, run_t: Term, env_s, env_t, generation: str) -> AU:
    """Anti-unify a pair of running terms over paired environments."""
    w = BlaAntiUnifier(env_s, env_t, generation)
    try:
        tag, sk = w.walk(run_s, run_t, {}, {}, True)
    except Bail:
        return AU(mc.E_HOLE, None, [], (run_s, run_t), degraded=True)
    if tag == "e":
        return AU(sk, None, w.resid, w.run)
    return AU(None, _as_c(tag, sk), w.resid, None)


def replay_runs(au: AU, env_s, env_t) -> tuple[Term, Term]:
    """Rebuild both running terms from the skeleton and assignments."""
    ext_s = tuple(env_s) + tuple(a for a, _ in au.value_residuals)
    ext_t = tuple(env_t) + tuple(b for _, b in au.value_residuals)
    if au.run_skeleton is not None:
        rs, rt = au.run_residual
        return (
            mc.plug_multi_eval(au.run_skeleton, rs, ext_s),
            mc.plug_multi_eval(au.run_skeleton, rt, ext_t),
        )
    return mc.plug_multi(au.ctx_skeleton, ext_s), mc.plug_multi(au.ctx_skeleton, ext_t)


# ---------------------------------------------------------------------------
# Shift/reset calculus

MAX_CTX_RESIDUALS = 4


def s_ctx_strip_prefix(prefix: ls.SCtx, big: ls.SCtx) -> ls.SCtx | None:
    match prefix:
        case ls.SHole():
            return big
        case ls.SAppL(c, a):
            if isinstance(big, ls.SAppL) and ls.s_alpha_eq(big.arg, a):
                return s_ctx_strip_prefix(c, big.ctx)
            return None
        case ls.SAppR(f, c):
            if isinstance(big, ls.SAppR) and ls.s_alpha_eq(big.fn, f):
                return s_ctx_strip_prefix(c, big.ctx)
            return None
        case ls.SDelim(c):
            if isinstance(big, ls.SDelim):
                return s_ctx_strip_prefix(c, big.ctx)
            return None
    raise TypeError(f"not a context: {prefix!r}")


def s_strip_term(prefix: ls.SCtx, t: ls.STerm) -> ls.STerm | None:
    match prefix:
        case ls.SHole():
            return t
        case ls.SAppL(c, a):
            if isinstance(t, ls.SApp) and ls.s_alpha_eq(t.arg, a):
                return s_strip_term(c, t.fn)
            return None
        case ls.SAppR(f, c):
            if isinstance(t, ls.SApp) and ls.s_alpha_eq(t.fn, f):
                return s_strip_term(c, t.arg)
            return None
        case ls.SDelim(c):
            if isinstance(t, ls.SReset):
                return s_strip_term(c, t.body)
            return None
    raise TypeError(f"not a context: {prefix!r}")


def s_spine_splits(t: ls.STerm):
    """All ways to write t = C[sub] along the evaluation spine, outermost
    first, including the trivial split."""
    yield ls.S_HOLE, t
    match t:
        case ls.SApp(f, a):
            if ls.s_is_value(f):
                for c, s in s_spine_splits(a):
                    yield ls.SAppR(f, c), s
            else:
                for c, s in s_spine_splits(f):
                    yield ls.SAppL(c, a), s
        case ls.SReset(b):
            for c, s in s_spine_splits(b):
                yield ls.SDelim(c), s


class SAntiUnifier:
    def __init__(self, ctxenv_s, ctxenv_t, env_s, env_t, prefer_split: bool):
        assert len(env_s) == len(env_t) and len(ctxenv_s) == len(ctxenv_t)
        self.ctxenv_s = tuple(ctxenv_s)
        self.ctxenv_t = tuple(ctxenv_t)
        self.env_s = tuple(env_s)
        self.env_t = tuple(env_t)
        self.n_ctx = len(ctxenv_s)
        self.n_val = len(env_s)
        self.prefer_split = prefer_split
        self.resid: list = []
        self.ctx_resid: list = []
        self.run = None
        self.binders = 0
        self.allow_residuals = True
        self.target = None

    def _snap(self):
        return len(self.resid), len(self.ctx_resid), self.run, self.binders

    def _restore(self, snap):
        n, m, run, b = snap
        del self.resid[n:]
        del self.ctx_resid[m:]
        self.run = run
        self.binders = b

    def _fresh_binder(self):
        nm = f"%{self.binders}"
        self.binders += 1
        return nm

    def _residual_value(self, u, v):
        if not self.allow_residuals:
            raise Bail
        if not (ls.s_is_value(u) and ls.s_is_value(v)):
            raise Bail
        if ls.s_free_vars(u) or ls.s_free_vars(v):
            raise Bail
        for j, (a, b) in enumerate(self.resid):
            if ls.s_alpha_eq(a, u) and ls.s_alpha_eq(b, v):
                return ls.SCvHole(self.n_val + j + 1)
        if len(self.resid) >= MAX_VALUE_RESIDUALS:
            raise Bail
        self.resid.append((u, v))
        return ls.SCvHole(self.n_val + len(self.resid))

    def _residual_ctx(self, cu, cv_):
        if not self.allow_residuals:
            raise Bail
        if ls.s_free_vars(cu) or ls.s_free_vars(cv_):
            raise Bail
        for j, (a, b) in enumerate(self.ctx_resid):
            if ls.s_alpha_eq(a, cu) and ls.s_alpha_eq(b, cv_):
                return self.n_ctx + j + 1
        if len(self.ctx_resid) >= MAX_CTX_RESIDUALS:
            raise Bail
        self.ctx_resid.append((cu, cv_))
        return self.n_ctx + len(self.ctx_resid)

    def walk(self, u, v, ren_a, ren_b, eval_ok):
        if self.target is not None and self.run is None and eval_ok:
            e1, e2 = self.target
            if ls.s_alpha_eq(u, e1) and ls.s_alpha_eq(v, e2):
                self.run = (u, v)
                return "e", ls.SF_HOLE
        for i in range(self.n_val):
            if ls.s_alpha_eq(u, self.env_s[i]) and ls.s_alpha_eq(v, self.env_t[i]):
                return "cv", ls.SCvHole(i + 1)
        for i in range(self.n_ctx):
            es, et = self.ctxenv_s[i], self.ctxenv_t[i]
            if isinstance(es, ls.SHole) and isinstance(et, ls.SHole):
                continue
            su = s_strip_term(es, u)
            sv = s_strip_term(et, v)
            if su is None or sv is None:
                continue
            snap = self._snap()
            try:
                tag, sk = self.walk(su, sv, ren_a, ren_b, eval_ok)
                if tag == "e":
                    return "e", ls.SFStar(i + 1, sk)
                return "c", ls.SMcStar(i + 1, _s_as_c(tag, sk))
            except Bail:
                self._restore(snap)
        return self._structural(u, v, ren_a, ren_b, eval_ok)

    def _structural(self, u, v, ren_a, ren_b, eval_ok):
        snap = self._snap()
        try:
            return self._strict(u, v, ren_a, ren_b, eval_ok)
        except Bail:
            self._restore(snap)
            return self._mismatch(u, v, eval_ok)

    def _strict(self, u, v, ren_a, ren_b, eval_ok):
        match u, v:
            case ls.SVar(x), ls.SVar(y):
                ca, cb = ren_a.get(x), ren_b.get(y)
                if ca is None and cb is None and x == y:
                    return "cv", ls.SCvVar(x)
                if ca is not None and ca == cb:
                    return "cv", ls.SCvVar(ca)
                raise Bail
            case ls.SLam(x1, b1), ls.SLam(x2, b2):
                c = self._fresh_binder()
                tag, sk = self.walk(b1, b2, {**ren_a, x1: c}, {**ren_b, x2: c}, False)
                return "cv", ls.SCvLam(c, _s_as_c(tag, sk))
            case ls.SApp(f1, a1), ls.SApp(f2, a2):
                ftag, fsk = self.walk(f1, f2, ren_a, ren_b, eval_ok)
                if ftag == "e":
                    atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                    if atag == "e":
                        raise Bail
                    return "e", ls.SFAppL(fsk, _s_as_c(atag, ask))
                if ftag == "cv":
                    atag, ask = self.walk(a1, a2, ren_a, ren_b, eval_ok)
                    if atag == "e":
                        return "e", ls.SFAppR(fsk, ask)
                    return "c", ls.SMcApp(ls.SMcVal(fsk), _s_as_c(atag, ask))
                atag, ask = self.walk(a1, a2, ren_a, ren_b, False)
                if atag == "e":
                    raise Bail
                return "c", ls.SMcApp(fsk, _s_as_c(atag, ask))
            case ls.SReset(b1), ls.SReset(b2):
                tag, sk = self.walk(b1, b2, ren_a, ren_b, eval_ok)
                if tag == "e":
                    return "e", ls.SFReset(sk)
                return "c", ls.SMcReset(_s_as_c(tag, sk))
            case ls.SShift(x1, b1), ls.SShift(x2, b2):
                c = self._fresh_binder()
                tag, sk = self.walk(b1, b2, {**ren_a, x1: c}, {**ren_b, x2: c}, False)
                if tag == "e":
                    raise Bail
                return "c", ls.SMcShift(c, _s_as_c(tag, sk))
            case _:
                raise Bail

    def _mismatch(self, u, v, eval_ok):
        if ls.s_is_value(u) and ls.s_is_value(v):
            return "cv", self._residual_value(u, v)
        if not eval_ok:
            raise Bail
        routes = [self._try_split, self._try_run] if self.prefer_split else [self._try_run, self._try_split]
        for route in routes:
            snap = self._snap()
            try:
                return route(u, v)
            except Bail:
                self._restore(snap)
        raise Bail

    def _try_run(self, u, v):
        if not self.allow_residuals:
            raise Bail
        if self.run is not None or ls.s_is_value(u) or ls.s_is_value(v):
            raise Bail
        if ls.s_free_vars(u) or ls.s_free_vars(v):
            raise Bail
        self.run = (u, v)
        return "e", ls.SF_HOLE

    def _try_split(self, u, v):
        """Factor the mismatch through a pair of related contexts: find splits
        u = Cs[w], v = Ct[w'] whose fillings share a skeleton."""
        for pu, su in s_spine_splits(u):
            if isinstance(pu, ls.SHole):
                continue
            for pv, sv in s_spine_splits(v):
                if isinstance(pv, ls.SHole):
                    continue
                snap = self._snap()
                try:
                    tag, sk = self.walk(su, sv, {}, {}, True)
                    idx = self._residual_ctx(pu, pv)
                    if tag == "e":
                        return "e", ls.SFStar(idx, sk)
                    return "c", ls.SMcStar(idx, _s_as_c(tag, sk))
                except Bail:
                    self._restore(snap)
        raise Bail

    def walk_sctx(self, c1: ls.SCtx, c2: ls.SCtx):
        """Common multi-hole evaluation context for a pair of plain contexts."""
        for i in range(self.n_ctx):
            es, et = self.ctxenv_s[i], self.ctxenv_t[i]
            if isinstance(es, ls.SHole) and isinstance(et, ls.SHole):
                continue
            r1 = s_ctx_strip_prefix(es, c1)
            r2 = s_ctx_strip_prefix(et, c2)
            if r1 is None or r2 is None:
                continue
            snap = self._snap()
            try:
                return ls.SFStar(i + 1, self.walk_sctx(r1, r2))
            except Bail:
                self._restore(snap)
        match c1, c2:
            case ls.SHole(), ls.SHole():
                return ls.SF_HOLE
            case ls.SAppL(a1, t1), ls.SAppL(a2, t2):
                inner = self.walk_sctx(a1, a2)
                tag, sk = self.walk(t1, t2, {}, {}, False)
                if tag == "e":
                    raise Bail
                return ls.SFAppL(inner, _s_as_c(tag, sk))
            case ls.SAppR(f1, a1), ls.SAppR(f2, a2):
                tag, sk = self.walk(f1, f2, {}, {}, False)
                if tag != "cv":
                    raise Bail
                return ls.SFAppR(sk, self.walk_sctx(a1, a2))
            case ls.SDelim(a1), ls.SDelim(a2):
                return ls.SFReset(self.walk_sctx(a1, a2))
        # a mismatched context pair becomes a candidate new entry
        snap = self._snap()
        try:
            idx = self._residual_ctx(c1, c2)
            return ls.SFStar(idx, ls.SF_HOLE)
        except Bail:
            self._restore(snap)
            raise


def _s_as_c(tag, sk):
    if tag == "cv":
        return ls.SMcVal(sk)
    if tag == "c":
        return sk
    raise Bail


def s_anti_unify_runs(run_s, run_t, ctxenv_s, ctxenv_t, env_s, env_t, prefer_split=False) -> AU:
    w = SAntiUnifier(ctxenv_s, ctxenv_t, env_s, env_t, prefer_split)
    try:
        tag, sk = w.walk(run_s, run_t, {}, {}, True)
    except Bail:
        return AU(ls.SF_HOLE, None, [], (run_s, run_t), degraded=True)
    if tag == "e":
        return AU(sk, None, w.resid, w.run, w.ctx_resid)
    return AU(None, _s_as_c(tag, sk), w.resid, None, w.ctx_resid)


def s_replay_runs(au: AU, ctxenv_s, ctxenv_t, env_s, env_t):
    ext_cs = tuple(ctxenv_s) + tuple(a for a, _ in au.ctx_residuals)
    ext_ct = tuple(ctxenv_t) + tuple(b for _, b in au.ctx_residuals)
    ext_vs = tuple(env_s) + tuple(a for a, _ in au.value_residuals)
    ext_vt = tuple(env_t) + tuple(b for _, b in au.value_residuals)
    fake_s = ls.SState(ext_cs, ext_vs)
    fake_t = ls.SState(ext_ct, ext_vt)
    if au.run_skeleton is not None:
        rs, rt = au.run_residual
        return ls.s_plug_fd(au.run_skeleton, rs, fake_s), ls.s_plug_fd(au.run_skeleton, rt, fake_t)
    return ls.s_plug_mc(au.ctx_skeleton, fake_s), ls.s_plug_mc(au.ctx_skeleton, fake_t)
