"""Promptless multi-hole contexts: the testing-context grammar, plugging, and
bounded enumeration.

Two generations exist: the plain one, and the extended one whose contexts may
re-apply a continuation stored in the environment through a star hole.  Hole
and star indices are 1-based and refer to positions in a value environment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from .terms import (
    AppL,
    AppR,
    ContVal,
    Delim,
    EvalCtx,
    HOLE,
    App,
    Grab,
    Lam,
    New,
    PromptVal,
    Reset,
    Term,
    Throw,
    Var,
    compose_ctx,
    is_value,
    plug,
)

Generation = Literal["standard", "star"]


class PlugError(Exception):
    pass


class IndexOutOfRange(PlugError):
    pass


class KindMismatch(PlugError):
    pass


# ---------------------------------------------------------------------------
# Grammar


@dataclass(frozen=True)
class MultiCtx:
    __slots__ = ()


@dataclass(frozen=True)
class ValueCtx:
    __slots__ = ()


@dataclass(frozen=True)
class MultiEvalCtx:
    __slots__ = ()


@dataclass(frozen=True)
class CvVar(ValueCtx):
    name: str


@dataclass(frozen=True)
class CvLam(ValueCtx):
    name: str
    body: MultiCtx


@dataclass(frozen=True)
class CvCont(ValueCtx):
    ctx: MultiEvalCtx


@dataclass(frozen=True)
class CvHole(ValueCtx):
    index: int


@dataclass(frozen=True)
class CVal(MultiCtx):
    value: ValueCtx


@dataclass(frozen=True)
class CApp(MultiCtx):
    fn: MultiCtx
    arg: MultiCtx


@dataclass(frozen=True)
class CNew(MultiCtx):
    name: str
    body: MultiCtx


@dataclass(frozen=True)
class CReset(MultiCtx):
    delim: ValueCtx
    body: MultiCtx


@dataclass(frozen=True)
class CGrab(MultiCtx):
    delim: ValueCtx
    name: str
    body: MultiCtx


@dataclass(frozen=True)
class CThrow(MultiCtx):
    cont: ValueCtx
    arg: MultiCtx


@dataclass(frozen=True)
class CStar(MultiCtx):
    index: int
    body: MultiCtx


@dataclass(frozen=True)
class EHole(MultiEvalCtx):
    pass


@dataclass(frozen=True)
class EAppL(MultiEvalCtx):
    ctx: MultiEvalCtx
    arg: MultiCtx


@dataclass(frozen=True)
class EAppR(MultiEvalCtx):
    fn: ValueCtx
    ctx: MultiEvalCtx


@dataclass(frozen=True)
class EDelim(MultiEvalCtx):
    index: int
    ctx: MultiEvalCtx


@dataclass(frozen=True)
class EStar(MultiEvalCtx):
    index: int
    ctx: MultiEvalCtx


E_HOLE = EHole()


# ---------------------------------------------------------------------------
# Plugging


def _env_at(env: Sequence[Term], i: int) -> Term:
    if not 1 <= i <= len(env):
        raise IndexOutOfRange(f"hole index {i} for environment of size {len(env)}")
    return env[i - 1]


def _cont_at(env: Sequence[Term], i: int) -> EvalCtx:
    v = _env_at(env, i)
    if not isinstance(v, ContVal):
        raise KindMismatch(f"star index {i} needs a captured context, got {v}")
    return v.ctx


def plug_value_ctx(cv: ValueCtx, env: Sequence[Term]) -> Term:
    match cv:
        case CvVar(x):
            return Var(x)
        case CvLam(x, b):
            return Lam(x, plug_multi(b, env))
        case CvCont(e):
            return ContVal(eval_ctx_of(e, env))
        case CvHole(i):
            return _env_at(env, i)
    raise TypeError(f"not a value context: {cv!r}")


def plug_multi(c: MultiCtx | ValueCtx, env: Sequence[Term]) -> Term:
    if isinstance(c, ValueCtx):
        return plug_value_ctx(c, env)
    match c:
        case CVal(v):
            return plug_value_ctx(v, env)
        case CApp(f, a):
            return App(plug_multi(f, env), plug_multi(a, env))
        case CNew(x, b):
            return New(x, plug_multi(b, env))
        case CReset(d, b):
            return Reset(plug_value_ctx(d, env), plug_multi(b, env))
        case CGrab(d, x, b):
            return Grab(plug_value_ctx(d, env), x, plug_multi(b, env))
        case CThrow(k, a):
            return Throw(plug_value_ctx(k, env), plug_multi(a, env))
        case CStar(i, b):
            return plug(_cont_at(env, i), plug_multi(b, env))
    raise TypeError(f"not a multi-hole context: {c!r}")


def eval_ctx_of(e: MultiEvalCtx, env: Sequence[Term]) -> EvalCtx:
    """Instantiate the indexed holes, producing an ordinary evaluation context."""
    match e:
        case EHole():
            return HOLE
        case EAppL(c, a):
            return AppL(eval_ctx_of(c, env), plug_multi(a, env))
        case EAppR(f, c):
            fn = plug_value_ctx(f, env)
            if not is_value(fn):
                raise KindMismatch(f"function position must be a value: {fn}")
            return AppR(fn, eval_ctx_of(c, env))
        case EDelim(i, c):
            v = _env_at(env, i)
            if not isinstance(v, PromptVal):
                raise KindMismatch(f"delimiter index {i} needs a prompt, got {v}")
            return Delim(v.prompt, eval_ctx_of(c, env))
        case EStar(i, c):
            return compose_ctx(_cont_at(env, i), eval_ctx_of(c, env))
    raise TypeError(f"not a multi-hole evaluation context: {e!r}")


def plug_multi_eval(e: MultiEvalCtx, run: Term, env: Sequence[Term]) -> Term:
    return plug(eval_ctx_of(e, env), run)


def mhc_of_emhc(e: MultiEvalCtx, fill: MultiCtx) -> MultiCtx:
    """View an evaluation context as a general context with `fill` in its hole."""
    match e:
        case EHole():
            return fill
        case EAppL(c, a):
            return CApp(mhc_of_emhc(c, fill), a)
        case EAppR(f, c):
            return CApp(CVal(f), mhc_of_emhc(c, fill))
        case EDelim(i, c):
            return CReset(CvHole(i), mhc_of_emhc(c, fill))
        case EStar(i, c):
            return CStar(i, mhc_of_emhc(c, fill))
    raise TypeError(f"not a multi-hole evaluation context: {e!r}")


def ctx_size(c) -> int:
    """Constructor count, holes included."""
    match c:
        case CvVar(_) | CvHole(_) | EHole():
            return 1
        case CvLam(_, b) | CNew(_, b) | CStar(_, b):
            return 1 + ctx_size(b)
        case CvCont(e):
            return 1 + ctx_size(e)
        case CVal(v):
            return ctx_size(v)
        case CApp(f, a):
            return 1 + ctx_size(f) + ctx_size(a)
        case CReset(d, b) | CGrab(d, _, b) | CThrow(d, b):
            return 1 + ctx_size(d) + ctx_size(b)
        case EAppL(e, a):
            return 1 + ctx_size(e) + ctx_size(a)
        case EAppR(f, e):
            return 1 + ctx_size(f) + ctx_size(e)
        case EDelim(_, e) | EStar(_, e):
            return 1 + ctx_size(e)
    raise TypeError(f"no size for {c!r}")


# ---------------------------------------------------------------------------
# Bounded enumeration
#
# Enumerated contexts are closed: a variable may only occur under a binder of
# the context itself.  Binders are drawn from a fixed two-name pool with a
# canonical choice (first unused pool name, else the first), so each context
# appears exactly once up to alpha.

EnvShape = tuple[str, ...]  # per-index kind: "prompt" | "cont" | "other"


def shape_of_env(env: Sequence[Term]) -> EnvShape:
    out = []
    for v in env:
        if isinstance(v, PromptVal):
            out.append("prompt")
        elif isinstance(v, ContVal):
            out.append("cont")
        else:
            out.append("other")
    return tuple(out)


class Enumerator:
    def __init__(self, generation: Generation, env_shape: EnvShape, pool=("a", "b")):
        self.generation = generation
        self.shape = env_shape
        self.pool = pool
        self.holes = tuple(range(1, len(env_shape) + 1))
        self.prompt_idx = tuple(i for i, k in enumerate(env_shape, 1) if k == "prompt")
        self.cont_idx = tuple(i for i, k in enumerate(env_shape, 1) if k == "cont")
        self._memo: dict = {}

    def _binder(self, scope: frozenset[str]) -> str:
        for nm in self.pool:
            if nm not in scope:
                return nm
        return self.pool[0]

    def values(self, n: int, scope: frozenset[str]) -> list[ValueCtx]:
        key = ("cv", n, scope)
        if key in self._memo:
            return self._memo[key]
        out: list[ValueCtx] = []
        if n == 1:
            out.extend(CvVar(x) for x in self.pool if x in scope)
            out.extend(CvHole(i) for i in self.holes)
        elif n >= 2:
            b = self._binder(scope)
            out.extend(CvLam(b, c) for c in self.general(n - 1, scope | {b}))
            out.extend(CvCont(e) for e in self.evals(n - 1, scope))
        self._memo[key] = out
        return out

    def general(self, n: int, scope: frozenset[str]) -> list[MultiCtx]:
        key = ("c", n, scope)
        if key in self._memo:
            return self._memo[key]
        out: list[MultiCtx] = [CVal(v) for v in self.values(n, scope)]
        if n >= 2:
            b = self._binder(scope)
            for k in range(1, n - 1):
                for f in self.general(k, scope):
                    out.extend(CApp(f, a) for a in self.general(n - 1 - k, scope))
            out.extend(CNew(b, c) for c in self.general(n - 1, scope | {b}))
            for k in range(1, n - 1):
                for d in self.values(k, scope):
                    rest = n - 1 - k
                    out.extend(CReset(d, c) for c in self.general(rest, scope))
                    out.extend(CGrab(d, b, c) for c in self.general(rest, scope | {b}))
                    out.extend(CThrow(d, c) for c in self.general(rest, scope))
            if self.generation == "star":
                out.extend(
                    CStar(i, c) for i in self.cont_idx for c in self.general(n - 1, scope)
                )
        self._memo[key] = out
        return out

    def evals(self, n: int, scope: frozenset[str]) -> list[MultiEvalCtx]:
        key = ("e", n, scope)
        if key in self._memo:
            return self._memo[key]
        out: list[MultiEvalCtx] = []
        if n == 1:
            out.append(E_HOLE)
        elif n >= 2:
            for k in range(1, n - 1):
                for e in self.evals(k, scope):
                    out.extend(EAppL(e, a) for a in self.general(n - 1 - k, scope))
                for f in self.values(k, scope):
                    out.extend(EAppR(f, e) for e in self.evals(n - 1 - k, scope))
            out.extend(EDelim(i, e) for i in self.prompt_idx for e in self.evals(n - 1, scope))
            if self.generation == "star":
                out.extend(EStar(i, e) for i in self.cont_idx for e in self.evals(n - 1, scope))
        self._memo[key] = out
        return out


_ENUMERATORS: dict = {}


def enumerate_multi(kind: str, generation: Generation, size: int, env_shape: EnvShape):
    """All well-kinded contexts of the given kind with at most `size` nodes,
    in size-lexicographic order.  kind is one of "c", "cv", "edia"."""
    key = (generation, env_shape)
    enum = _ENUMERATORS.get(key)
    if enum is None:
        enum = _ENUMERATORS[key] = Enumerator(generation, env_shape)
    empty: frozenset[str] = frozenset()
    for n in range(1, size + 1):
        if kind == "c":
            yield from enum.general(n, empty)
        elif kind == "cv":
            yield from enum.values(n, empty)
        elif kind == "edia":
            yield from enum.evals(n, empty)
        else:
            raise ValueError(f"unknown context kind {kind!r}")
