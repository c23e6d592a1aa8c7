"""Core syntax for the multi-prompt calculus: terms, prompts, evaluation
contexts, binding, and prompt permutations.

Terms are immutable; every operation returns fresh structure.  Prompts are
plain naturals so that "pick the least unused id" is a total, deterministic
choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

Prompt = int


class IllFormedTerm(Exception):
    """Raised when a constructor argument violates the grammar."""


class OpenTermError(Exception):
    """Raised when a closed term is required but free variables remain."""


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    name: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class New(Term):
    name: str
    body: Term


@dataclass(frozen=True)
class Reset(Term):
    delim: Term
    body: Term

    def __post_init__(self):
        if not is_value(self.delim):
            raise IllFormedTerm(f"reset delimiter must be a value: {self.delim}")


@dataclass(frozen=True)
class Grab(Term):
    delim: Term
    name: str
    body: Term

    def __post_init__(self):
        if not is_value(self.delim):
            raise IllFormedTerm(f"grab delimiter must be a value: {self.delim}")


@dataclass(frozen=True)
class Throw(Term):
    cont: Term
    arg: Term

    def __post_init__(self):
        if not is_value(self.cont):
            raise IllFormedTerm(f"throw target must be a value: {self.cont}")


@dataclass(frozen=True)
class PromptVal(Term):
    prompt: Prompt


@dataclass(frozen=True)
class ContVal(Term):
    ctx: "EvalCtx"


# ---------------------------------------------------------------------------
# Evaluation contexts (interpreted outside-in: the outermost frame is the
# outermost constructor).


@dataclass(frozen=True)
class EvalCtx:
    __slots__ = ()


@dataclass(frozen=True)
class Hole(EvalCtx):
    pass


@dataclass(frozen=True)
class AppL(EvalCtx):
    ctx: EvalCtx
    arg: Term


@dataclass(frozen=True)
class AppR(EvalCtx):
    fn: Term
    ctx: EvalCtx

    def __post_init__(self):
        if not is_value(self.fn):
            raise IllFormedTerm(f"left of a hole in argument position must be a value: {self.fn}")


@dataclass(frozen=True)
class Delim(EvalCtx):
    prompt: Prompt
    ctx: EvalCtx


HOLE = Hole()

Entity = Union[Term, EvalCtx]


def is_value(t: Term) -> bool:
    return isinstance(t, (Var, Lam, PromptVal, ContVal))


# ---------------------------------------------------------------------------
# Variables and binding


def free_vars(m: Entity) -> frozenset[str]:
    match m:
        case Var(x):
            return frozenset((x,))
        case Lam(x, b) | New(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Reset(d, b):
            return free_vars(d) | free_vars(b)
        case Grab(d, x, b):
            return free_vars(d) | (free_vars(b) - {x})
        case Throw(c, a):
            return free_vars(c) | free_vars(a)
        case PromptVal(_) | Hole():
            return frozenset()
        case ContVal(e):
            return free_vars(e)
        case AppL(c, a):
            return free_vars(c) | free_vars(a)
        case AppR(f, c):
            return free_vars(f) | free_vars(c)
        case Delim(_, c):
            return free_vars(c)
    raise TypeError(f"not a term or context: {m!r}")


def is_closed(m: Entity) -> bool:
    return not free_vars(m)


def prompts_of(m: Entity) -> frozenset[Prompt]:
    match m:
        case Var(_):
            return frozenset()
        case Lam(_, b) | New(_, b):
            return prompts_of(b)
        case App(f, a):
            return prompts_of(f) | prompts_of(a)
        case Reset(d, b):
            return prompts_of(d) | prompts_of(b)
        case Grab(d, _, b):
            return prompts_of(d) | prompts_of(b)
        case Throw(c, a):
            return prompts_of(c) | prompts_of(a)
        case PromptVal(p):
            return frozenset((p,))
        case ContVal(e):
            return prompts_of(e)
        case Hole():
            return frozenset()
        case AppL(c, a):
            return prompts_of(c) | prompts_of(a)
        case AppR(f, c):
            return prompts_of(f) | prompts_of(c)
        case Delim(p, c):
            return prompts_of(c) | {p}
    raise TypeError(f"not a term or context: {m!r}")


def sur_prompts(e: EvalCtx) -> frozenset[Prompt]:
    """Prompts guarding the hole: every delimiter on the spine."""
    match e:
        case Hole():
            return frozenset()
        case AppL(c, _) | AppR(_, c):
            return sur_prompts(c)
        case Delim(p, c):
            return sur_prompts(c) | {p}
    raise TypeError(f"not an evaluation context: {e!r}")


def fresh_cond(m1, m2, m3) -> bool:
    """The # side condition: prompts new in m1 w.r.t. m2 avoid m3."""
    return not (prompts_of_any(m1) - prompts_of_any(m2)) & prompts_of_any(m3)


def prompts_of_any(m) -> frozenset[Prompt]:
    if isinstance(m, (Term, EvalCtx)):
        return prompts_of(m)
    if isinstance(m, Iterable):
        out: frozenset[Prompt] = frozenset()
        for x in m:
            out |= prompts_of_any(x)
        return out
    raise TypeError(f"no prompts defined for {m!r}")


def fresh_name(base: str, avoid: frozenset[str]) -> str:
    if base not in avoid:
        return base
    n = 1
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"


# ---------------------------------------------------------------------------
# Substitution (capture-avoiding; substituted term must be a value)


def subst(m: Entity, x: str, v: Term):
    if not is_value(v):
        raise IllFormedTerm(f"only values may be substituted, got {v}")
    return _subst(m, x, v, free_vars(v))


def _subst(m: Entity, x: str, v: Term, fv: frozenset[str]):
    match m:
        case Var(y):
            return v if y == x else m
        case Lam(y, b):
            if y == x:
                return m
            y2, b2 = _avoid(y, b, x, fv)
            return Lam(y2, _subst(b2, x, v, fv))
        case New(y, b):
            if y == x:
                return m
            y2, b2 = _avoid(y, b, x, fv)
            return New(y2, _subst(b2, x, v, fv))
        case App(f, a):
            return App(_subst(f, x, v, fv), _subst(a, x, v, fv))
        case Reset(d, b):
            return Reset(_subst(d, x, v, fv), _subst(b, x, v, fv))
        case Grab(d, y, b):
            d2 = _subst(d, x, v, fv)
            if y == x:
                return Grab(d2, y, b)
            y2, b2 = _avoid(y, b, x, fv)
            return Grab(d2, y2, _subst(b2, x, v, fv))
        case Throw(c, a):
            return Throw(_subst(c, x, v, fv), _subst(a, x, v, fv))
        case PromptVal(_):
            return m
        case ContVal(e):
            return ContVal(_subst(e, x, v, fv))
        case Hole():
            return m
        case AppL(c, a):
            return AppL(_subst(c, x, v, fv), _subst(a, x, v, fv))
        case AppR(f, c):
            return AppR(_subst(f, x, v, fv), _subst(c, x, v, fv))
        case Delim(p, c):
            return Delim(p, _subst(c, x, v, fv))
    raise TypeError(f"not a term or context: {m!r}")


def _avoid(y: str, body, x: str, fv: frozenset[str]):
    """Rename binder y away from the substituted value's free variables."""
    if y not in fv:
        return y, body
    y2 = fresh_name(y, fv | free_vars(body) | {x})
    return y2, subst(body, y, Var(y2))


# ---------------------------------------------------------------------------
# Alpha equivalence via canonical renaming of binders (pre-order numbering)


_CANON_CACHE: dict = {}


def canon(m: Entity) -> Entity:
    """Rename every binder to !0, !1, ... in traversal order."""
    hit = _CANON_CACHE.get(id(m))
    if hit is not None and hit[0] is m:
        return hit[1]
    counter = [0]
    out = _canon(m, {}, counter)
    _CANON_CACHE[id(m)] = (m, out)
    return out


def _canon(m: Entity, env: dict[str, str], counter: list[int]):
    def bind(y: str):
        nm = f"!{counter[0]}"
        counter[0] += 1
        return nm

    match m:
        case Var(y):
            return Var(env.get(y, y))
        case Lam(y, b):
            y2 = bind(y)
            return Lam(y2, _canon(b, {**env, y: y2}, counter))
        case New(y, b):
            y2 = bind(y)
            return New(y2, _canon(b, {**env, y: y2}, counter))
        case App(f, a):
            return App(_canon(f, env, counter), _canon(a, env, counter))
        case Reset(d, b):
            return Reset(_canon(d, env, counter), _canon(b, env, counter))
        case Grab(d, y, b):
            d2 = _canon(d, env, counter)
            y2 = bind(y)
            return Grab(d2, y2, _canon(b, {**env, y: y2}, counter))
        case Throw(c, a):
            return Throw(_canon(c, env, counter), _canon(a, env, counter))
        case PromptVal(_):
            return m
        case ContVal(e):
            return ContVal(_canon(e, env, counter))
        case Hole():
            return m
        case AppL(c, a):
            return AppL(_canon(c, env, counter), _canon(a, env, counter))
        case AppR(f, c):
            return AppR(_canon(f, env, counter), _canon(c, env, counter))
        case Delim(p, c):
            return Delim(p, _canon(c, env, counter))
    raise TypeError(f"not a term or context: {m!r}")


def alpha_eq(m1: Entity, m2: Entity) -> bool:
    return canon(m1) == canon(m2)


# ---------------------------------------------------------------------------
# Prompt permutations


@dataclass(frozen=True)
class Permutation:
    """Finite-support bijection on prompt ids."""

    pairs: tuple[tuple[Prompt, Prompt], ...]  # sorted, no fixpoints

    @staticmethod
    def of(mapping: dict[Prompt, Prompt]) -> "Permutation":
        cleaned = {a: b for a, b in mapping.items() if a != b}
        if len(set(cleaned.values())) != len(cleaned):
            raise ValueError(f"not injective: {mapping}")
        if set(cleaned.values()) != set(cleaned.keys()):
            raise ValueError(f"support not closed (not a permutation): {mapping}")
        return Permutation(tuple(sorted(cleaned.items())))

    @staticmethod
    def identity() -> "Permutation":
        return Permutation(())

    @staticmethod
    def swap(p: Prompt, q: Prompt) -> "Permutation":
        if p == q:
            return Permutation(())
        return Permutation.of({p: q, q: p})

    def __call__(self, p: Prompt) -> Prompt:
        for a, b in self.pairs:
            if a == p:
                return b
        return p

    def inverse(self) -> "Permutation":
        return Permutation.of({b: a for a, b in self.pairs})

    def after(self, other: "Permutation") -> "Permutation":
        """self ∘ other."""
        support = {a for a, _ in self.pairs} | {a for a, _ in other.pairs}
        return Permutation.of({p: self(other(p)) for p in support})


def apply_perm(sigma: Permutation, m):
    """Rename every prompt literal through sigma; structure is untouched."""
    match m:
        case Var(_):
            return m
        case Lam(x, b):
            return Lam(x, apply_perm(sigma, b))
        case New(x, b):
            return New(x, apply_perm(sigma, b))
        case App(f, a):
            return App(apply_perm(sigma, f), apply_perm(sigma, a))
        case Reset(d, b):
            return Reset(apply_perm(sigma, d), apply_perm(sigma, b))
        case Grab(d, x, b):
            return Grab(apply_perm(sigma, d), x, apply_perm(sigma, b))
        case Throw(c, a):
            return Throw(apply_perm(sigma, c), apply_perm(sigma, a))
        case PromptVal(p):
            return PromptVal(sigma(p))
        case ContVal(e):
            return ContVal(apply_perm(sigma, e))
        case Hole():
            return m
        case AppL(c, a):
            return AppL(apply_perm(sigma, c), apply_perm(sigma, a))
        case AppR(f, c):
            return AppR(apply_perm(sigma, f), apply_perm(sigma, c))
        case Delim(p, c):
            return Delim(sigma(p), apply_perm(sigma, c))
    raise TypeError(f"cannot permute prompts of {m!r}")


# ---------------------------------------------------------------------------
# Plugging


def plug(e: EvalCtx, t: Term) -> Term:
    match e:
        case Hole():
            return t
        case AppL(c, a):
            return App(plug(c, t), a)
        case AppR(f, c):
            return App(f, plug(c, t))
        case Delim(p, c):
            return Reset(PromptVal(p), plug(c, t))
    raise TypeError(f"not an evaluation context: {e!r}")


def compose_ctx(outer: EvalCtx, inner: EvalCtx) -> EvalCtx:
    """outer[inner] as a context."""
    match outer:
        case Hole():
            return inner
        case AppL(c, a):
            return AppL(compose_ctx(c, inner), a)
        case AppR(f, c):
            return AppR(f, compose_ctx(c, inner))
        case Delim(p, c):
            return Delim(p, compose_ctx(c, inner))
    raise TypeError(f"not an evaluation context: {outer!r}")


def strip_ctx(e: EvalCtx, t: Term) -> Term | None:
    """If t = e[t'] for some t', return t' (unique when e has any frame)."""
    match e:
        case Hole():
            return t
        case AppL(c, a):
            if isinstance(t, App) and alpha_eq(t.arg, a):
                return strip_ctx(c, t.fn)
            return None
        case AppR(f, c):
            if isinstance(t, App) and alpha_eq(t.fn, f):
                return strip_ctx(c, t.arg)
            return None
        case Delim(p, c):
            if isinstance(t, Reset) and t.delim == PromptVal(p):
                return strip_ctx(c, t.body)
            return None
    raise TypeError(f"not an evaluation context: {e!r}")
