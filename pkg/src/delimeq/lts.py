"""First-order labelled transitions over states (a value environment plus an
optional running term), in two flavours: the plain one, and the star flavour
whose testing contexts may re-apply stored continuations and which classifies
transitions as active or passive.

States are kept normalized: a running value moves to the end of the
environment.  Environment indices in labels are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import contexts as mc
from .parser import fmt
from .reduction import NfStuck, Reduced, decompose, red_hat, step
from .terms import (
    ContVal,
    Delim,
    EvalCtx,
    Hole,
    Lam,
    Permutation,
    PromptVal,
    Term,
    canon,
    apply_perm,
    free_vars,
    is_value,
    prompts_of,
    sur_prompts,
)
from .reduction import least_fresh_prompt

Variant = str  # "standard" | "star"


@dataclass(frozen=True)
class State:
    env: tuple[Term, ...]
    running: Term | None = None


def mk_state(env: Sequence[Term], running: Term | None = None) -> State:
    env = tuple(env)
    for v in env:
        if not is_value(v):
            raise ValueError(f"environment entries must be values: {v}")
        if free_vars(v):
            raise ValueError(f"environment entries must be closed: {v}")
    if running is not None:
        if free_vars(running):
            raise ValueError(f"running term must be closed: {running}")
        if is_value(running):
            env = env + (running,)
            running = None
    return State(env, running)


def env_prompts(s: State) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for v in s.env:
        out |= prompts_of(v)
    return out


# ---------------------------------------------------------------------------
# Labels


@dataclass(frozen=True)
class LTau:
    pass


@dataclass(frozen=True)
class LLam:
    index: int
    arg: mc.ValueCtx


@dataclass(frozen=True)
class LVal:
    pass


@dataclass(frozen=True)
class LCtx:
    index: int
    arg: mc.MultiCtx


@dataclass(frozen=True)
class LCtxStar:
    index: int
    arg: mc.ValueCtx


@dataclass(frozen=True)
class LPeq:
    i: int
    j: int


@dataclass(frozen=True)
class LNu:
    pass


@dataclass(frozen=True)
class LStuck:
    ctx: mc.MultiEvalCtx


@dataclass(frozen=True)
class LSplit:
    i: int
    j: int


Label = LTau | LLam | LVal | LCtx | LCtxStar | LPeq | LNu | LStuck | LSplit

TAU = LTau()
VAL = LVal()
NU = LNu()


def fmt_label(lab: Label) -> str:
    match lab:
        case LTau():
            return "tau"
        case LLam(i, a):
            return f"lam {i} {fmt(a)}"
        case LVal():
            return "val"
        case LCtx(i, a):
            return f"ctx {i} {fmt(a)}"
        case LCtxStar(i, a):
            return f"ctx* {i} {fmt(a)}"
        case LPeq(i, j):
            return f"peq {i} {j}"
        case LNu():
            return "nu"
        case LStuck(e):
            return f"stuck {fmt(e)}"
        case LSplit(i, j):
            return f"split {i} {j}"
    raise TypeError(f"not a label: {lab!r}")


def is_passive(lab: Label, variant: Variant) -> bool:
    if variant != "star":
        return False
    return isinstance(lab, (LCtxStar, LVal))


# ---------------------------------------------------------------------------
# Applying labels


def apply_label(s: State, lab: Label, variant: Variant) -> State | None:
    """The unique successor under lab, or None when not applicable."""
    match lab:
        case LTau():
            if s.running is None:
                return None
            r = step(s.running, env_prompts(s))
            if not isinstance(r, Reduced):
                return None
            return mk_state(s.env, r.term)
        case LVal():
            return s if s.running is None else None
        case LLam(i, arg):
            if s.running is not None or not _in_range(s, i):
                return None
            v = s.env[i - 1]
            if not isinstance(v, Lam):
                return None
            try:
                filled = mc.plug_value_ctx(arg, s.env)
            except mc.PlugError:
                return None
            from .terms import subst

            return mk_state(s.env, subst(v.body, v.name, filled))
        case LCtx(i, arg):
            if variant != "standard":
                return None
            return _apply_ctx_test(s, i, arg)
        case LCtxStar(i, arg):
            if variant != "star":
                return None
            return _apply_ctx_test(s, i, arg)
        case LPeq(i, j):
            if s.running is not None or not (_in_range(s, i) and _in_range(s, j)):
                return None
            a, b = s.env[i - 1], s.env[j - 1]
            if isinstance(a, PromptVal) and a == b:
                return s
            return None
        case LNu():
            if s.running is not None:
                return None
            p = least_fresh_prompt(env_prompts(s))
            return mk_state(s.env + (PromptVal(p),))
        case LStuck(ectx):
            if s.running is None:
                return None
            d = decompose(s.running)
            if not isinstance(d, NfStuck):
                return None
            try:
                filled = mc.plug_multi_eval(ectx, s.running, s.env)
            except mc.PlugError:
                return None
            return mk_state(s.env, red_hat(filled, env_prompts(s)))
        case LSplit(i, j):
            if variant != "star" or s.running is not None:
                return None
            if not (_in_range(s, i) and _in_range(s, j)):
                return None
            k, pv = s.env[i - 1], s.env[j - 1]
            if not isinstance(k, ContVal) or not isinstance(pv, PromptVal):
                return None
            parts = split_ctx_at_prompt(k.ctx, pv.prompt)
            if parts is None:
                return None
            outer, inner = parts
            return mk_state(s.env + (ContVal(outer), ContVal(inner)))
    raise TypeError(f"not a label: {lab!r}")


def _in_range(s: State, i: int) -> bool:
    return 1 <= i <= len(s.env)


def _apply_ctx_test(s: State, i: int, arg) -> State | None:
    if s.running is not None or not _in_range(s, i):
        return None
    v = s.env[i - 1]
    if not isinstance(v, ContVal):
        return None
    try:
        filled = mc.plug_multi(arg, s.env)
    except mc.PlugError:
        return None
    from .terms import plug

    return mk_state(s.env, plug(v.ctx, filled))


def split_ctx_at_prompt(e: EvalCtx, p: int) -> tuple[EvalCtx, EvalCtx] | None:
    """Write e = E1[<E2>_p] with p not guarding the hole of E2 (the innermost
    matching delimiter); unique when it exists."""
    match e:
        case Hole():
            return None
        case Delim(q, c):
            inner = split_ctx_at_prompt(c, p)
            if inner is not None:
                return Delim(q, inner[0]), inner[1]
            if q == p:
                return Hole(), c
            return None
        case _:
            from .terms import AppL, AppR

            match e:
                case AppL(c, a):
                    inner = split_ctx_at_prompt(c, p)
                    return None if inner is None else (AppL(inner[0], a), inner[1])
                case AppR(f, c):
                    inner = split_ctx_at_prompt(c, p)
                    return None if inner is None else (AppR(f, inner[0]), inner[1])
    raise TypeError(f"not an evaluation context: {e!r}")


# ---------------------------------------------------------------------------
# Enumerating candidate labels


_LABEL_CACHE: dict = {}


def enumerate_labels(s: State, ctx_size: int, variant: Variant) -> list[Label]:
    """Labels worth playing from s.  Prompt-equality labels are produced for
    every pair of prompt positions (holding or not); everything else is
    structurally applicable."""
    if s.running is None:
        sig = tuple(
            "lam" if isinstance(v, Lam) else k
            for v, k in zip(s.env, mc.shape_of_env(s.env))
        )
        key = (sig, ctx_size, variant)
        hit = _LABEL_CACHE.get(key)
        if hit is not None:
            return hit
        out = _enumerate_labels(s, ctx_size, variant)
        _LABEL_CACHE[key] = out
        return out
    return _enumerate_labels(s, ctx_size, variant)


def _enumerate_labels(s: State, ctx_size: int, variant: Variant) -> list[Label]:
    labels: list[Label] = []
    if s.running is not None:
        if isinstance(step(s.running, env_prompts(s)), Reduced):
            labels.append(TAU)
        if isinstance(decompose(s.running), NfStuck):
            shape = mc.shape_of_env(s.env)
            for e in mc.enumerate_multi("edia", _gen(variant), ctx_size, shape):
                labels.append(LStuck(e))
        return labels
    labels.append(VAL)
    labels.append(NU)
    shape = mc.shape_of_env(s.env)
    prompt_idx = [i for i, k in enumerate(shape, 1) if k == "prompt"]
    cont_idx = [i for i, k in enumerate(shape, 1) if k == "cont"]
    for i, v in enumerate(s.env, 1):
        if isinstance(v, Lam):
            for cv in mc.enumerate_multi("cv", _gen(variant), ctx_size, shape):
                labels.append(LLam(i, cv))
    for i in cont_idx:
        if variant == "standard":
            for c in mc.enumerate_multi("c", "standard", ctx_size, shape):
                labels.append(LCtx(i, c))
        else:
            for cv in mc.enumerate_multi("cv", "star", ctx_size, shape):
                labels.append(LCtxStar(i, cv))
            for j in prompt_idx:
                labels.append(LSplit(i, j))
    for i in prompt_idx:
        for j in prompt_idx:
            labels.append(LPeq(i, j))
    return labels


def _gen(variant: Variant) -> str:
    return "star" if variant == "star" else "standard"


# ---------------------------------------------------------------------------
# Weak transitions


@dataclass(frozen=True)
class WeakResult:
    states: tuple[State, ...]
    decided: bool  # every explored tau chain reached a normal form in budget


def tau_chain(s: State, fuel: int) -> tuple[list[State], bool]:
    """The deterministic chain s, s1, ... up to fuel steps; decided when it
    ends in a state with no further internal step."""
    out = [s]
    cur = s
    for _ in range(fuel):
        nxt = apply_label(cur, TAU, "star")
        if nxt is None:
            return out, True
        out.append(nxt)
        cur = nxt
    return out, apply_label(cur, TAU, "star") is None


def weak_apply(s: State, lab: Label, fuel: int, variant: Variant) -> WeakResult:
    """All states reachable by tau* lab tau* within the tau budget."""
    pre, pre_decided = tau_chain(s, fuel)
    if isinstance(lab, LTau):
        return WeakResult(tuple(pre), pre_decided)
    out: list[State] = []
    seen: set = set()
    decided = pre_decided
    for k, mid in enumerate(pre):
        nxt = apply_label(mid, lab, variant)
        if nxt is None:
            continue
        post, post_decided = tau_chain(nxt, fuel - k)
        decided = decided and post_decided
        for t in post:
            key = state_key(t)
            if key not in seen:
                seen.add(key)
                out.append(t)
    return WeakResult(tuple(out), decided)


# ---------------------------------------------------------------------------
# Canonical forms


def prompt_canon_perm(s: State) -> Permutation:
    """Permutation renaming prompts to 0,1,... in first-occurrence order."""
    order: list[int] = []

    def visit_term(t):
        for p in _occurrence_order(t):
            if p not in order:
                order.append(p)

    for v in s.env:
        visit_term(v)
    if s.running is not None:
        visit_term(s.running)
    mapping = {p: i for i, p in enumerate(order)}
    return Permutation.of(_close_bijection(mapping))


def _occurrence_order(m):
    from .terms import App, AppL, AppR, ContVal, Delim, Grab, Lam, New, Reset, Throw, Var

    match m:
        case PromptVal(p):
            yield p
        case Lam(_, b) | New(_, b):
            yield from _occurrence_order(b)
        case App(f, a) | Throw(f, a) | Reset(f, a):
            yield from _occurrence_order(f)
            yield from _occurrence_order(a)
        case Grab(d, _, b):
            yield from _occurrence_order(d)
            yield from _occurrence_order(b)
        case ContVal(e):
            yield from _occurrence_order(e)
        case AppL(c, a):
            yield from _occurrence_order(c)
            yield from _occurrence_order(a)
        case AppR(f, c):
            yield from _occurrence_order(f)
            yield from _occurrence_order(c)
        case Delim(p, c):
            yield p
            yield from _occurrence_order(c)
        case _:
            return


def _close_bijection(partial: dict[int, int]) -> dict[int, int]:
    mapping = dict(partial)
    while True:
        srcs = set(mapping)
        tgts = set(mapping.values())
        missing = sorted(tgts - srcs)
        if not missing:
            return mapping
        free = sorted(srcs - tgts)
        for m, f in zip(missing, free):
            mapping[m] = f


_CANON_STATE_CACHE: dict = {}


def canonical_state(s: State) -> State:
    hit = _CANON_STATE_CACHE.get(id(s))
    if hit is not None and hit[0] is s:
        return hit[1]
    sigma = prompt_canon_perm(s)
    if sigma.pairs:
        env = tuple(canon(apply_perm(sigma, v)) for v in s.env)
        running = None if s.running is None else canon(apply_perm(sigma, s.running))
    else:
        env = tuple(canon(v) for v in s.env)
        running = None if s.running is None else canon(s.running)
    out = State(env, running)
    _CANON_STATE_CACHE[id(s)] = (s, out)
    return out


def state_key(s: State) -> tuple:
    c = canonical_state(s)
    return (c.env, c.running)


def fmt_state(s: State) -> str:
    env = " ".join(fmt(v) for v in s.env)
    if s.running is None:
        return f"(state (env {env}))"
    return f"(state (env {env}) (run {fmt(s.running)}))"
