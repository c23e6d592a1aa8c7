"""Small-step semantics: unique decomposition, the five reduction rules with
the freshness side condition, fuel-bounded evaluation, and observables.

Fresh prompts are determinized: the generation rule picks the least id not
occurring in the whole term nor in the caller-supplied avoid set (the LTS
passes the environment's prompts there).
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    App,
    AppL,
    AppR,
    ContVal,
    Delim,
    EvalCtx,
    Grab,
    HOLE,
    Lam,
    New,
    OpenTermError,
    Prompt,
    PromptVal,
    Reset,
    Term,
    Throw,
    Var,
    free_vars,
    is_value,
    plug,
    prompts_of,
    subst,
)

# Error reasons (kept total: every closed normal form that is neither a value
# nor control-stuck falls in exactly one class)
APP_NON_LAMBDA = "AppNonLambda"
RESET_NON_PROMPT = "ResetNonPrompt"
GRAB_NON_PROMPT = "GrabNonPrompt"
THROW_NON_CONT = "ThrowNonCont"
FREE_VARIABLE = "FreeVariable"


@dataclass(frozen=True)
class NfValue:
    pass


@dataclass(frozen=True)
class NfStuck:
    prompt: Prompt
    ctx: EvalCtx  # the grab sits under this context; prompt not among its delimiters
    binder: str
    body: Term

    def term(self) -> Term:
        return plug(self.ctx, Grab(PromptVal(self.prompt), self.binder, self.body))


@dataclass(frozen=True)
class NfError:
    reason: str


@dataclass(frozen=True)
class Split:
    ctx: EvalCtx
    redex: Term
    rule: str  # beta | reset | capture | throw | new


Decomposition = Split | NfValue | NfStuck | NfError

VALUE = NfValue()


def decompose(t: Term) -> Decomposition:
    """Unique split t = E[redex], or the normal-form class."""
    if is_value(t):
        return VALUE
    match t:
        case Var(_):
            return NfError(FREE_VARIABLE)
        case App(f, a):
            if not is_value(f):
                return _under(decompose(f), lambda c: AppL(c, a))
            if not is_value(a):
                return _under(decompose(a), lambda c: AppR(f, c))
            match f:
                case Lam(_, _):
                    return Split(HOLE, t, "beta")
                case Var(_):
                    return NfError(FREE_VARIABLE)
                case _:
                    return NfError(APP_NON_LAMBDA)
        case New(_, _):
            return Split(HOLE, t, "new")
        case Reset(d, b):
            match d:
                case PromptVal(p):
                    if is_value(b):
                        return Split(HOLE, t, "reset")
                    inner = decompose(b)
                    match inner:
                        case Split(c, r, rule):
                            return Split(Delim(p, c), r, rule)
                        case NfStuck(q, c, x, e):
                            if q == p:
                                return Split(HOLE, t, "capture")
                            return NfStuck(q, Delim(p, c), x, e)
                        case NfError(_):
                            return inner
                case Var(_):
                    return NfError(FREE_VARIABLE)
                case _:
                    return NfError(RESET_NON_PROMPT)
        case Grab(d, x, b):
            match d:
                case PromptVal(p):
                    return NfStuck(p, HOLE, x, b)
                case Var(_):
                    return NfError(FREE_VARIABLE)
                case _:
                    return NfError(GRAB_NON_PROMPT)
        case Throw(k, _):
            match k:
                case ContVal(_):
                    return Split(HOLE, t, "throw")
                case Var(_):
                    return NfError(FREE_VARIABLE)
                case _:
                    return NfError(THROW_NON_CONT)
    raise TypeError(f"not a term: {t!r}")


def _under(inner: Decomposition, frame) -> Decomposition:
    match inner:
        case Split(c, r, rule):
            return Split(frame(c), r, rule)
        case NfStuck(q, c, x, e):
            return NfStuck(q, frame(c), x, e)
        case NfError(_):
            return inner
    raise AssertionError("value in redex search position")


def classify_normal(t: Term) -> NfValue | NfStuck | NfError | None:
    """Normal-form class of t, or None when t reduces."""
    d = decompose(t)
    return None if isinstance(d, Split) else d


def least_fresh_prompt(avoid: frozenset[Prompt]) -> Prompt:
    p = 0
    while p in avoid:
        p += 1
    return p


def contract(redex: Term, rule: str, fresh: Prompt | None = None) -> Term:
    match rule, redex:
        case "beta", App(Lam(x, b), v):
            return subst(b, x, v)
        case "reset", Reset(_, v):
            return v
        case "capture", Reset(PromptVal(p), b):
            d = decompose(b)
            assert isinstance(d, NfStuck) and d.prompt == p
            return subst(d.body, d.binder, ContVal(d.ctx))
        case "throw", Throw(ContVal(e), a):
            return plug(e, a)
        case "new", New(x, b):
            assert fresh is not None
            return subst(b, x, PromptVal(fresh))
    raise AssertionError(f"rule {rule} does not match {redex}")


@dataclass(frozen=True)
class Reduced:
    term: Term
    rule: str


def step(t: Term, avoid: frozenset[Prompt] = frozenset()) -> Reduced | NfValue | NfStuck | NfError:
    """One deterministic reduction step; fresh prompts dodge avoid as well."""
    d = decompose(t)
    if not isinstance(d, Split):
        return d
    fresh = None
    if d.rule == "new":
        fresh = least_fresh_prompt(prompts_of(t) | avoid)
    return Reduced(plug(d.ctx, contract(d.redex, d.rule, fresh)), d.rule)


def red_hat(t: Term, avoid: frozenset[Prompt] = frozenset()) -> Term:
    """One step if possible, the term itself otherwise."""
    r = step(t, avoid)
    return r.term if isinstance(r, Reduced) else t


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class OValue:
    term: Term
    steps: int


@dataclass(frozen=True)
class OStuck:
    nf: NfStuck
    term: Term
    steps: int


@dataclass(frozen=True)
class OError:
    reason: str
    term: Term
    steps: int


@dataclass(frozen=True)
class OFuel:
    steps: int
    term: Term


Outcome = OValue | OStuck | OError | OFuel


def eval_term(t: Term, fuel: int) -> Outcome:
    if free_vars(t):
        raise OpenTermError(f"evaluation requires a closed term; free: {sorted(free_vars(t))}")
    cur = t
    for n in range(fuel + 1):
        r = step(cur)
        match r:
            case Reduced(nxt, _):
                if n == fuel:
                    return OFuel(n, cur)
                cur = nxt
            case NfValue():
                return OValue(cur, n)
            case NfStuck(_, _, _, _):
                return OStuck(r, cur, n)
            case NfError(reason):
                return OError(reason, cur, n)
    return OFuel(fuel, cur)


def trace(t: Term, fuel: int) -> tuple[list[tuple[Term, str | None]], Outcome]:
    """Step-by-step trace: [(term, rule-that-produced-it)], first rule is None."""
    if free_vars(t):
        raise OpenTermError(f"evaluation requires a closed term; free: {sorted(free_vars(t))}")
    steps: list[tuple[Term, str | None]] = [(t, None)]
    cur = t
    for n in range(fuel):
        r = step(cur)
        if not isinstance(r, Reduced):
            break
        cur = r.term
        steps.append((cur, r.rule))
    return steps, eval_term(t, fuel)


# ---------------------------------------------------------------------------
# Observables


@dataclass(frozen=True)
class Obs:
    kind: str  # value | stuck | errordiv | unknown
    fuel: int | None = None

    def decided(self) -> bool:
        return self.kind != "unknown"


def observable(t: Term, fuel: int) -> Obs:
    match eval_term(t, fuel):
        case OValue(_, _):
            return Obs("value")
        case OStuck(_, _, _):
            return Obs("stuck")
        case OError(_, _, _):
            return Obs("errordiv")
        case OFuel(_, _):
            return Obs("unknown", fuel)
    raise AssertionError
