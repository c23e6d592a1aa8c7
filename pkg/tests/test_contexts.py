import pytest

from delimeq import contexts as mc
from delimeq.contexts import (
    CApp,
    CReset,
    CStar,
    CVal,
    CvCont,
    CvHole,
    CvLam,
    CvVar,
    E_HOLE,
    EAppL,
    EAppR,
    EDelim,
    EStar,
    IndexOutOfRange,
    KindMismatch,
    ctx_size,
    enumerate_multi,
    eval_ctx_of,
    mhc_of_emhc,
    plug_multi,
    plug_multi_eval,
    shape_of_env,
)
from delimeq.terms import (
    AppL,
    AppR,
    ContVal,
    Delim,
    HOLE,
    App,
    Lam,
    PromptVal,
    Reset,
    Var,
    free_vars,
    plug,
    prompts_of,
    sur_prompts,
)

ID = Lam("z", Var("z"))
P = PromptVal(0)


def test_plug_multi_basics():
    assert plug_multi(CvHole(1), [ID]) == ID
    env = [P]
    assert plug_multi_eval(EDelim(1, E_HOLE), ID, env) == Reset(P, ID)
    # star hole: run the stored continuation around the filling
    env = [ContVal(AppL(HOLE, Var("w"))), ID]
    assert plug_multi(CStar(1, CVal(CvHole(2))), env) == App(ID, Var("w"))


def test_plug_multi_eval_shorthand():
    assert plug_multi_eval(E_HOLE, ID, []) == ID
    env = [ContVal(Delim(0, HOLE))]
    assert plug_multi_eval(EStar(1, E_HOLE), ID, env) == Reset(P, ID)


def test_plug_errors():
    with pytest.raises(IndexOutOfRange):
        plug_multi(CvHole(2), [ID])
    with pytest.raises(KindMismatch):
        eval_ctx_of(EDelim(1, E_HOLE), [ID])
    with pytest.raises(KindMismatch):
        plug_multi(CStar(1, CVal(CvHole(1))), [ID])


def test_promptlessness():
    env = [P, ContVal(Delim(3, HOLE)), Lam("q", Var("q"))]
    shape = shape_of_env(env)
    for c in enumerate_multi("c", "star", 3, shape):
        t = plug_multi(c, env)
        assert prompts_of(t) <= prompts_of_env(env)
    for e in enumerate_multi("edia", "star", 3, shape):
        ctx = eval_ctx_of(e, env)
        assert sur_prompts(ctx) <= prompts_of_env(env)


def prompts_of_env(env):
    out = frozenset()
    for v in env:
        out |= prompts_of(v)
    return out


def test_enumerated_contexts_are_closed():
    for kind in ("c", "cv", "edia"):
        for c in enumerate_multi(kind, "star", 3, ("prompt", "cont")):
            env = [P, ContVal(HOLE)]
            if kind == "edia":
                t = plug_multi_eval(c, ID, env)
            else:
                t = plug_multi(c, env)
            assert not free_vars(t)


def test_enumeration_no_alpha_duplicates():
    from delimeq.terms import canon

    for kind in ("c", "cv", "edia"):
        seen = set()
        for c in enumerate_multi(kind, "star", 3, ("prompt", "other")):
            key = repr(c)
            assert key not in seen
            seen.add(key)


def test_enumeration_deterministic_and_bounded():
    a = list(enumerate_multi("edia", "standard", 3, ("prompt",)))
    b = list(enumerate_multi("edia", "standard", 3, ("prompt",)))
    assert a == b
    assert all(ctx_size(e) <= 3 for e in a)
    assert list(enumerate_multi("edia", "standard", 1, ())) == [E_HOLE]


def test_contains_handwritten_contexts_exactly_once():
    target = EDelim(1, E_HOLE)
    found = [e for e in enumerate_multi("edia", "standard", 2, ("prompt",)) if e == target]
    assert len(found) == 1
    tgt2 = CvLam("a", CVal(CvHole(1)))
    found2 = [c for c in enumerate_multi("cv", "standard", 2, ("other",)) if c == tgt2]
    assert len(found2) == 1


# ---------------------------------------------------------------------------
# Independent counting oracle: a direct dynamic program over the grammar,
# written without reference to the enumerator.


def oracle_counts(generation, shape, max_n, pool=("a", "b")):
    n_holes = len(shape)
    n_prompt = sum(1 for k in shape if k == "prompt")
    n_cont = sum(1 for k in shape if k == "cont")
    star = generation == "star"

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def cv(n, scope):
        if n < 1:
            return 0
        if n == 1:
            return len(scope) + n_holes
        new = _binder(scope)
        return c(n - 1, frozenset(scope | {new})) + e(n - 1, scope)

    @lru_cache(maxsize=None)
    def c(n, scope):
        if n < 1:
            return 0
        total = cv(n, scope)
        if n >= 2:
            new = _binder(scope)
            total += sum(c(k, scope) * c(n - 1 - k, scope) for k in range(1, n - 1))
            total += c(n - 1, frozenset(scope | {new}))
            for k in range(1, n - 1):
                total += cv(k, scope) * c(n - 1 - k, scope)  # reset
                total += cv(k, scope) * c(n - 1 - k, frozenset(scope | {new}))  # grab
                total += cv(k, scope) * c(n - 1 - k, scope)  # throw
            if star:
                total += n_cont * c(n - 1, scope)
        return total

    @lru_cache(maxsize=None)
    def e(n, scope):
        if n < 1:
            return 0
        if n == 1:
            return 1
        total = 0
        for k in range(1, n - 1):
            total += e(k, scope) * c(n - 1 - k, scope)
            total += cv(k, scope) * e(n - 1 - k, scope)
        total += n_prompt * e(n - 1, scope)
        if star:
            total += n_cont * e(n - 1, scope)
        return total

    def _binder(scope):
        for nm in pool:
            if nm not in scope:
                return nm
        return pool[0]

    empty = frozenset()
    return (
        sum(c(n, empty) for n in range(1, max_n + 1)),
        sum(cv(n, empty) for n in range(1, max_n + 1)),
        sum(e(n, empty) for n in range(1, max_n + 1)),
    )


@pytest.mark.parametrize("generation", ["standard", "star"])
@pytest.mark.parametrize(
    "shape", [(), ("prompt",), ("other",), ("prompt", "cont"), ("cont", "other", "prompt")]
)
def test_enumeration_counts_match_oracle(generation, shape):
    for size in (1, 2, 3, 4):
        nc, ncv, ne = oracle_counts(generation, shape, size)
        assert len(list(enumerate_multi("c", generation, size, shape))) == nc
        assert len(list(enumerate_multi("cv", generation, size, shape))) == ncv
        assert len(list(enumerate_multi("edia", generation, size, shape))) == ne


def test_mhc_of_emhc():
    e = EAppL(EDelim(1, E_HOLE), CVal(CvHole(2)))
    filled = mhc_of_emhc(e, CVal(CvHole(2)))
    env = [P, ID]
    assert plug_multi(filled, env) == App(Reset(P, ID), ID)
