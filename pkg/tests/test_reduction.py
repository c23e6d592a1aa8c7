import pytest

from conftest import random_term
from delimeq import stdlib
from delimeq.reduction import (
    FREE_VARIABLE,
    APP_NON_LAMBDA,
    NfError,
    NfStuck,
    NfValue,
    OFuel,
    OStuck,
    OValue,
    Obs,
    Reduced,
    Split,
    decompose,
    eval_term,
    observable,
    red_hat,
    step,
    trace,
)
from delimeq.terms import (
    App,
    AppL,
    AppR,
    ContVal,
    Delim,
    Grab,
    HOLE,
    Lam,
    New,
    OpenTermError,
    Permutation,
    PromptVal,
    Reset,
    Throw,
    Var,
    alpha_eq,
    apply_perm,
    free_vars,
    plug,
    prompts_of,
)

ID = Lam("z", Var("z"))
P, Q = PromptVal(0), PromptVal(1)


def canon_prompts(t):
    """Rename prompts to 0,1,... in first-occurrence order."""
    order = []

    def walk(p):
        if p not in order:
            order.append(p)

    for p in sorted(prompts_of(t)):
        pass
    # deterministic traversal
    def visit(m):
        from delimeq.terms import (
            App, Lam, New, Reset, Grab, Throw, PromptVal, ContVal, Var,
            Hole, AppL, AppR, Delim,
        )
        match m:
            case PromptVal(p):
                walk(p)
            case Lam(_, b) | New(_, b):
                visit(b)
            case App(f, a) | Throw(f, a) | Reset(f, a):
                visit(f); visit(a)
            case Grab(d, _, b):
                visit(d); visit(b)
            case ContVal(e):
                visit(e)
            case AppL(c, a):
                visit(c); visit(a)
            case AppR(f, c):
                visit(f); visit(c)
            case Delim(p, c):
                walk(p); visit(c)
            case _:
                pass

    visit(t)
    mapping = {}
    fresh = 0
    used = set(order)
    for p in order:
        mapping[p] = fresh
        fresh += 1
    # complete to a permutation on the union of support
    image = set(mapping.values())
    for p in list(mapping):
        pass
    leftover_src = [p for p in used if p not in mapping]
    assert not leftover_src
    # targets already used as sources need to map somewhere: build a bijection
    targets = set(mapping.values())
    extra = {}
    nxt = max(targets | used, default=-1) + 1
    for tgt in targets:
        if tgt not in mapping and tgt in used:
            pass
    full = dict(mapping)
    for src in targets - set(mapping):
        full[src] = nxt
        nxt += 1
    sigma = Permutation.of(_close_bijection(full))
    return apply_perm(sigma, t)


def _close_bijection(partial):
    """Extend an injective partial map on ints to a finite permutation."""
    mapping = dict(partial)
    while True:
        srcs = set(mapping)
        tgts = set(mapping.values())
        missing = tgts - srcs
        if not missing:
            return mapping
        free_tgts = sorted(srcs - tgts)
        for m, f in zip(sorted(missing), free_tgts):
            mapping[m] = f
    return mapping


def test_decompose_basics():
    t = App(ID, P)
    d = decompose(t)
    assert d == Split(HOLE, t, "beta")
    t2 = Reset(P, Grab(P, "x", Var("x")))
    assert decompose(t2) == Split(HOLE, t2, "capture")
    d3 = decompose(Grab(P, "x", Var("x")))
    assert d3 == NfStuck(0, HOLE, "x", Var("x"))


def test_decompose_plug_roundtrip(rng):
    hits = 0
    for _ in range(1000):
        t = random_term(rng, rng.randint(1, 10))
        if free_vars(t):
            continue
        d = decompose(t)
        if isinstance(d, Split):
            hits += 1
            assert plug(d.ctx, d.redex) == t
        elif isinstance(d, NfStuck):
            assert plug(d.ctx, Grab(PromptVal(d.prompt), d.binder, d.body)) == t
            assert d.prompt not in {p for p in _spine_prompts(d.ctx)}
    assert hits > 100


def _spine_prompts(ctx):
    from delimeq.terms import sur_prompts

    return sur_prompts(ctx)


def test_step_rules():
    # beta
    r = step(App(Lam("x", App(Var("x"), Var("x"))), ID))
    assert r == Reduced(App(ID, ID), "beta")
    # reset on a value
    assert step(Reset(P, ID)) == Reduced(ID, "reset")
    # throw plugs without evaluating the argument
    arg = App(ID, ID)
    r = step(Throw(ContVal(AppL(HOLE, Var("w"))), arg))
    assert r == Reduced(App(arg, Var("w")), "throw")
    # generation picks the least unused id
    r = step(New("x", Reset(Var("x"), P)))
    assert r == Reduced(Reset(Q, P), "new")
    r2 = step(New("x", Var("x")), avoid=frozenset({0, 1}))
    assert r2 == Reduced(PromptVal(2), "new")


def test_capture_innermost_delimiter():
    inner = Reset(P, Grab(P, "k", Var("k")))
    t = Reset(P, App(ID, inner))
    r = step(t)
    assert r.rule == "capture"
    # the inner delimiter wins: k is the empty context
    assert r.term == Reset(P, App(ID, ContVal(HOLE)))


def test_step_determinism(rng):
    for _ in range(1000):
        t = random_term(rng, rng.randint(1, 9))
        if free_vars(t):
            continue
        assert step(t) == step(t)


def test_step_commutes_with_permutation(rng):
    sigma = Permutation.of({0: 1, 1: 2, 2: 0})
    checked = 0
    for _ in range(1200):
        t = random_term(rng, rng.randint(1, 9))
        if free_vars(t):
            continue
        r1 = step(t)
        r2 = step(apply_perm(sigma, t))
        assert isinstance(r1, Reduced) == isinstance(r2, Reduced)
        if isinstance(r1, Reduced):
            checked += 1
            assert alpha_eq(canon_prompts(apply_perm(sigma, r1.term)), canon_prompts(r2.term))
    assert checked > 200


def test_generated_prompt_avoids(rng):
    for _ in range(300):
        t = random_term(rng, rng.randint(1, 8))
        if free_vars(t):
            continue
        avoid = frozenset({0, 1, 2, 5})
        r = step(t, avoid)
        if isinstance(r, Reduced):
            assert not (prompts_of(r.term) - prompts_of(t)) & avoid


def test_classification_total_and_exclusive(rng):
    for _ in range(500):
        t = random_term(rng, rng.randint(1, 8))
        if free_vars(t):
            continue
        d = decompose(t)
        kinds = [isinstance(d, Split), isinstance(d, NfValue), isinstance(d, NfStuck), isinstance(d, NfError)]
        assert sum(kinds) == 1


# ---------------------------------------------------------------------------
# The four-step generation/capture/throw example


def example_trace_terms(inner_grab_on_x: bool):
    u, v, w = Lam("a", Var("a")), Lam("b", Var("b")), Lam("c", Var("c"))
    e = Lam("d", Var("d"))
    inner = Grab(Var("x") if inner_grab_on_x else P, "_", e)
    start = New(
        "x",
        Reset(
            Var("x"),
            App(u, Reset(P, App(v, Grab(Var("x"), "k", App(w, Throw(Var("k"), inner)))))),
        ),
    )
    return u, v, w, e, start


def test_golden_generation_trace():
    u, v, w, e, start = example_trace_terms(inner_grab_on_x=False)
    steps, out = trace(start, 20)
    terms = [t for t, _ in steps]
    rules = [r for _, r in steps[1:]]
    assert rules[:4] == ["new", "capture", "throw", "capture"]
    q = PromptVal(1)  # canonical fresh id: 0 is taken
    expect = [
        start,
        Reset(q, App(u, Reset(P, App(v, Grab(q, "k", App(w, Throw(Var("k"), Grab(P, "_", e)))))))),
        App(w, Throw(ContVal(AppR(u, Delim(0, AppR(v, HOLE)))), Grab(P, "_", e))),
        App(w, App(u, Reset(P, App(v, Grab(P, "_", e))))),
        App(w, App(u, e)),
    ]
    assert len(terms) >= 5
    for got, want in zip(terms[:5], expect):
        assert alpha_eq(got, want)
    assert isinstance(out, OValue)


def test_golden_trace_modified_variant_gets_stuck():
    u, v, w, e, start = example_trace_terms(inner_grab_on_x=True)
    steps, out = trace(start, 20)
    rules = [r for _, r in steps[1:]]
    assert rules == ["new", "capture", "throw"]
    assert isinstance(out, OStuck)
    q = PromptVal(1)
    stuck_term = App(w, App(u, Reset(P, App(v, Grab(q, "_", e)))))
    assert alpha_eq(out.term, stuck_term)


# ---------------------------------------------------------------------------
# Evaluation and observables


def test_eval_open_term_rejected():
    with pytest.raises(OpenTermError):
        eval_term(Var("x"), 10)


def test_peq_same_prompt_is_true():
    out = eval_term(stdlib.peq(P, P), 100)
    assert isinstance(out, OValue)
    assert alpha_eq(out.term, stdlib.expand("true"))


def test_peq_diff_prompt_is_false():
    out = eval_term(stdlib.peq(P, Q), 100)
    assert isinstance(out, OValue)
    assert alpha_eq(out.term, stdlib.expand("false"))


def test_omega_exhausts_fuel():
    out = eval_term(stdlib.expand("omega"), 500)
    assert out == OFuel(500, stdlib.expand("omega"))


def test_observables():
    assert observable(Grab(P, "x", Var("x")), 10) == Obs("stuck")
    assert observable(App(P, ID), 10) == Obs("errordiv")
    assert observable(stdlib.expand("omega"), 1000) == Obs("unknown", 1000)
    assert observable(ID, 10) == Obs("value")


def test_red_hat():
    assert red_hat(ID) == ID
    assert red_hat(App(Lam("x", Var("x")), ID)) == ID
    stuck = Grab(P, "x", Var("x"))
    assert red_hat(stuck) == stuck


def test_error_reasons():
    assert decompose(App(P, ID)) == NfError(APP_NON_LAMBDA)
    assert decompose(App(Var("x"), ID)) == NfError(FREE_VARIABLE)
