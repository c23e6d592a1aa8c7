from delimeq import contexts as mc
from delimeq.lts import (
    LCtx,
    LCtxStar,
    LLam,
    LNu,
    LPeq,
    LSplit,
    LStuck,
    LTau,
    LVal,
    NU,
    TAU,
    VAL,
    apply_label,
    canonical_state,
    enumerate_labels,
    fmt_label,
    is_passive,
    mk_state,
    split_ctx_at_prompt,
    state_key,
    weak_apply,
)
from delimeq import stdlib
from delimeq.terms import (
    App,
    AppL,
    AppR,
    ContVal,
    Delim,
    Grab,
    HOLE,
    Lam,
    PromptVal,
    Reset,
    Var,
    plug,
)

ID = Lam("z", Var("z"))
P, Q = PromptVal(0), PromptVal(1)


def test_normalization():
    s = mk_state((P,), ID)
    assert s.running is None
    assert s.env == (P, ID)
    s2 = mk_state((), App(ID, ID))
    assert s2.running == App(ID, ID)


def test_peq():
    s = mk_state((P, P))
    assert apply_label(s, LPeq(1, 2), "standard") == s
    assert apply_label(s, LPeq(1, 1), "standard") == s
    t = mk_state((P, Q))
    assert apply_label(t, LPeq(1, 2), "standard") is None
    assert apply_label(mk_state((ID, ID)), LPeq(1, 2), "standard") is None


def test_nu_prompt_canonical():
    s = mk_state((P,))
    r = apply_label(s, NU, "standard")
    assert r.env == (P, Q)


def test_lam_test():
    s = mk_state((Lam("x", App(Var("x"), Var("x"))),))
    r = apply_label(s, LLam(1, mc.CvHole(1)), "standard")
    v = s.env[0]
    assert r == mk_state(s.env, App(v, v))


def test_ctx_star_example():
    # env (p, <reset_p hole>) vs (q, <hole>): the star test runs the body
    gamma = mk_state((P, ContVal(Delim(0, HOLE))))
    r = apply_label(gamma, LCtxStar(2, mc.CvHole(1)), "star")
    assert r.running == Reset(P, P)
    r2 = apply_label(r, TAU, "star")
    assert r2.running is None and r2.env == (P, ContVal(Delim(0, HOLE)), P)
    delta = mk_state((Q, ContVal(HOLE)))
    r3 = apply_label(delta, LCtxStar(2, mc.CvHole(1)), "star")
    assert r3.running is None and r3.env == (Q, ContVal(HOLE), Q)


def test_ctx_std_takes_general_context():
    gamma = mk_state((ContVal(AppL(HOLE, ID)),))
    arg = mc.CApp(mc.CVal(mc.CvHole(1)), mc.CVal(mc.CvHole(1)))
    r = apply_label(gamma, LCtx(1, arg), "standard")
    inst = App(gamma.env[0], gamma.env[0])
    assert r.running == App(inst, ID)
    assert apply_label(gamma, LCtx(1, arg), "star") is None


def test_split():
    gamma = mk_state((P, ContVal(Delim(0, HOLE))))
    r = apply_label(gamma, LSplit(2, 1), "star")
    assert r.env == gamma.env + (ContVal(HOLE), ContVal(HOLE))
    delta = mk_state((Q, ContVal(HOLE)))
    assert apply_label(delta, LSplit(2, 1), "star") is None


def test_split_unique_against_bruteforce():
    # E with two delimiters on the same prompt: the inner one wins
    e = Delim(0, AppR(ID, Delim(0, HOLE)))
    got = split_ctx_at_prompt(e, 0)
    assert got is not None
    outer, inner = got
    # brute force over all spine splits
    from delimeq.terms import compose_ctx, sur_prompts

    def spine_splits(c, path=()):
        yield from _splits(c, lambda inner: inner)

    def _splits(c, rebuild):
        from delimeq.terms import AppL, AppR, Delim, Hole

        match c:
            case Delim(p, inner):
                yield rebuild, p, inner
                yield from _splits(inner, lambda x, r=rebuild, p=p: r(Delim(p, x)))
            case AppL(inner, a):
                yield from _splits(inner, lambda x, r=rebuild, a=a: r(AppL(x, a)))
            case AppR(f, inner):
                yield from _splits(inner, lambda x, r=rebuild, f=f: r(AppR(f, x)))
            case Hole():
                return

    valid = []
    for rebuild, p, inner in _splits(e, lambda x: x):
        if p == 0 and 0 not in sur_prompts(inner):
            valid.append((rebuild(HOLE), inner))
    assert len(valid) == 1
    assert valid[0] == (outer, inner)


def test_stuck_test_plugs_and_steps_once():
    stuck = Grab(P, "x", Var("x"))
    s = mk_state((P,), stuck)
    # a context that does not provide the delimiter: term stays stuck
    r = apply_label(s, LStuck(mc.E_HOLE), "star")
    assert r.running == stuck
    # a context providing the delimiter: exactly the capture step runs
    r2 = apply_label(s, LStuck(mc.EDelim(1, mc.E_HOLE)), "star")
    assert r2.env == (P, ContVal(HOLE)) and r2.running is None
    # not applicable on non-stuck running terms
    s2 = mk_state((), App(ID, ID))
    assert apply_label(s2, LStuck(mc.E_HOLE), "star") is None


def test_enumerate_labels_env_only():
    s = mk_state((Lam("x", Var("x")),))
    labels = enumerate_labels(s, 1, "standard")
    assert VAL in labels and NU in labels
    assert LLam(1, mc.CvHole(1)) in labels
    s2 = mk_state((P,))
    labels2 = enumerate_labels(s2, 1, "standard")
    assert LPeq(1, 1) in labels2 and NU in labels2


def test_enumerate_labels_running():
    stuck = Grab(P, "x", Var("x"))
    s = mk_state((), stuck)
    labels = enumerate_labels(s, 1, "standard")
    assert labels == [LStuck(mc.E_HOLE)]
    s2 = mk_state((), App(ID, ID))
    assert enumerate_labels(s2, 2, "standard") == [TAU]


def test_passivity():
    assert is_passive(LCtxStar(1, mc.CvHole(1)), "star")
    assert is_passive(VAL, "star")
    assert not is_passive(TAU, "star")
    assert not is_passive(LSplit(1, 2), "star")
    assert not is_passive(VAL, "standard")


def test_weak_apply_includes_zero_steps():
    s = mk_state((), App(ID, ID))
    r = weak_apply(s, TAU, 5, "standard")
    assert s in r.states and r.decided
    # weak val reaches the normalized state
    r2 = weak_apply(s, VAL, 5, "standard")
    assert r2.states == (mk_state((ID,)),)
    # fuel bound respected: three beta steps needed
    far = App(Lam("x", App(ID, Var("x"))), App(ID, ID))
    r3 = weak_apply(mk_state((), far), VAL, 2, "standard")
    assert r3.states == () and not r3.decided


def test_weak_apply_divergent_is_undecided():
    omega = stdlib.expand("omega")
    r = weak_apply(mk_state((), omega), VAL, 50, "standard")
    assert r.states == () and not r.decided


def test_canonical_state_prompt_renaming():
    a = mk_state((PromptVal(7), PromptVal(7), PromptVal(3)))
    b = mk_state((PromptVal(1), PromptVal(1), PromptVal(4)))
    assert state_key(a) == state_key(b)
    c = mk_state((PromptVal(7), PromptVal(3), PromptVal(3)))
    assert state_key(a) != state_key(c)


def test_label_formatting():
    assert fmt_label(TAU) == "tau"
    assert fmt_label(LLam(1, mc.CvHole(2))) == "lam 1 #2"
    assert fmt_label(LCtxStar(2, mc.CvHole(1))) == "ctx* 2 #1"
    assert fmt_label(LStuck(mc.EDelim(1, mc.E_HOLE))) == "stuck (reset #1 _)"
    assert fmt_label(LSplit(2, 1)) == "split 2 1"
