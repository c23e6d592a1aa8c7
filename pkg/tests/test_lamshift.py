from delimeq import stdlib
from delimeq.lamshift import (
    SApp,
    SAppL,
    SAppR,
    SDelim,
    SCvHole,
    SFReset,
    SFStar,
    SF_HOLE,
    SHole,
    SLam,
    SLCtxEnv,
    SLPure,
    SLSplitC,
    SLStuck,
    SLVal,
    SNfStuck,
    SOutcome,
    SReduced,
    SReset,
    SShift,
    SVar,
    S_HOLE,
    S_TAU,
    S_VAL,
    encode_to_lambdabla,
    is_pure,
    mk_sstate,
    s_alpha_eq,
    s_apply_label,
    s_decompose,
    s_enumerate_labels,
    s_enumerate_pure_ctxs,
    s_eval,
    s_observable,
    s_plug,
    s_step,
    s_weak_apply,
    split_at_reset,
)
from delimeq.reduction import Obs, eval_term, OStuck
from delimeq.terms import Lam, Var, alpha_eq

SID = SLam("z", SVar("z"))
SID2 = SLam("w", SVar("w"))


def s_omega():
    w = SLam("x", SApp(SVar("x"), SVar("x")))
    return SApp(w, w)


def test_capture_leaves_delimiter():
    # <(lam z z) (shift k (k v))>  -->  <(lam y <(lam z z) y>) v>
    t = SReset(SApp(SID, SShift("k", SApp(SVar("k"), SID2))))
    r = s_step(t, "relaxed")
    assert isinstance(r, SReduced) and r.rule == "capture"
    expected = SReset(
        SApp(SLam("y", SReset(SApp(SID, SVar("y")))), SID2)
    )
    assert s_alpha_eq(r.term, expected)
    assert isinstance(r.term, SReset)


def test_reset_value_and_stuck():
    assert s_step(SReset(SID), "relaxed") == SReduced(SID, "reset")
    d = s_decompose(SShift("k", SVar("k")))
    assert isinstance(d, SNfStuck) and d.ctx == S_HOLE


def test_capture_at_innermost_reset():
    t = SReset(SReset(SShift("k", SVar("k"))))
    r = s_step(t, "relaxed")
    # inner delimiter wins: the captured context is empty
    assert s_alpha_eq(
        r.term, SReset(SReset(SLam("y", SReset(SVar("y")))))
    )


def test_original_semantics_only_steps_under_outer_reset():
    t = SApp(SID, SID2)
    assert isinstance(s_step(t, "relaxed"), SReduced)
    assert s_step(t, "original") is None
    assert isinstance(s_step(SReset(t), "original"), SReduced)
    # stuck classification is still visible without a delimiter
    stuck = SShift("k", SVar("k"))
    assert isinstance(s_step(stuck, "original"), SNfStuck)


def test_eval_and_observables():
    assert s_eval(SReset(SID), 10, "relaxed").kind == "value"
    assert s_observable(SID, 10, "relaxed") == Obs("value")
    assert s_observable(SShift("k", SApp(SVar("k"), SID)), 10, "relaxed") == Obs("stuck")
    # original tester wraps in a delimiter first
    assert s_observable(SShift("k", SApp(SVar("k"), SID)), 20, "original") == Obs("value")
    assert s_observable(s_omega(), 100, "relaxed") == Obs("unknown", 100)
    assert s_observable(s_omega(), 100, "original") == Obs("unknown", 100)


def test_purity_and_split():
    pure = SAppL(S_HOLE, SID)
    assert is_pure(pure)
    impure = SDelim(SAppR(SID, S_HOLE))
    assert not is_pure(impure)
    f, e = split_at_reset(impure)
    assert f == S_HOLE and e == SAppR(SID, S_HOLE)
    # double reset: splitting peels only the innermost
    c = SDelim(SDelim(S_HOLE))
    f2, e2 = split_at_reset(c)
    assert f2 == SDelim(S_HOLE) and e2 == S_HOLE


def test_split_label_does_not_decompose_further():
    s = mk_sstate((SDelim(SDelim(S_HOLE)),), ())
    r = s_apply_label(s, SLSplitC(1), "original")
    assert r.ctxenv == (SDelim(SDelim(S_HOLE)), SDelim(SDelim(S_HOLE)), SDelim(S_HOLE))
    # pure contexts do not split but answer the purity probe
    sp = mk_sstate((SAppL(S_HOLE, SID),), ())
    assert s_apply_label(sp, SLSplitC(1), "original") is None
    assert s_apply_label(sp, SLPure(1), "original") == sp
    assert s_apply_label(s, SLPure(1), "original") is None


def test_ctxenv_test_and_normalization():
    s = mk_sstate((SDelim(S_HOLE),), ())
    r = s_apply_label(s, SLCtxEnv(1, SCvHole(1)), "relaxed")
    # no values yet: hole 1 out of range
    assert r is None
    s2 = mk_sstate((SDelim(S_HOLE),), (SID,))
    r2 = s_apply_label(s2, SLCtxEnv(1, SCvHole(1)), "relaxed")
    assert r2.running == SReset(SID)
    chain, decided = s_weak_apply(s2, SLCtxEnv(1, SCvHole(1)), 5, "relaxed")
    assert decided and mk_sstate((SDelim(S_HOLE),), (SID, SID)) in chain


def test_stuck_label_extra_rule_original_only():
    e0 = SApp(SID, SID2)
    s = mk_sstate((), (), e0)
    assert s_apply_label(s, SLStuck(SF_HOLE), "relaxed") is None
    r = s_apply_label(s, SLStuck(SFReset(SF_HOLE)), "original")
    assert r.running == SReset(e0)
    labels = s_enumerate_labels(s, 2, "original")
    assert any(isinstance(l, SLStuck) for l in labels)
    assert not any(isinstance(l, SLStuck) for l in s_enumerate_labels(s, 2, "relaxed"))


def test_stuck_label_common_rule():
    stuck = SShift("k", SApp(SVar("k"), SID))
    s = mk_sstate((), (), stuck)
    r = s_apply_label(s, SLStuck(SFReset(SF_HOLE)), "relaxed")
    # one step only: the capture itself
    assert s_alpha_eq(
        r.running, SReset(SApp(SLam("y", SReset(SVar("y"))), SID))
    )
    r2 = s_apply_label(s, SLStuck(SF_HOLE), "relaxed")
    assert r2.running == stuck


def test_star_holes_in_stuck_contexts():
    s = mk_sstate((SDelim(S_HOLE),), (), SShift("k", SVar("k")))
    r = s_apply_label(s, SLStuck(SFStar(1, SF_HOLE)), "relaxed")
    assert s_alpha_eq(r.running, SReset(SLam("y", SReset(SVar("y")))))


def test_pure_ctx_enumeration():
    ctxs = list(s_enumerate_pure_ctxs(3))
    assert S_HOLE in ctxs
    assert all(is_pure(c) for c in ctxs)
    assert len(set(map(repr, ctxs))) == len(ctxs)


def test_encode_reset_and_shift():
    from delimeq.terms import ContVal, Delim, HOLE, Throw, App as BApp

    enc = encode_to_lambdabla(SReset(SVar("x")), 0)
    assert enc == Throw(ContVal(Delim(0, HOLE)), Var("x"))
    enc2 = encode_to_lambdabla(SShift("k", SVar("k")), 0)
    assert enc2 == BApp(stdlib.shift_p(__import__("delimeq.terms", fromlist=["PromptVal"]).PromptVal(0)), Lam("k", Var("k")))


def test_encoding_evaluates_like_the_source():
    # <(lam z z) (shift k (k v))> reaches a value in both worlds
    t = SReset(SApp(SID, SShift("k", SApp(SVar("k"), SID2))))
    assert s_eval(t, 50, "relaxed").kind == "value"
    enc = encode_to_lambdabla(t, 0)
    from delimeq.reduction import OValue

    out = eval_term(enc, 200)
    assert isinstance(out, OValue)
