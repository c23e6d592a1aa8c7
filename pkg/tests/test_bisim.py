import pathlib

import pytest

from delimeq import contexts as mc
from delimeq.antiunify import anti_unify_runs, replay_runs
from delimeq.bisim import (
    BlaCalc,
    Bounds,
    Counterexample,
    Distinguished,
    Matcher,
    UnknownWithinBounds,
    UpToSpec,
    ValidWithinBounds,
    check_candidate,
    conclusion_justified,
    distinguish,
    expand_candidate,
    replay_distinguisher,
)
from delimeq.lts import mk_state
from delimeq.parser import fmt, parse_term
from delimeq.relfile import parse_candidate
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
    Throw,
    Var,
    alpha_eq,
)

DEMO = pathlib.Path(__file__).resolve().parent.parent / "demo"

ID = Lam("z", Var("z"))
P, Q = PromptVal(0), PromptVal(1)


def candidate_of(text: str):
    return parse_candidate(text)


# ---------------------------------------------------------------------------
# Anti-unification


def test_anti_unify_identical_states():
    env = (P, ID)
    run = App(ID, ID)
    au = anti_unify_runs(run, run, env, env, "standard")
    assert not au.value_residuals and au.run_residual is None
    rs, rt = replay_runs(au, env, env)
    assert alpha_eq(rs, run) and alpha_eq(rt, run)


def test_anti_unify_strips_common_context():
    env_s = (P, Lam("a", Var("a")))
    env_t = (P, Lam("b", App(Var("b"), Var("b"))))
    core_s, core_t = Grab(P, "x", Var("x")), Grab(P, "y", App(Var("y"), Var("y")))
    wrap = lambda core, env: App(env[1], Reset(PromptVal(0), core))
    au = anti_unify_runs(wrap(core_s, env_s), wrap(core_t, env_t), env_s, env_t, "standard")
    assert au.run_residual is not None
    rs, rt = au.run_residual
    assert alpha_eq(rs, core_s) and alpha_eq(rt, core_t)
    got_s, got_t = replay_runs(au, env_s, env_t)
    assert alpha_eq(got_s, wrap(core_s, env_s)) and alpha_eq(got_t, wrap(core_t, env_t))


def test_anti_unify_value_residuals():
    env = ()
    vs, vt = Lam("a", Var("a")), Lam("b", App(Var("b"), Var("b")))
    run_s, run_t = App(vs, vs), App(vt, vt)
    au = anti_unify_runs(run_s, run_t, env, env, "standard")
    assert au.run_residual is None
    assert len(au.value_residuals) == 1
    got_s, got_t = replay_runs(au, env, env)
    assert alpha_eq(got_s, run_s) and alpha_eq(got_t, run_t)


def test_anti_unify_star_embedding():
    # the two runnings embed the continuations stored at index 1
    es, et = AppR(ID, HOLE), Delim(0, HOLE)
    env_s, env_t = (ContVal(es),), (ContVal(et),)
    run_s = App(ID, App(ID, ID))
    run_t = Reset(PromptVal(0), App(ID, ID))
    au = anti_unify_runs(run_s, run_t, env_s, env_t, "star")
    got_s, got_t = replay_runs(au, env_s, env_t)
    assert alpha_eq(got_s, run_s) and alpha_eq(got_t, run_t)
    assert fmt(au.ctx_skeleton if au.ctx_skeleton else au.run_skeleton).startswith("(star 1")


def test_anti_unify_replay_random(rng):
    # build random queries by plugging random skeletons over random envs
    from delimeq.contexts import enumerate_multi, plug_multi, shape_of_env

    env_s = (P, Lam("a", Var("a")))
    env_t = (P, Lam("b", Var("b")))
    shape = shape_of_env(env_s)
    ctxs = list(enumerate_multi("c", "standard", 4, shape))
    checked = 0
    for i in range(0, len(ctxs), 7):
        c = ctxs[i]
        run_s, run_t = plug_multi(c, env_s), plug_multi(c, env_t)
        au = anti_unify_runs(run_s, run_t, env_s, env_t, "standard")
        got_s, got_t = replay_runs(au, env_s, env_t)
        assert alpha_eq(got_s, run_s) and alpha_eq(got_t, run_t)
        checked += 1
    assert checked > 30


# ---------------------------------------------------------------------------
# Expansion


def test_expand_seed_only():
    cand = candidate_of(
        """
        (candidate (calculus lambdabla) (variant standard) (promptcheck off)
          (seed (state (env (lam x x))) (state (env (lam x x)))))
        """
    )
    ex = expand_candidate(cand, Bounds(ctx_size=1, rule_depth=1))
    assert len(ex.entries) == 1


def test_expand_promptcheck():
    cand = candidate_of(
        """
        (candidate (calculus lambdabla) (variant standard) (promptcheck on)
          (seed (state (env (prompt 0))) (state (env (prompt 1)))))
        """
    )
    ex = expand_candidate(cand, Bounds(ctx_size=1, rule_depth=1))
    # seed + two rounds of prompt extension (depth 1 and the lookahead round)
    assert any(e.origin == "promptcheck" and e.depth == 1 for e in ex.entries)
    # entries are stored canonically: both sides start from (prompt 0), so the
    # canonical next prompt is 1 on each side
    pc1 = [e for e in ex.entries if e.depth == 1][0]
    assert pc1.left.env[1] == PromptVal(1)
    assert pc1.right.env[1] == PromptVal(1)


def test_expand_rule_count_matches_bruteforce_oracle():
    cand = parse_candidate((DEMO / "folklore.rel").read_text())
    bounds = Bounds(ctx_size=2, rule_depth=2)
    ex = expand_candidate(cand, bounds)

    # independent straight-line expansion of the same construction
    from delimeq.contexts import enumerate_multi, shape_of_env
    from delimeq.lts import state_key
    from delimeq.reduction import least_fresh_prompt
    from delimeq.relfile import SkipInstance, instantiate_side
    from delimeq.terms import prompts_of

    def instances(rule, sl, sr):
        shape = tuple(
            k if k == j else "other"
            for k, j in zip(shape_of_env(sl.env), shape_of_env(sr.env))
        )
        kinds = {p.name: p.kind for p in rule.params}
        (param,) = rule.params  # both folklore rules carry one parameter
        for ctx in enumerate_multi(param.kind, "standard", param.size, shape):
            try:
                l = instantiate_side(rule.left, sl, {param.name: ctx}, kinds, {}, "lambdabla")
                r = instantiate_side(rule.right, sr, {param.name: ctx}, kinds, {}, "lambdabla")
            except SkipInstance:
                continue
            yield l, r

    store = []
    seen = set()

    def add(l, r, d):
        k = (state_key(l), state_key(r))
        if k not in seen:
            seen.add(k)
            store.append((l, r, d))

    for l, r in cand.seeds:
        add(l, r, 0)
    env_prompts = lambda s: frozenset().union(frozenset(), *(prompts_of(v) for v in s.env))
    for depth in range(1, bounds.rule_depth + 2):
        for l, r, d in list(store):
            if d >= depth or l.running is not None or r.running is not None:
                continue
            for rule in cand.rules:
                for nl, nr in instances(rule, l, r):
                    add(nl, nr, depth)
            pl, pr = least_fresh_prompt(env_prompts(l)), least_fresh_prompt(env_prompts(r))
            add(mk_state(l.env + (PromptVal(pl),)), mk_state(r.env + (PromptVal(pr),)), depth)
    assert len(ex.entries) == len(store)


# ---------------------------------------------------------------------------
# Matching and checking


def test_check_identity_candidate():
    cand = candidate_of(
        """
        (candidate (calculus lambdabla) (variant standard) (promptcheck on)
          (seed (state (env (lam x x))) (state (env (lam x x)))))
        """
    )
    v = check_candidate(cand, Bounds(ctx_size=2, rule_depth=1))
    assert isinstance(v, ValidWithinBounds)


def test_check_env_size_mismatch_is_refuted():
    cand = candidate_of(
        """
        (candidate (calculus lambdabla) (variant standard) (promptcheck off)
          (seed (state (env (prompt 0))) (state (env (prompt 1) (prompt 1)))))
        """
    )
    v = check_candidate(cand, Bounds(ctx_size=1, rule_depth=1))
    assert isinstance(v, Counterexample)
    v2 = check_candidate(cand, Bounds(ctx_size=2, rule_depth=2, tau_fuel=80))
    assert isinstance(v2, Counterexample)  # failures persist at larger bounds


def test_check_value_vs_divergence_refuted():
    cand = candidate_of(
        """
        (candidate (calculus lambdabla) (variant standard) (promptcheck off)
          (seed (state (env) (run ((lam x x) (lam x x)))) (state (env) (run omega))))
        """
    )
    v = check_candidate(cand, Bounds(ctx_size=1, rule_depth=1, tau_fuel=30))
    assert not v.ok()


def test_distinguish_capture_vs_empty_continuation():
    # env (p, <reset_p hole>) vs (q, <hole>)
    sl = mk_state((P, ContVal(Delim(0, HOLE))))
    sr = mk_state((Q, ContVal(HOLE)))
    calc = BlaCalc("star")
    verdict = distinguish(sl, sr, Bounds(ctx_size=2, depth=4, tau_fuel=20), calc)
    assert isinstance(verdict, Distinguished)
    assert replay_distinguisher(verdict.strategy, sl, sr, Bounds(ctx_size=2, depth=4, tau_fuel=20), calc)


def test_distinguish_unknown_for_self_pair():
    omega = stdlib.expand("omega")
    s = mk_state((), omega)
    calc = BlaCalc("star")
    assert isinstance(distinguish(s, s, Bounds(ctx_size=1, depth=2, tau_fuel=10), calc), UnknownWithinBounds)


def test_distinguish_private_stuck_vs_divergence_unknown():
    stuck = mk_state((), Grab(P, "x", Var("x")))
    omega = mk_state((), stdlib.expand("omega"))
    calc = BlaCalc("standard")
    v = distinguish(stuck, omega, Bounds(ctx_size=2, depth=3, tau_fuel=15), calc)
    assert isinstance(v, UnknownWithinBounds)
