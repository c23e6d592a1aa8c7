"""Bounded environmental-bisimulation checking: candidate expansion, the
up-to-technique matcher built on anti-unification, the two-sided game over all
expanded pairs, and a bounded distinguisher search.

Everything is compared on canonical forms (binders renumbered, prompts renamed
per side in first-occurrence order), which realizes the permutation technique.
The matcher is deliberately incomplete: a failed justification means "could
not justify within bounds", never disproof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import contexts as mc
from . import lamshift as ls
from . import lts
from .antiunify import (
    AU,
    Bail,
    BlaAntiUnifier,
    SAntiUnifier,
    anti_unify_runs,
    replay_runs,
    s_anti_unify_runs,
    s_replay_runs,
)
from .lts import State, mk_state
from .parser import fmt
from .relfile import Candidate, IllFormedRule, Rule, SkipInstance, instantiate_side
from .reduction import least_fresh_prompt
from .terms import PromptVal, Term, alpha_eq, is_value, prompts_of


@dataclass(frozen=True)
class Bounds:
    ctx_size: int = 3
    rule_depth: int = 2
    tau_fuel: int = 50
    composition_depth: int = 5
    depth: int = 4  # distinguisher moves


@dataclass(frozen=True)
class UpToSpec:
    techniques: frozenset[str]
    strong: frozenset[str]

    @staticmethod
    def default(calculus: str, variant: str) -> "UpToSpec":
        if calculus == "lamshift":
            return UpToSpec(frozenset({"weak", "utrctxv", "utrctx"}), frozenset({"weak", "perm"}))
        if variant == "star":
            return UpToSpec(
                frozenset({"perm", "weak", "utrctxv", "utrctx"}), frozenset({"perm", "weak"})
            )
        return UpToSpec(
            frozenset({"perm", "weak", "str", "utctxv", "utctx"}), frozenset()
        )


# ---------------------------------------------------------------------------
# Calculus adapters


class BlaCalc:
    name = "lambdabla"

    def __init__(self, variant: str):
        self.variant = variant
        self.generation = "star" if variant == "star" else "standard"

    def labels(self, s, n):
        return lts.enumerate_labels(s, n, self.variant)

    def apply(self, s, lab):
        return lts.apply_label(s, lab, self.variant)

    def weak(self, s, lab, fuel):
        r = lts.weak_apply(s, lab, fuel, self.variant)
        return list(r.states), r.decided

    def chain(self, s, fuel):
        return lts.tau_chain(s, fuel)

    def passive(self, lab):
        return lts.is_passive(lab, self.variant)

    def canonical(self, s):
        return lts.canonical_state(s)

    def key(self, s):
        return lts.state_key(s)

    def env_only(self, s):
        return s.running is None

    def fmt_label(self, lab):
        return lts.fmt_label(lab)

    def fmt_state(self, s):
        return lts.fmt_state(s)


class ShiftCalc:
    name = "lamshift"

    def __init__(self, semantics: str):
        self.semantics = semantics

    def labels(self, s, n):
        return ls.s_enumerate_labels(s, n, self.semantics)

    def apply(self, s, lab):
        return ls.s_apply_label(s, lab, self.semantics)

    def weak(self, s, lab, fuel):
        return ls.s_weak_apply(s, lab, fuel, self.semantics)

    def chain(self, s, fuel):
        return ls.s_tau_chain(s, fuel, self.semantics)

    def passive(self, lab):
        return ls.s_is_passive(lab)

    def canonical(self, s):
        return ls.s_canonical_state(s)

    def key(self, s):
        return ls.s_state_key(s)

    def env_only(self, s):
        return s.running is None

    def fmt_label(self, lab):
        return _fmt_slabel(lab)

    def fmt_state(self, s):
        ctxs = " ".join(fmt(c) for c in s.ctxenv)
        vals = " ".join(fmt(v) for v in s.env)
        run = "" if s.running is None else f" (run {fmt(s.running)})"
        return f"(state (ctxenv {ctxs}) (env {vals}){run})"


def _fmt_slabel(lab) -> str:
    match lab:
        case ls.SLTau():
            return "tau"
        case ls.SLLam(j, a):
            return f"lam {j} {_fmt_smc(a)}"
        case ls.SLVal():
            return "val"
        case ls.SLStuck(fd):
            return f"stuck {_fmt_smc(fd)}"
        case ls.SLCtxEnv(i, a):
            return f"ctxenv {i} {_fmt_smc(a)}"
        case ls.SLPure(i):
            return f"pure {i}"
        case ls.SLSplitC(i):
            return f"splitc {i}"
    raise TypeError(f"not a label: {lab!r}")


def _fmt_smc(c) -> str:
    match c:
        case ls.SCvVar(n):
            return n
        case ls.SCvLam(n, b):
            return f"(lam {n} {_fmt_smc(b)})"
        case ls.SCvHole(i):
            return f"#{i}"
        case ls.SMcVal(v):
            return _fmt_smc(v)
        case ls.SMcApp(f, a):
            return f"({_fmt_smc(f)} {_fmt_smc(a)})"
        case ls.SMcReset(b):
            return f"(reset {_fmt_smc(b)})"
        case ls.SMcShift(x, b):
            return f"(shift {x} {_fmt_smc(b)})"
        case ls.SMcStar(i, b):
            return f"(star {i} {_fmt_smc(b)})"
        case ls.SFHole():
            return "_"
        case ls.SFAppL(c2, a):
            return f"({_fmt_smc(c2)} {_fmt_smc(a)})"
        case ls.SFAppR(f, c2):
            return f"({_fmt_smc(f)} {_fmt_smc(c2)})"
        case ls.SFReset(c2):
            return f"(reset {_fmt_smc(c2)})"
        case ls.SFStar(i, c2):
            return f"(star {i} {_fmt_smc(c2)})"
    raise TypeError(f"not a context: {c!r}")


def make_calc(cand: Candidate):
    if cand.calculus == "lamshift":
        return ShiftCalc(cand.semantics)
    return BlaCalc(cand.variant)


# ---------------------------------------------------------------------------
# Candidate expansion


@dataclass(frozen=True)
class MemberEntry:
    left: object  # canonical state
    right: object
    depth: int
    origin: str


@dataclass
class Expanded:
    candidate: Candidate
    entries: list[MemberEntry]
    exact: dict
    rule_depth: int

    def obligation_pairs(self):
        return [e for e in self.entries if e.depth <= self.rule_depth]


def expand_candidate(cand: Candidate, bounds: Bounds) -> Expanded:
    """Least fixpoint of rule application, truncated one round past the
    obligation depth so that justifications can look one unfolding ahead."""
    calc = make_calc(cand)
    entries: list[MemberEntry] = []
    exact: dict = {}

    def add(sl, sr, depth, origin):
        cl, cr = calc.canonical(sl), calc.canonical(sr)
        key = (calc.key(sl), calc.key(sr))
        if key in exact:
            return False
        e = MemberEntry(cl, cr, depth, origin)
        exact[key] = e
        entries.append(e)
        return True

    for k, (sl, sr) in enumerate(cand.seeds):
        add(sl, sr, 0, f"seed {k}")

    processed: set = set()
    for depth in range(1, bounds.rule_depth + 2):
        frontier = [e for e in list(entries) if e.depth < depth]
        for rid, rule in enumerate(cand.rules):
            if rule.premise == "axiom":
                if depth == 1:
                    for sl, sr, desc in _instantiate_rule(cand, rule, None, bounds):
                        add(sl, sr, depth, f"{rule.name} {desc}")
                continue
            for e in frontier:
                if e.left.running is not None or e.right.running is not None:
                    continue
                mark = (rid, id(e))
                if mark in processed:
                    continue
                processed.add(mark)
                for sl, sr, desc in _instantiate_rule(cand, rule, e, bounds):
                    add(sl, sr, depth, f"{rule.name} {desc}")
        if cand.calculus == "lambdabla" and cand.prompt_check:
            for e in frontier:
                if e.left.running is not None or e.right.running is not None:
                    continue
                mark = ("pc", id(e))
                if mark in processed:
                    continue
                processed.add(mark)
                pl = least_fresh_prompt(_env_prompts(e.left))
                pr = least_fresh_prompt(_env_prompts(e.right))
                add(
                    mk_state(e.left.env + (PromptVal(pl),)),
                    mk_state(e.right.env + (PromptVal(pr),)),
                    depth,
                    "promptcheck",
                )
    return Expanded(cand, entries, exact, bounds.rule_depth)


def _env_prompts(s: State) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for v in s.env:
        out |= prompts_of(v)
    return out


def _joint_shape(sl: State, sr: State):
    shape = []
    for a, b in zip(sl.env, sr.env):
        ka = mc.shape_of_env((a,))[0]
        kb = mc.shape_of_env((b,))[0]
        shape.append(ka if ka == kb else "other")
    return tuple(shape)


def _instantiate_rule(cand: Candidate, rule: Rule, e: MemberEntry | None, bounds: Bounds):
    if cand.calculus == "lambdabla":
        if e is None:
            sl = sr = mk_state(())
        else:
            sl, sr = e.left, e.right
            if len(sl.env) != len(sr.env):
                return
        shape = _joint_shape(sl, sr) if e is not None else ()
        spaces = []
        for p in rule.params:
            if p.kind not in ("cv", "c", "edia"):
                raise IllFormedRule(f"parameter kind {p.kind} is not a multi-prompt kind")
            gen = "star" if cand.variant == "star" else "standard"
            spaces.append(list(mc.enumerate_multi(p.kind, gen, p.size, shape)))
    else:
        if e is None:
            sl = sr = ls.mk_sstate((), ())
        else:
            sl, sr = e.left, e.right
            if len(sl.env) != len(sr.env) or len(sl.ctxenv) != len(sr.ctxenv):
                return
        spaces = []
        for p in rule.params:
            if p.kind == "pure":
                spaces.append(list(ls.s_enumerate_pure_ctxs(p.size)))
            elif p.kind in ("cv", "c", "fdia"):
                spaces.append(
                    list(ls.s_enumerate(p.kind, p.size, len(sl.ctxenv), len(sl.env)))
                )
            else:
                raise IllFormedRule(f"parameter kind {p.kind} is not a shift/reset kind")

    kinds = {p.name: p.kind for p in rule.params}
    fresh_l: dict = {}
    fresh_r: dict = {}
    if rule.fresh:
        if cand.calculus != "lambdabla":
            raise IllFormedRule("fresh prompts only exist in the multi-prompt calculus")
        al, ar = _env_prompts(sl), _env_prompts(sr)
        for nm in rule.fresh:
            pl, pr = least_fresh_prompt(al), least_fresh_prompt(ar)
            fresh_l[nm] = pl
            fresh_r[nm] = pr
            al, ar = al | {pl}, ar | {pr}

    for combo in itertools.product(*spaces):
        params = {p.name: obj for p, obj in zip(rule.params, combo)}
        try:
            out_l = instantiate_side(rule.left, sl, params, kinds, fresh_l, cand.calculus)
            out_r = instantiate_side(rule.right, sr, params, kinds, fresh_r, cand.calculus)
        except SkipInstance:
            continue
        desc = ",".join(fmt(c) if isinstance(c, (mc.MultiCtx, mc.ValueCtx, mc.MultiEvalCtx)) else "…" for c in combo) or "-"
        yield out_l, out_r, desc


# ---------------------------------------------------------------------------
# Justifications


@dataclass(frozen=True)
class JRefl:
    techniques: frozenset[str]


@dataclass(frozen=True)
class JMember:
    member: MemberEntry
    techniques: frozenset[str]


@dataclass(frozen=True)
class JUpTo:
    au: AU
    ext_left: object
    ext_right: object
    sub: object
    techniques: frozenset[str]


@dataclass(frozen=True)
class JAgainst:
    member: MemberEntry
    value_skels: tuple
    ctx_skels: tuple
    run_skel: object | None
    run_is_target: bool
    techniques: frozenset[str]


Justification = JRefl | JMember | JUpTo | JAgainst


def techniques_of(j: Justification) -> frozenset[str]:
    return j.techniques


# ---------------------------------------------------------------------------
# The matcher


class Matcher:
    def __init__(self, cand: Candidate, expanded: Expanded, spec: UpToSpec, bounds: Bounds):
        self.cand = cand
        self.calc = make_calc(cand)
        self.expanded = expanded
        self.spec = spec
        self.bounds = bounds
        self.cache: dict = {}
        self.shift = cand.calculus == "lamshift"
        self.generation = "star" if cand.variant == "star" else "standard"

    def allowed(self, after_passive: bool) -> frozenset[str]:
        if after_passive and (self.shift or self.cand.variant == "star"):
            return self.spec.strong
        return self.spec.techniques

    def match(self, qs, qt, after_passive: bool, scan: bool = True) -> Justification | None:
        cs, ct = self.calc.canonical(qs), self.calc.canonical(qt)
        return self._core(cs, ct, self.allowed(after_passive), self.bounds.composition_depth, scan)

    def _core(self, cs, ct, allowed, depth, scan) -> Justification | None:
        key = (self.calc.key(cs), self.calc.key(ct), allowed, scan)
        if key in self.cache:
            return self.cache[key]
        self.cache[key] = None  # cut cycles
        res = self._compute(cs, ct, allowed, depth, scan)
        self.cache[key] = res
        return res

    def _compute(self, cs, ct, allowed, depth, scan) -> Justification | None:
        if cs == ct:
            return JRefl(frozenset({"perm"}) if not self.shift else frozenset())
        ek = (self.calc.key(cs), self.calc.key(ct))
        entry = self.expanded.exact.get(ek)
        if entry is not None:
            return JMember(entry, frozenset({"perm"}) if not self.shift else frozenset())
        if depth <= 0:
            return None
        j = self._extension_route(cs, ct, allowed, depth, scan)
        if j is not None:
            return j
        if not scan:
            return None
        return self._scan_members(cs, ct, allowed)

    # -- the anti-unify-and-extend route

    def _extension_route(self, cs, ct, allowed, depth, scan) -> Justification | None:
        if cs.running is None or ct.running is None:
            return None
        if not _same_shape(self.shift, cs, ct):
            return None
        modes = (False, True) if self.shift else (False,)
        for prefer_split in modes:
            au = self._au(cs, ct, prefer_split)
            if au.degraded and not au.value_residuals and not au.ctx_residuals:
                continue
            tech = self._ext_tech(au)
            if not tech <= allowed:
                continue
            try:
                ext_l, ext_r = self._extend(cs, ct, au)
            except Exception:
                continue
            if (self.calc.key(ext_l), self.calc.key(ext_r)) == (
                self.calc.key(cs),
                self.calc.key(ct),
            ):
                continue
            sub = self._core(
                self.calc.canonical(ext_l), self.calc.canonical(ext_r), allowed, depth - 1, scan
            )
            if sub is not None:
                return JUpTo(au, ext_l, ext_r, sub, tech | techniques_of(sub))
        return None

    def _au(self, cs, ct, prefer_split) -> AU:
        if self.shift:
            return s_anti_unify_runs(
                cs.running, ct.running, cs.ctxenv, ct.ctxenv, cs.env, ct.env, prefer_split
            )
        return anti_unify_runs(cs.running, ct.running, cs.env, ct.env, self.generation)

    def _ext_tech(self, au: AU) -> frozenset[str]:
        if self.shift:
            return frozenset({"utrctx" if au.run_residual else "utrctxv"})
        if self.cand.variant == "star":
            return frozenset({"utrctx" if au.run_residual else "utrctxv"})
        tech = {"utctx" if au.run_residual else "utctxv"}
        if au.value_residuals:
            tech.add("str")
        return frozenset(tech)

    def _extend(self, cs, ct, au: AU):
        if self.shift:
            ext_l = ls.mk_sstate(
                cs.ctxenv + tuple(a for a, _ in au.ctx_residuals),
                cs.env + tuple(a for a, _ in au.value_residuals),
                au.run_residual[0] if au.run_residual else None,
            )
            ext_r = ls.mk_sstate(
                ct.ctxenv + tuple(b for _, b in au.ctx_residuals),
                ct.env + tuple(b for _, b in au.value_residuals),
                au.run_residual[1] if au.run_residual else None,
            )
            return ext_l, ext_r
        ext_l = mk_state(
            cs.env + tuple(a for a, _ in au.value_residuals),
            au.run_residual[0] if au.run_residual else None,
        )
        ext_r = mk_state(
            ct.env + tuple(b for _, b in au.value_residuals),
            au.run_residual[1] if au.run_residual else None,
        )
        return ext_l, ext_r

    # -- member-directed search

    def _scan_members(self, cs, ct, allowed) -> Justification | None:
        strong_only = allowed == self.spec.strong and not (self.spec.strong & {"utctxv", "utrctxv"})
        for entry in self.expanded.entries:
            j = (
                self._against_strong(cs, ct, entry, allowed)
                if strong_only
                else self._against(cs, ct, entry, allowed)
            )
            if j is not None:
                return j
        return None

    def _against_strong(self, cs, ct, entry, allowed) -> Justification | None:
        """Member modulo removing values (and context entries): the only
        context-free derivation, usable after passive transitions."""
        if "weak" not in allowed:
            return None
        ms, mt = entry.left, entry.right
        if (ms.running is None) != (cs.running is None):
            return None
        if cs.running is not None and not (
            _aeq(self.shift, ms.running, cs.running) and _aeq(self.shift, mt.running, ct.running)
        ):
            return None
        if self.shift:
            if not _subseq(self.shift, list(zip(ms.ctxenv, mt.ctxenv)), list(zip(cs.ctxenv, ct.ctxenv))):
                return None
        if not _subseq(self.shift, list(zip(ms.env, mt.env)), list(zip(cs.env, ct.env))):
            return None
        return JMember(entry, frozenset({"weak"}))

    def _against(self, cs, ct, entry, allowed) -> Justification | None:
        ms, mt = entry.left, entry.right
        if ms.running is not None and cs.running is None:
            return None
        if not _same_shape(self.shift, cs, ct) or not _same_shape(self.shift, ms, mt):
            return None
        target = None
        if ms.running is not None:
            target = (ms.running, mt.running)
        if self.shift:
            w = SAntiUnifier(ms.ctxenv, mt.ctxenv, ms.env, mt.env, prefer_split=False)
        else:
            w = BlaAntiUnifier(ms.env, mt.env, self.generation)
        w.allow_residuals = False
        w.target = target
        try:
            ctx_skels = []
            if self.shift:
                for a, b in zip(cs.ctxenv, ct.ctxenv):
                    ctx_skels.append(w.walk_sctx(a, b))
            value_skels = []
            for a, b in zip(cs.env, ct.env):
                tag, sk = w.walk(a, b, {}, {}, False)
                if tag != "cv":
                    return None
                value_skels.append(sk)
            run_skel = None
            if cs.running is not None:
                tag, sk = w.walk(cs.running, ct.running, {}, {}, True)
                if target is not None:
                    if tag != "e" or w.run is None:
                        return None
                else:
                    if tag == "e":
                        return None
                run_skel = (tag, sk)
            elif target is not None:
                return None
        except Bail:
            return None
        tech = self._against_tech(bool(target))
        if not tech <= allowed:
            return None
        return JAgainst(entry, tuple(value_skels), tuple(ctx_skels), run_skel, bool(target), tech)

    def _against_tech(self, has_target: bool) -> frozenset[str]:
        if self.shift or self.cand.variant == "star":
            base = {"utrctx" if has_target else "utrctxv"}
        else:
            base = {"utctx" if has_target else "utctxv", "str"}
        base.add("weak")
        if not self.shift:
            base.add("perm")
        return frozenset(base)

    # -- replay

    def replay(self, j: Justification, qs, qt) -> bool:
        cs, ct = self.calc.canonical(qs), self.calc.canonical(qt)
        return self._replay(j, cs, ct)

    def _replay(self, j, cs, ct) -> bool:
        match j:
            case JRefl(_):
                return cs == ct
            case JMember(entry, _):
                return _pair_aeq(self.shift, (entry.left, entry.right), (cs, ct))
            case JUpTo(au, ext_l, ext_r, sub, _):
                if self.shift:
                    rs, rt = s_replay_runs(au, cs.ctxenv, ct.ctxenv, cs.env, ct.env)
                else:
                    rs, rt = replay_runs(au, cs.env, ct.env)
                if not (_aeq(self.shift, rs, cs.running) and _aeq(self.shift, rt, ct.running)):
                    return False
                return self._replay(sub, self.calc.canonical(ext_l), self.calc.canonical(ext_r))
            case JAgainst(entry, value_skels, ctx_skels, run_skel, is_target, _):
                ms, mt = entry.left, entry.right
                if self.shift:
                    fs = ls.SState(ms.ctxenv, ms.env)
                    ft = ls.SState(mt.ctxenv, mt.env)
                    for sk, (a, b) in zip(ctx_skels, zip(cs.ctxenv, ct.ctxenv)):
                        if not _aeq(True, ls.s_ctx_of_fd(sk, fs), a):
                            return False
                        if not _aeq(True, ls.s_ctx_of_fd(sk, ft), b):
                            return False
                    for sk, (a, b) in zip(value_skels, zip(cs.env, ct.env)):
                        if not _aeq(True, ls.s_plug_cv(sk, fs), a) or not _aeq(True, ls.s_plug_cv(sk, ft), b):
                            return False
                    if run_skel is not None:
                        tag, sk = run_skel
                        if is_target:
                            ra = ls.s_plug_fd(sk, ms.running, fs)
                            rb = ls.s_plug_fd(sk, mt.running, ft)
                        else:
                            ra = ls.s_plug_mc(sk if tag == "c" else ls.SMcVal(sk), fs)
                            rb = ls.s_plug_mc(sk if tag == "c" else ls.SMcVal(sk), ft)
                        return _aeq(True, ra, cs.running) and _aeq(True, rb, ct.running)
                    return True
                for sk, (a, b) in zip(value_skels, zip(cs.env, ct.env)):
                    if not _aeq(False, mc.plug_value_ctx(sk, ms.env), a):
                        return False
                    if not _aeq(False, mc.plug_value_ctx(sk, mt.env), b):
                        return False
                if run_skel is not None:
                    tag, sk = run_skel
                    if is_target:
                        ra = mc.plug_multi_eval(sk, ms.running, ms.env)
                        rb = mc.plug_multi_eval(sk, mt.running, mt.env)
                    else:
                        ra = mc.plug_multi(sk if tag == "c" else mc.CVal(sk), ms.env)
                        rb = mc.plug_multi(sk if tag == "c" else mc.CVal(sk), mt.env)
                    return _aeq(False, ra, cs.running) and _aeq(False, rb, ct.running)
                return True
        raise TypeError(f"not a justification: {j!r}")


def _aeq(shift: bool, a, b) -> bool:
    return ls.s_alpha_eq(a, b) if shift else alpha_eq(a, b)


def _pair_aeq(shift, m, q) -> bool:
    (ms, mt), (qs, qt) = m, q
    if shift:
        return ls.s_state_key(ms) == ls.s_state_key(qs) and ls.s_state_key(mt) == ls.s_state_key(qt)
    return lts.state_key(ms) == lts.state_key(qs) and lts.state_key(mt) == lts.state_key(qt)


def _same_shape(shift: bool, a, b) -> bool:
    if len(a.env) != len(b.env) or (a.running is None) != (b.running is None):
        return False
    if shift and len(a.ctxenv) != len(b.ctxenv):
        return False
    return True


def _subseq(shift, small, big) -> bool:
    """small embeds into big as an order-preserving subsequence of pairs --
    NOTE direction: the member may carry extra entries that weakening drops."""
    it = iter(big)
    for (a1, b1) in small:
        for (a2, b2) in it:
            if _aeq(shift, a1, a2) and _aeq(shift, b1, b2):
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Verdicts and the game


@dataclass
class CheckStats:
    pairs: int = 0
    obligations: int = 0
    techniques: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)  # (passive, techniques, advance_steps)
    justifications: list = field(default_factory=list)  # (entry, side, label, just, advance)

    def record(self, passive, just, advance, entry, side, label):
        techs = techniques_of(just) | ({"reduce"} if advance else frozenset())
        for t in sorted(techs) or ["member"]:
            self.techniques[t] = self.techniques.get(t, 0) + 1
        self.audit.append((passive, techs, advance))
        self.justifications.append((entry, side, label, just, advance))


@dataclass
class ValidWithinBounds:
    stats: CheckStats

    def ok(self):
        return True


@dataclass
class Counterexample:
    entry: MemberEntry
    side: str
    label: object
    reason: str

    def ok(self):
        return False


@dataclass
class Unjustified:
    entry: MemberEntry
    side: str
    label: object
    result: tuple
    reason: str

    def ok(self):
        return False


Verdict = ValidWithinBounds | Counterexample | Unjustified


def check_candidate(
    cand: Candidate, bounds: Bounds, spec: UpToSpec | None = None
) -> Verdict:
    """Play every enumerated label from both sides of every expanded pair and
    justify each result within the allowed up-to closure."""
    spec = spec or UpToSpec.default(cand.calculus, cand.variant)
    expanded = expand_candidate(cand, bounds)
    calc = make_calc(cand)
    matcher = Matcher(cand, expanded, spec, bounds)
    stats = CheckStats()
    obligations = expanded.obligation_pairs()
    stats.pairs = len(obligations)
    first_unjust: Unjustified | None = None
    for entry in obligations:
        for side in ("left", "right"):
            atk, dfn = (entry.left, entry.right) if side == "left" else (entry.right, entry.left)
            for lab in calc.labels(atk, bounds.ctx_size):
                a1 = calc.apply(atk, lab)
                if a1 is None:
                    continue
                stats.obligations += 1
                responses, decided = calc.weak(dfn, lab, bounds.tau_fuel)
                passive = calc.passive(lab)
                if not responses:
                    if decided:
                        # a decided refutation beats any open obligation
                        return Counterexample(entry, side, lab, "no weak response exists")
                    first_unjust = first_unjust or Unjustified(
                        entry, side, lab, (a1, None),
                        "no weak response within the internal-step budget",
                    )
                    continue
                advance = [a1] if passive else calc.chain(a1, bounds.tau_fuel)[0]
                just = None
                adv_steps = 0
                for scan in (False, True):
                    for t1 in responses:
                        for k, a2 in enumerate(advance):
                            ql, qr = (a2, t1) if side == "left" else (t1, a2)
                            just = matcher.match(ql, qr, passive, scan)
                            if just is not None:
                                adv_steps = k
                                break
                        if just is not None:
                            break
                    if just is not None:
                        break
                if just is None:
                    first_unjust = first_unjust or Unjustified(
                        entry, side, lab, (a1, responses[0]), "no justification found"
                    )
                    continue
                stats.record(passive, just, adv_steps, entry, side, lab)
    if first_unjust is not None:
        return first_unjust
    return ValidWithinBounds(stats)


def conclusion_justified(cand, bounds, terms, spec=None):
    """Justify the pair of empty-environment states for two closed terms
    against the candidate's closure (the final step of an equivalence proof)."""
    spec = spec or UpToSpec.default(cand.calculus, cand.variant)
    expanded = expand_candidate(cand, bounds)
    matcher = Matcher(cand, expanded, spec, bounds)
    tl, tr = terms
    if cand.calculus == "lamshift":
        sl, sr = ls.mk_sstate((), (), tl), ls.mk_sstate((), (), tr)
    else:
        sl, sr = mk_state((), tl), mk_state((), tr)
    return matcher.match(sl, sr, False)


# ---------------------------------------------------------------------------
# Distinguisher search


@dataclass(frozen=True)
class StrategyNode:
    side: str
    label: object
    children: tuple  # (response-state, StrategyNode)


@dataclass
class Distinguished:
    strategy: StrategyNode

    def ok(self):
        return True

    def trace(self, calc) -> list[str]:
        out = []
        node = self.strategy
        while node is not None:
            out.append(f"{node.side}: {calc.fmt_label(node.label)}")
            node = node.children[0][1] if node.children else None
        return out


@dataclass
class UnknownWithinBounds:
    def ok(self):
        return False


def distinguish(sl, sr, bounds: Bounds, calc) -> Distinguished | UnknownWithinBounds:
    """Bounded attacker search: a win requires the defender to have no weak
    response on a fully explored internal chain."""
    failed_at: dict = {}

    def attack(l, r, depth) -> StrategyNode | None:
        if depth <= 0:
            return None
        key = (calc.key(l), calc.key(r))
        if failed_at.get(key, -1) >= depth:
            return None
        for side in ("left", "right"):
            atk, dfn = (l, r) if side == "left" else (r, l)
            for lab in calc.labels(atk, bounds.ctx_size):
                a1 = calc.apply(atk, lab)
                if a1 is None:
                    continue
                responses, decided = calc.weak(dfn, lab, bounds.tau_fuel)
                if not responses:
                    if decided:
                        return StrategyNode(side, lab, ())
                    continue
                if depth == 1:
                    continue
                subs = []
                for t1 in responses:
                    nl, nr = (a1, t1) if side == "left" else (t1, a1)
                    sub = attack(nl, nr, depth - 1)
                    if sub is None:
                        break
                    subs.append((t1, sub))
                else:
                    return StrategyNode(side, lab, tuple(subs))
        failed_at[key] = max(failed_at.get(key, -1), depth)
        return None

    node = attack(sl, sr, bounds.depth)
    return Distinguished(node) if node is not None else UnknownWithinBounds()


def replay_distinguisher(node: StrategyNode, sl, sr, bounds: Bounds, calc) -> bool:
    """Re-run a winning strategy, checking every defender response is covered."""
    atk, dfn = (sl, sr) if node.side == "left" else (sr, sl)
    a1 = calc.apply(atk, node.label)
    if a1 is None:
        return False
    responses, decided = calc.weak(dfn, node.label, bounds.tau_fuel)
    if not node.children:
        return decided and not responses
    got = {calc.key(t): t for t in responses}
    want = {calc.key(t): sub for t, sub in node.children}
    if set(got) != set(want):
        return False
    for k, t1 in got.items():
        sub = want[k]
        nl, nr = (a1, t1) if node.side == "left" else (t1, a1)
        if not replay_distinguisher(sub, nl, nr, bounds, calc):
            return False
    return True
