import random

import pytest

from delimeq.terms import (
    App,
    ContVal,
    Delim,
    Grab,
    HOLE,
    Lam,
    New,
    PromptVal,
    Reset,
    Throw,
    Var,
    AppL,
    AppR,
)


@pytest.fixture
def rng():
    return random.Random(20260810)


def random_term(rng, size, scope=(), prompts=(0, 1, 2)):
    """Random closed-ish term: variables come only from scope."""
    if size <= 1:
        opts = ["lamid", "prompt"]
        if scope:
            opts.append("var")
        k = rng.choice(opts)
        if k == "var":
            return Var(rng.choice(scope))
        if k == "prompt":
            return PromptVal(rng.choice(prompts))
        return Lam("z", Var("z"))
    k = rng.choice(["lam", "app", "new", "reset", "grab", "throw", "cont"])
    half = rng.randint(1, size - 1)
    if k == "lam":
        x = rng.choice("xyz")
        return Lam(x, random_term(rng, size - 1, tuple(scope) + (x,), prompts))
    if k == "app":
        return App(
            random_term(rng, half, scope, prompts),
            random_term(rng, size - half, scope, prompts),
        )
    if k == "new":
        x = rng.choice("xyz")
        return New(x, random_term(rng, size - 1, tuple(scope) + (x,), prompts))
    if k == "reset":
        return Reset(random_value(rng, scope, prompts), random_term(rng, size - 1, scope, prompts))
    if k == "grab":
        x = rng.choice("xyz")
        return Grab(
            random_value(rng, scope, prompts),
            x,
            random_term(rng, size - 1, tuple(scope) + (x,), prompts),
        )
    if k == "throw":
        return Throw(
            ContVal(random_ctx(rng, max(1, half - 1), scope, prompts)),
            random_term(rng, size - half, scope, prompts),
        )
    return ContVal(random_ctx(rng, size - 1, scope, prompts))


def random_value(rng, scope=(), prompts=(0, 1, 2)):
    k = rng.choice(["lam", "prompt", "var", "cont"])
    if k == "var" and scope:
        return Var(rng.choice(scope))
    if k == "prompt":
        return PromptVal(rng.choice(prompts))
    if k == "cont":
        return ContVal(random_ctx(rng, 2, scope, prompts))
    return Lam("w", Var("w"))


def random_ctx(rng, size, scope=(), prompts=(0, 1, 2)):
    if size <= 0:
        return HOLE
    k = rng.choice(["appl", "appr", "delim"])
    if k == "appl":
        return AppL(random_ctx(rng, size - 1, scope, prompts), random_term(rng, max(1, size // 2), scope, prompts))
    if k == "appr":
        return AppR(random_value(rng, scope, prompts), random_ctx(rng, size - 1, scope, prompts))
    return Delim(rng.choice(prompts), random_ctx(rng, size - 1, scope, prompts))
