"""Named macro encodings: booleans, let/seq/fix, the diverging term, prompt
equality, the single-prompt control-operator encodings, and the two exception
handlers.

Booleans are Church-encoded with thunked branches so that `if` does not
evaluate both arms under call-by-value.
"""

from __future__ import annotations

from .terms import (
    App,
    ContVal,
    Delim,
    Grab,
    HOLE,
    Lam,
    New,
    PromptVal,
    Reset,
    Term,
    Throw,
    Var,
    is_value,
)


class UnknownMacro(Exception):
    pass


class MacroArity(Exception):
    pass


def _lam(*spec) -> Term:
    *names, body = spec
    for x in reversed(names):
        body = Lam(x, body)
    return body


def unit() -> Term:
    return Lam("u", Var("u"))


def true() -> Term:
    return _lam("t", "f", App(Var("t"), unit()))


def false() -> Term:
    return _lam("t", "f", App(Var("f"), unit()))


def omega() -> Term:
    w = Lam("x", App(Var("x"), Var("x")))
    return App(w, w)


def let(x, e1: Term, e2: Term) -> Term:
    return App(Lam(x, e2), e1)


def seq(e1: Term, e2: Term) -> Term:
    return App(Lam("_ignore", e2), e1)


def if_(c: Term, then: Term, other: Term) -> Term:
    return App(App(c, Lam("_then", then)), Lam("_else", other))


def fix(f, x, body: Term) -> Term:
    """Recursive function: f names the function itself, x its argument."""
    g = _lam(f, x, body)
    half = Lam("w", App(g, Lam("v", App(App(Var("w"), Var("w")), Var("v")))))
    return App(half, half)


def peq(e1: Term, e2: Term) -> Term:
    """Prompt equality: capture past the inner delimiter iff they differ."""
    body = Reset(
        Var("px"),
        seq(Reset(Var("py"), Grab(Var("px"), "_", false())), true()),
    )
    return let("px", e1, let("py", e2, body))


def shift_p(p: Term) -> Term:
    _value(p)
    return Lam(
        "f",
        Grab(
            p,
            "k",
            Reset(p, App(Var("f"), Lam("y", Reset(p, Throw(Var("k"), Var("y")))))),
        ),
    )


def control_p(p: Term) -> Term:
    _value(p)
    return Lam(
        "f",
        Grab(p, "k", Reset(p, App(Var("f"), Lam("y", Throw(Var("k"), Var("y")))))),
    )


def reset_p(p: Term) -> Term:
    if not isinstance(p, PromptVal):
        raise MacroArity("resetP needs a prompt literal")
    return ContVal(Delim(p.prompt, HOLE))


prompt_p = reset_p


def shift_prime_p(p: Term) -> Term:
    _value(p)
    return Lam(
        "f",
        App(
            control_p(p),
            Lam(
                "l",
                App(
                    Var("f"),
                    Lam("z", Throw(prompt_p(p), App(Var("l"), Var("z")))),
                ),
            ),
        ),
    )


def handle() -> Term:
    """Exception handler keyed by a freshly generated prompt."""
    return _lam(
        "f",
        "h",
        New(
            "x",
            Reset(
                Var("x"),
                App(Var("f"), Lam("z", Grab(Var("x"), "_", App(Var("h"), Var("z"))))),
            ),
        ),
    )


def raise_p(p: Term, x: Term) -> Term:
    """Iteratively abort to the nearest p-delimiter, comparing names."""
    _value(p)
    _value(x)
    return fix(
        "r",
        "z",
        Grab(
            p,
            "_",
            _lam(
                "y",
                "h",
                if_(
                    peq(x, Var("y")),
                    App(Var("h"), Var("z")),
                    App(Var("r"), Var("z")),
                ),
            ),
        ),
    )


def handle_p(p: Term | None = None) -> Term:
    """Single-prompt handler: pairs a fresh name with the handler function."""
    if p is None:
        p = PromptVal(0)
    _value(p)
    inner = Reset(
        p,
        let(
            "res",
            App(Var("f"), raise_p(p, Var("x"))),
            _lam("_a", "_b", Var("res")),
        ),
    )
    return _lam("f", "h", New("x", App(App(inner, Var("x")), Var("h"))))


def _value(t: Term):
    if not is_value(t):
        raise MacroArity(f"macro argument must be a value: {t}")


_NULLARY = {
    "unit": unit,
    "true": true,
    "false": false,
    "omega": omega,
    "handle": handle,
    "handleP": handle_p,
}

_TABLE = {
    "let": (3, let),
    "seq": (2, seq),
    "if": (3, if_),
    "fix": (3, fix),
    "peq": (2, peq),
    "shiftP": (1, shift_p),
    "controlP": (1, control_p),
    "resetP": (1, reset_p),
    "promptP": (1, prompt_p),
    "shiftP'": (1, shift_prime_p),
    "raiseP": (2, raise_p),
}


def is_macro(name: str) -> bool:
    return name in _NULLARY or name in _TABLE


def expand(name: str, *args):
    """Instantiate a macro; let/fix take binder names as plain strings."""
    if name in _NULLARY:
        if args:
            raise MacroArity(f"{name} takes no arguments")
        return _NULLARY[name]()
    if name not in _TABLE:
        raise UnknownMacro(name)
    arity, fn = _TABLE[name]
    if len(args) != arity:
        raise MacroArity(f"{name} expects {arity} arguments, got {len(args)}")
    return fn(*args)
