"""Untyped lambda terms: Church encodings, the PCF translation, normal-order reduction.

Untyped terms are the plain ``Var``/``Op`` trees of the ``app``/``abs``
signature, with no scope attached.
"""

from __future__ import annotations

import sys
import threading
from functools import lru_cache

from .representations import UnscopedSubst, usubst
from .signature import (
    PCF,
    ULC_TYPES,
    Label,
    SigMorphism,
    STAR,
    TypedSignature,
    collapse_to_star,
    constant_map,
    retype_signature,
)
from .syntax import Op, Substitution, Term, Var, max_free
from .typed import ExtendedModel, TypedModel, TypedTerm, translate

APP_B, ABS_B = (0, 0), (1,)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = Op("app", (f, a), APP_B)
    return f


def lam(body: Term, n: int = 1) -> Term:
    for _ in range(n):
        body = Op("abs", (body,), ABS_B)
    return body


# named-variable notation, converted to indices once at import time


def _named(expr, env=()):
    """``str`` is a variable, ``("\\", x, body)`` a lambda, a list an application spine."""
    if isinstance(expr, str):
        return Var(env.index(expr))
    if isinstance(expr, tuple):
        _, x, body = expr
        return lam(_named(body, (x,) + env))
    head, *rest = expr
    return app(_named(head, env), *(_named(a, env) for a in rest))


def _lams(names: str, body):
    for x in reversed(names.split()):
        body = ("\\", x, body)
    return body


CHURCH_TRUE = _named(_lams("t f", "t"))
CHURCH_FALSE = _named(_lams("t f", "f"))
CHURCH_IF = _named(_lams("b t f", ["b", "t", "f"]))
CHURCH_SUCC = _named(_lams("n f x", ["f", ["n", "f", "x"]]))
_PAIR = _lams("a b s", ["s", "a", "b"])
_FST = _lams("p", ["p", _lams("a b", "a")])
_SND = _lams("p", ["p", _lams("a b", "b")])
# step (a, b) = (b, b + 1); pred n = fst (n step (0, 0))
CHURCH_PRED = _named(_lams("n", [
    _FST,
    ["n",
     _lams("p", [_PAIR, [_SND, "p"], [_lams("m f x", ["f", ["m", "f", "x"]]), [_SND, "p"]]]),
     [_PAIR, _lams("f x", "x"), _lams("f x", "x")]],
]))
Y_COMB = _named(_lams("f", [_lams("x", ["f", ["x", "x"]]), _lams("x", ["f", ["x", "x"]])]))


def church_nat(n: int) -> Term:
    body: Term = Var(0)
    for _ in range(n):
        body = app(Var(1), body)
    return lam(body, 2)


def ulc_stdlib() -> dict[str, object]:
    return {
        "church_true": CHURCH_TRUE,
        "church_false": CHURCH_FALSE,
        "church_nat": church_nat,
        "church_succ": CHURCH_SUCC,
        "church_pred": CHURCH_PRED,
        "church_if": CHURCH_IF,
        "y_comb": Y_COMB,
    }


# ---------------------------------------------------------------------------
# the translation as an extended model


def erased_pcf_signature() -> TypedSignature:
    """PCF's labels with every type sent to ``star``."""
    return _erased()


@lru_cache(maxsize=1)
def _erased() -> TypedSignature:
    return retype_signature(constant_map(PCF.types, ULC_TYPES, STAR), PCF)


_CONSTANTS = {
    "true": CHURCH_TRUE,
    "false": CHURCH_FALSE,
    "zero": church_nat(0),
    "succ": CHURCH_SUCC,
    "pred": CHURCH_PRED,
    "if_bool": CHURCH_IF,
    "if_nat": CHURCH_IF,
}


def _ulc_op(label: Label, args, ctx):
    name = label.name
    if name == "app":
        return app(*args)
    if name == "abs":
        return lam(args[0])
    if name == "fix":
        return app(Y_COMB, args[0])
    return _CONSTANTS[name]


def church_model() -> TypedModel:
    """Untyped terms with PCF's operations read as Church encodings."""
    return TypedModel(
        _erased(),
        var=lambda i, ctx: Var(i),
        op=_ulc_op,
        subst=lambda v, images, ctx: Substitution(tuple(images))(v),
        show=_show,
        name="church",
    )


def _show(t):
    from .syntax import print_term

    return print_term(t)


@lru_cache(maxsize=1)
def pcf_extended_model() -> ExtendedModel:
    return ExtendedModel(PCF, pcf_morphism(), church_model())


def pcf_morphism() -> SigMorphism:
    return collapse_to_star(PCF)


def pcf_to_ulc(t: TypedTerm) -> Term:
    return translate(pcf_extended_model(), t)


# ---------------------------------------------------------------------------
# normal-order reduction


class FuelExhausted(RuntimeError):
    def __init__(self, term: Term, steps: int):
        super().__init__(f"no normal form within {steps} steps")
        self.term = term
        self.steps = steps


def _beta(body: Term, arg: Term) -> Term:
    return usubst(body, UnscopedSubst((arg,), 0))


def _step(t: Term):
    """Contract the leftmost-outermost redex; ``None`` if ``t`` is normal."""
    if type(t) is Var:
        return None
    label, args, bs = t
    if label == "app":
        f, a = args
        if type(f) is Op and f[0] == "abs":
            return _beta(f[1][0], a)
        r = _step(f)
        if r is not None:
            return Op("app", (r, a), bs)
        r = _step(a)
        return None if r is None else Op("app", (f, r), bs)
    if label == "abs":
        r = _step(args[0])
        return None if r is None else Op("abs", (r,), bs)
    raise ValueError(f"not a lambda term: unexpected {label!r}")


def _normalize(t: Term, fuel: int) -> Term:
    for _ in range(fuel):
        r = _step(t)
        if r is None:
            return t
        t = r
    if _step(t) is None:
        return t
    raise FuelExhausted(t, fuel)


def _deep_call(fn, *args):
    # terms produced by reduction can nest far deeper than the default
    # recursion limit allows; run on a thread with a large stack
    out: dict = {}

    def run():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 200_000))
        try:
            out["value"] = fn(*args)
        except BaseException as e:  # re-raised in the caller's thread
            out["error"] = e
        finally:
            sys.setrecursionlimit(old)

    previous = threading.stack_size(512 * 1024 * 1024)
    try:
        worker = threading.Thread(target=run)
        worker.start()
    finally:
        threading.stack_size(previous)
    worker.join()
    if "error" in out:
        raise out["error"]
    return out["value"]


def beta_normalize(t: Term, fuel: int = 10_000) -> Term:
    """Normal-order reduction to a normal form, at most ``fuel`` beta steps."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    return _deep_call(_normalize, t, fuel)


def erased_support(t: Term) -> int:
    return max_free(t)
