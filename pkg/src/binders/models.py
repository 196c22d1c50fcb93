"""Models of a binding signature, the fold out of syntax, and a law harness.

A model is a scope-indexed family of values with three interpretations:
variables ``var(i, n)``, constructors ``op(label, args, n)`` (argument ``j``
lives at scope ``n + binders[j]``) and substitution ``subst(v, images, n)``
taking a value at scope ``len(images)`` to scope ``n``.
"""

from __future__ import annotations

import operator
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from .signature import LC, BindingSignature, SignatureError
from .syntax import (
    Op,
    ScopedTerm,
    Subst,
    Substitution,
    Var,
    _trusted,
    _trusted_subst,
    all_substs,
    count_terms,
    enumerate_raw,
    identity_subst,
    mk_op,
    mk_var,
    print_term,
    random_raw,
    rename,
    shift,
    size,
    substitute,
)


@dataclass(frozen=True)
class Model:
    sig: BindingSignature
    var: Callable[[int, int], Any]
    op: Callable[[str, list, int], Any]
    subst: Callable[[Any, list, int], Any]
    # (value at scope n, n, k) -> value at n + k with free indices moved up by k
    weaken: Callable[[Any, int, int], Any] | None = None
    # (value at scope m, rho, n) -> value at scope n
    rename: Callable[[Any, tuple, int], Any] | None = None
    eq: Callable[[Any, Any], bool] = operator.eq
    show: Callable[[Any], str] = repr
    name: str = "model"
    reports: tuple = field(default=(), compare=False)

    def shift_value(self, v, n: int, k: int):
        if self.weaken is not None:
            return self.weaken(v, n, k)
        return self.subst(v, [self.var(i + k, n + k) for i in range(n)], n + k)

    def rename_value(self, v, rho, n: int):
        if self.rename is not None:
            return self.rename(v, tuple(rho), n)
        return self.subst(v, [self.var(r, n) for r in rho], n)

    def lift(self, images: list, n: int, k: int) -> list:
        """The model's own ``lift_subst``: fresh variables first, old images shifted."""
        if k == 0:
            return list(images)
        return [self.var(j, n + k) for j in range(k)] + [self.shift_value(v, n, k) for v in images]


def fold(M: Model, t: ScopedTerm):
    """The unique substitution-respecting map out of syntax."""
    return _fold(M, t.term, t.scope)


def _fold(M: Model, t, n: int):
    if type(t) is Var:
        return M.var(t[0], n)
    label, args, bs = t
    if label not in M.sig:
        raise SignatureError(f"model {M.name} has no interpretation for {label!r}")
    return M.op(label, [_fold(M, a, n + b) for a, b in zip(args, bs)], n)


# ---------------------------------------------------------------------------
# reference models


def syntax_model(sig: BindingSignature) -> Model:
    return Model(
        sig,
        var=mk_var,
        op=lambda label, args, n: mk_op(sig, label, args, n),
        subst=lambda v, images, n: substitute(v, Subst.of(images, n)),
        weaken=lambda v, n, k: _trusted(shift(v.term, k), n + k),
        rename=lambda v, rho, n: rename(v, rho, n),
        show=print_term,
        name="syntax",
    )


def swap_model() -> Model:
    """LC syntax where application is read with its arguments swapped."""
    base = syntax_model(LC)

    def op(label, args, n):
        if label == "app":
            args = args[::-1]
        return mk_op(LC, label, args, n)

    return Model(LC, base.var, op, base.subst, base.weaken, show=print_term, name="swap")


def _capturing(t, images: tuple, depth: int = 0):
    # images are not shifted under binders: free variables of an image can
    # be captured by binders of ``t``
    if type(t) is Var:
        i = t[0]
        return t if i < depth else images[i - depth]
    label, args, bs = t
    return Op(label, tuple(_capturing(a, images, depth + b) for a, b in zip(args, bs)), bs)


def broken_model(sig: BindingSignature) -> Model:
    """Syntax with a substitution that forgets to lift under binders."""
    base = syntax_model(sig)
    return Model(
        sig,
        base.var,
        base.op,
        subst=lambda v, images, n: _trusted(_capturing(v.term, tuple(u.term for u in images)), n),
        show=print_term,
        name="broken",
    )


def free_variable_model(sig: BindingSignature) -> Model:
    """Carrier: the set of free variables a term uses."""

    def op(label, args, n):
        out = set()
        for a, b in zip(args, sig[label]):
            out.update(i - b for i in a if i >= b)
        return frozenset(out)

    def subst(v, images, n):
        return frozenset().union(*(images[i] for i in v))

    return Model(
        sig,
        var=lambda i, n: frozenset({i}),
        op=op,
        subst=subst,
        weaken=lambda v, n, k: frozenset(i + k for i in v),
        show=lambda v: "(fv" + "".join(f" {i}" for i in sorted(v)) + ")",
        name="fv",
    )


# ---------------------------------------------------------------------------
# law harness


@dataclass
class LawReport:
    law: str
    samples: int = 0
    failures: list = field(default_factory=list)
    bound: str = ""

    MAX_KEPT = 10

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, inputs, lhs, rhs):
        if len(self.failures) < self.MAX_KEPT:
            self.failures.append((inputs, lhs, rhs))

    def lines(self) -> list[str]:
        status = "PASS" if self.ok else "FAIL"
        head = f"LAW {self.law} {status} n={self.samples}"
        out = [head + (f" bound={self.bound}" if self.bound else "")]
        for inputs, lhs, rhs in self.failures:
            out.append(f"  WITNESS {inputs}")
            out.append(f"    LHS {lhs}")
            out.append(f"    RHS {rhs}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


@dataclass(frozen=True)
class Witness:
    """Syntax inputs that produced a law failure."""

    term: str
    subst: tuple[str, ...] = ()
    extra: tuple[str, ...] = ()
    nodes: int = 0

    def __str__(self):
        parts = [self.term]
        if self.subst:
            parts.append("[" + " ".join(self.subst) + "]")
        parts.extend(self.extra)
        return " ".join(parts) + f" nodes={self.nodes}"


def _witness(t, scope, images=(), extra=()) -> Witness:
    nodes = size(t) + sum(size(u) for u in images)
    return Witness(f"{print_term(t)}@{scope}", tuple(print_term(u) for u in images),
                   tuple(extra), nodes)


def _inputs(sig, max_scope, max_nodes, subst_nodes, samples, rng, rand_nodes, rand_subst_nodes):
    """Enumerated (term, scope, subst-target, images) quadruples, then random ones."""
    for m in range(max_scope + 1):
        terms = enumerate_raw(sig, m, max_nodes)
        for n in range(max_scope + 1):
            for s in all_substs(sig, m, n, subst_nodes):
                for t in terms:
                    yield t, m, n, s.images
    for _ in range(samples):
        m, n = rng.randint(0, max_scope), rng.randint(0, max_scope)
        if not _inhabited(sig, m, rand_nodes) or (m and not _inhabited(sig, n, rand_subst_nodes)):
            continue
        t = random_raw(sig, m, rand_nodes, rng)
        images = tuple(random_raw(sig, n, rand_subst_nodes, rng) for _ in range(m))
        yield t, m, n, images


def _inhabited(sig, n, max_nodes) -> bool:
    return any(count_terms(sig, n, s) for s in range(1, max_nodes + 1))


def check_model_laws(M: Model, sig: BindingSignature | None = None, samples: int = 200,
                     seed: int = 42, max_nodes: int = 3, subst_nodes: int = 2,
                     max_scope: int = 2) -> list[LawReport]:
    """Monoid laws of ``M.subst``/``M.var`` and compatibility of each constructor.

    Inputs are the images under ``fold`` of enumerated syntax (terms up to
    ``max_nodes``, substitution entries up to ``subst_nodes``, scopes up to
    ``max_scope``) followed by ``samples`` seeded random ones.
    """
    sig = sig or M.sig
    rng = random.Random(seed)
    bound = f"nodes<={max_nodes},subst-nodes<={subst_nodes},scope<={max_scope}+{samples}random"
    assoc = LawReport("subst-assoc", bound=bound)
    left = LawReport("subst-left-unit", bound=bound)
    right = LawReport("subst-right-unit", bound=bound)
    eq = M.eq

    fold_cache: dict = {}

    def val(t, n):
        key = (t, n)
        v = fold_cache.get(key)
        if v is None:
            v = fold_cache[key] = _fold(M, t, n)
        return v

    for t, m, n, images in _inputs(sig, max_scope, max_nodes, subst_nodes, samples, rng,
                                   max_nodes + 2, subst_nodes + 1):
        vt = val(t, m)
        vimgs = [val(u, n) for u in images]
        right.samples += 1
        lhs = M.subst(vt, [M.var(i, m) for i in range(m)], m)
        if not eq(lhs, vt):
            right.record(_witness(t, m), M.show(lhs), M.show(vt))
        for i in range(m):
            left.samples += 1
            lhs = M.subst(M.var(i, m), vimgs, n)
            if not eq(lhs, vimgs[i]):
                left.record(_witness(Var(i), m, images), M.show(lhs), M.show(vimgs[i]))
        # associativity needs a second substitution; reuse images of a
        # neighbouring scope to keep the enumeration linear
        for p in range(max_scope + 1):
            if n and not _inhabited(sig, p, subst_nodes):
                continue
            delta = _small_substs(sig, n, p, subst_nodes)
            for d in delta:
                vd = [val(u, p) for u in d]
                assoc.samples += 1
                lhs = M.subst(M.subst(vt, vimgs, n), vd, p)
                rhs = M.subst(vt, [M.subst(v, vd, p) for v in vimgs], p)
                if not eq(lhs, rhs):
                    assoc.record(_witness(t, m, images, ("then", "[" + " ".join(map(print_term, d)) + "]")),
                                 M.show(lhs), M.show(rhs))
    reports = [assoc, left, right]
    for label in sig:
        reports.append(_check_compat(M, sig, label, rng, samples, max_scope, subst_nodes, val))
    return reports


def _small_substs(sig, n, p, subst_nodes):
    # first few substitutions n -> p in enumeration order
    pool = enumerate_raw(sig, p, subst_nodes)[:3]
    return list(product(pool, repeat=n))


def _check_compat(M, sig, label, rng, samples, max_scope, subst_nodes, val) -> LawReport:
    binders = sig[label]
    rep = LawReport(f"compat:{label}",
                    bound=f"arg-nodes<={subst_nodes},subst-nodes<={subst_nodes},scope<={max_scope}+{samples}random")
    eq = M.eq

    def one(m, n, args, images):
        vargs = [val(a, m + b) for a, b in zip(args, binders)]
        vimgs = [val(u, n) for u in images]
        rep.samples += 1
        lhs = M.subst(M.op(label, vargs, m), vimgs, n)
        rhs = M.op(label, [M.subst(a, M.lift(vimgs, n, b), n + b) for a, b in zip(vargs, binders)], n)
        if not eq(lhs, rhs):
            rep.record(_witness(Op(label, tuple(args), binders), m, images), M.show(lhs), M.show(rhs))

    for m in range(max_scope + 1):
        pools = [enumerate_raw(sig, m + b, subst_nodes) for b in binders]
        for n in range(max_scope + 1):
            for args in product(*pools):
                for s in all_substs(sig, m, n, subst_nodes):
                    one(m, n, args, s.images)
    for _ in range(samples):
        m, n = rng.randint(0, max_scope), rng.randint(0, max_scope)
        if not all(_inhabited(sig, m + b, 4) for b in binders) or (m and not _inhabited(sig, n, 3)):
            continue
        args = [random_raw(sig, m + b, 4, rng) for b in binders]
        one(m, n, args, [random_raw(sig, n, 3, rng) for _ in range(m)])
    return rep


def check_fold_morphism(M: Model, sig: BindingSignature | None = None, samples: int = 200,
                        seed: int = 42, max_nodes: int = 4, subst_nodes: int = 2,
                        max_scope: int = 2) -> LawReport:
    """``fold(t[s]) == fold(t)[fold . s]`` and ``fold(var i) == var(i)``."""
    sig = sig or M.sig
    rng = random.Random(seed)
    rep = LawReport("fold-morphism",
                    bound=f"nodes<={max_nodes},subst-nodes<={subst_nodes},scope<={max_scope}+{samples}random")
    for n in range(max_scope + 1):
        for i in range(n):
            rep.samples += 1
            lhs = _fold(M, Var(i), n)
            if not M.eq(lhs, M.var(i, n)):
                rep.record(_witness(Var(i), n), M.show(lhs), M.show(M.var(i, n)))
    folded: dict = {}

    def val(t, n):
        key = (t, n)
        v = folded.get(key)
        if v is None:
            v = folded[key] = _fold(M, t, n)
        return v

    for t, m, n, images in _inputs(sig, max_scope, max_nodes, subst_nodes, samples, rng,
                                   max_nodes + 2, subst_nodes + 1):
        rep.samples += 1
        lhs = val(Substitution(images)(t), n)
        rhs = M.subst(val(t, m), [val(u, n) for u in images], n)
        if not M.eq(lhs, rhs):
            rep.record(_witness(t, m, images), M.show(lhs), M.show(rhs))
    return rep


# ---------------------------------------------------------------------------
# substitution laws of syntax itself, at exhaustive scale


def check_substitution_laws(sig: BindingSignature, max_nodes: int = 5, subst_nodes: int = 3,
                            max_scope: int = 2) -> list[LawReport]:
    """Associativity and both unit laws of ``substitute``, exhaustively.

    Every term up to ``max_nodes`` at every scope up to ``max_scope``, every
    substitution whose entries are terms up to ``subst_nodes``, and for
    associativity every pair of such substitutions.
    """
    bound = f"nodes<={max_nodes},subst-nodes<={subst_nodes},scope<={max_scope}"
    assoc = LawReport("subst-assoc", bound=bound)
    left = LawReport("subst-left-unit", bound=bound)
    right = LawReport("subst-right-unit", bound=bound)
    for m in range(max_scope + 1):
        terms = enumerate_raw(sig, m, max_nodes)
        ident = Substitution(identity_subst(m).images, shared=True)
        for t, r in zip(terms, ident.many(terms)):
            right.samples += 1
            if r != t:
                right.record(_witness(t, m), print_term(r), print_term(t))
        for n in range(max_scope + 1):
            substs = all_substs(sig, m, n, subst_nodes)
            intern: dict = {}
            # t[s] for every t, sharing structure across the family
            after_first = [Substitution(s.images, True, intern).many(terms) for s in substs]
            for s in substs:
                for i in range(m):
                    left.samples += 1
                    r = Substitution(s.images)(Var(i))
                    if r != s.images[i]:
                        left.record(_witness(Var(i), m, s.images), print_term(r), print_term(s.images[i]))
            for p in range(max_scope + 1):
                for d in all_substs(sig, n, p, subst_nodes):
                    second = Substitution(d.images, shared=True)
                    by_composite: dict = {}
                    for s, ts in zip(substs, after_first):
                        composite = tuple(second.many(s.images))
                        rhs = by_composite.get(composite)
                        if rhs is None:
                            rhs = by_composite[composite] = Substitution(composite, shared=True).many(terms)
                        lhs = second.many(ts)
                        assoc.samples += len(terms)
                        if lhs != rhs:
                            for t, a, b in zip(terms, lhs, rhs):
                                if a != b:
                                    assoc.record(
                                        _witness(t, m, s.images, ("then", "[" + " ".join(map(print_term, d.images)) + "]")),
                                        print_term(a), print_term(b))
    return [assoc, left, right]


def random_substitution_laws(sig: BindingSignature, samples: int = 1000, seed: int = 42,
                             max_nodes: int = 8, subst_nodes: int = 4,
                             max_scope: int = 3) -> list[LawReport]:
    """Seeded random triples checked against the same three laws."""
    rng = random.Random(seed)
    bound = f"random nodes<={max_nodes},subst-nodes<={subst_nodes},scope<={max_scope},seed={seed}"
    assoc = LawReport("subst-assoc", bound=bound)
    left = LawReport("subst-left-unit", bound=bound)
    right = LawReport("subst-right-unit", bound=bound)
    scopes = [k for k in range(max_scope + 1) if _inhabited(sig, k, subst_nodes)]
    done = 0
    while done < samples:
        m = rng.randint(0, max_scope)
        n, p = rng.choice(scopes), rng.choice(scopes)
        if not _inhabited(sig, m, max_nodes):
            continue
        t = random_raw(sig, m, max_nodes, rng)
        s = tuple(random_raw(sig, n, subst_nodes, rng) for _ in range(m))
        d = tuple(random_raw(sig, p, subst_nodes, rng) for _ in range(n))
        st = substitute(_trusted(t, m), _trusted_subst(s, n))
        lhs = substitute(st, _trusted_subst(d, p)).term
        composite = tuple(Substitution(d)(u) for u in s)
        rhs = Substitution(composite)(t)
        assoc.samples += 1
        if lhs != rhs:
            assoc.record(_witness(t, m, s), print_term(lhs), print_term(rhs))
        right.samples += 1
        r = substitute(_trusted(t, m), identity_subst(m)).term
        if r != t:
            right.record(_witness(t, m), print_term(r), print_term(t))
        for i in range(m):
            left.samples += 1
            r = Substitution(s)(Var(i))
            if r != s[i]:
                left.record(_witness(Var(i), m, s), print_term(r), print_term(s[i]))
        done += 1
    return [assoc, left, right]
