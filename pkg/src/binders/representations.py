"""Unscoped de Bruijn terms and the passage to and from the scoped world.

An unscoped term is the same ``Var``/``Op`` tree with no bound on its free
indices. Substitutions on it are total functions from indices to terms,
represented finitely as an explicit prefix followed by a shifted identity.

The scoped side only sees terms of finite support; ``to_unscoped`` forgets
the scope and ``to_scoped`` recovers the least one, so a term carrying
unused trailing slots comes back at its minimal scope (``at_scope`` restores
a larger one).
"""

from __future__ import annotations

import operator
import random
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from .models import LawReport, Model, _inhabited
from .signature import BindingSignature, SignatureError
from .syntax import (
    Op,
    ScopedTerm,
    ScopeError,
    Subst,
    Term,
    Var,
    _trusted,
    count_terms,
    enumerate_raw,
    max_free,
    print_term,
    random_raw,
    rename_raw,
    shift,
)

UnscopedTerm = Term


class TransportError(ValueError):
    def __init__(self, message: str, reports=()):
        super().__init__(message)
        self.reports = list(reports)


# ---------------------------------------------------------------------------
# unscoped substitutions


@dataclass(frozen=True)
class UnscopedSubst:
    """``i -> prefix[i]`` below ``len(prefix)``, ``i -> Var(i - len(prefix) + shift)`` above.

    Stored in canonical form: trailing prefix entries that already follow
    the tail law are dropped, so ``==`` is equality of the denoted functions.
    """

    prefix: tuple = ()
    shift: int = 0

    def __post_init__(self):
        prefix, sh = tuple(self.prefix), self.shift
        if sh < 0:
            raise ValueError("shift must be non-negative")
        while prefix and sh > 0 and prefix[-1] == Var(sh - 1):
            prefix, sh = prefix[:-1], sh - 1
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "shift", sh)

    def __call__(self, i: int) -> Term:
        p = self.prefix
        return p[i] if i < len(p) else Var(i - len(p) + self.shift)

    def __str__(self):
        body = " ".join(print_term(u) for u in self.prefix)
        return f"[{body} | +{self.shift}]"


ETA = UnscopedSubst()


def shift_subst(k: int) -> UnscopedSubst:
    return UnscopedSubst((), k)


def usubst(t: Term, f: UnscopedSubst) -> Term:
    """Simultaneous substitution; under ``k`` binders ``f`` is lifted by ``k``."""
    p, sh = f.prefix, f.shift
    n = len(p)

    def go(t, d):
        if type(t) is Var:
            i = t[0]
            if i < d:
                return t
            j = i - d
            if j < n:
                return shift(p[j], d)
            return Var(j - n + sh + d)
        label, args, bs = t
        return Op(label, tuple([go(a, d + b) for a, b in zip(args, bs)]), bs)

    return go(t, 0)


def ucompose(f: UnscopedSubst, g: UnscopedSubst) -> UnscopedSubst:
    """The substitution ``i -> usubst(f(i), g)``."""
    lf, lg = len(f.prefix), len(g.prefix)
    length = max(lf, lf + lg - f.shift)
    prefix = tuple(usubst(f(i), g) for i in range(length))
    return UnscopedSubst(prefix, length - lf + f.shift - lg + g.shift)


def embed(sigma: Subst) -> UnscopedSubst:
    """A scoped substitution as a total one (identity past its source scope)."""
    return UnscopedSubst(sigma.images, len(sigma.images))


# ---------------------------------------------------------------------------
# support and conversions


def support(t: Term) -> int:
    """Least ``n`` with every free index of ``t`` below ``n``."""
    return max_free(t)


def _raw_max_index(t: Term) -> int:
    if type(t) is Var:
        return t[0]
    return max((_raw_max_index(a) for a in t[1]), default=-1)


def _probes(lo: int, hi: int):
    """Renamings fixing ``0..lo-1``: shifts at ``k`` and adjacent swaps, up to ``hi``."""
    for k in range(lo, hi + 1):
        yield lambda i, k=k: i if i < k else i + 1
    for j in range(lo, hi):
        yield lambda i, j=j: j + 1 if i == j else (j if i == j + 1 else i)


def support_by_probes(t: Term) -> int:
    """Least ``n`` such that every probe renaming fixing ``0..n-1`` fixes ``t``.

    Independent of ``support``: it only renames and compares.
    """
    hi = _raw_max_index(t) + 2
    for n in range(hi + 1):
        if all(rename_raw(t, f) == t for f in _probes(n, hi)):
            return n
    return hi + 1


def to_scoped(u: Term) -> ScopedTerm:
    return _trusted(u, support(u))


def to_unscoped(t: ScopedTerm) -> Term:
    return t.term


def enumerate_unscoped(sig: BindingSignature, max_nodes: int, index_bound: int = 3) -> list[Term]:
    """Unscoped terms up to ``max_nodes`` whose free indices are below ``index_bound``."""
    return enumerate_raw(sig, index_bound, max_nodes)


# ---------------------------------------------------------------------------
# intersectionality


@dataclass
class IntersectionReport:
    max_nodes: int
    rows: list[tuple[int, int, int]] = field(default_factory=list)
    mismatched: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(a == b for _, a, b in self.rows) and not self.mismatched

    def lines(self) -> list[str]:
        out = [f"size {s} closed {a} equalizer {b}" for s, a, b in self.rows]
        out.append(f"INTERSECTIONAL {'PASS' if self.ok else 'FAIL'} max-nodes={self.max_nodes}")
        out.extend(f"  unmatched {m}" for m in self.mismatched)
        return out


def intersectionality_check(sig: BindingSignature, max_nodes: int) -> IntersectionReport:
    """Compare closed terms with scope-1 terms on which both inclusions 1 -> 2 agree.

    Counts are per exact size; closed terms are also matched one-to-one with
    the equalizer through weakening.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    rep = IntersectionReport(max_nodes)
    for s in range(1, max_nodes + 1):
        closed = [t for t in enumerate_raw(sig, 0, s) if _size_is(t, s)]
        one = [t for t in enumerate_raw(sig, 1, s) if _size_is(t, s)]
        eq = [t for t in one if rename_raw(t, lambda i: 0) == rename_raw(t, lambda i: 1)]
        rep.rows.append((s, len(closed), len(eq)))
        # weakening a closed term to scope 1 changes nothing in the tree
        unmatched = set(closed) ^ set(eq)
        rep.mismatched.extend(sorted(print_term(t) for t in unmatched))
    return rep


def _size_is(t, s):
    from .syntax import size

    return size(t) == s


# ---------------------------------------------------------------------------
# De Bruijn-monad style models


@dataclass(frozen=True)
class DeBruijnModel:
    """A model whose values carry no scope.

    ``subst(v, f)`` takes a total function ``f`` from indices to values;
    ``op`` receives arguments already living under their binders.
    """

    sig: BindingSignature
    var: Callable[[int], Any]
    op: Callable[[str, list], Any]
    subst: Callable[[Any, Callable[[int], Any]], Any]
    support: Callable[[Any], int]
    eq: Callable[[Any, Any], bool] = operator.eq
    show: Callable[[Any], str] = repr
    name: str = "debruijn-model"
    reports: tuple = field(default=(), compare=False)


def ufold(M: DeBruijnModel, u: Term):
    if type(u) is Var:
        return M.var(u[0])
    label, args, _ = u
    if label not in M.sig:
        raise SignatureError(f"model {M.name} has no interpretation for {label!r}")
    return M.op(label, [ufold(M, a) for a in args])


def unscoped_syntax_model(sig: BindingSignature) -> DeBruijnModel:
    def subst(v, f):
        if isinstance(f, UnscopedSubst):
            return usubst(v, f)
        return _usubst_env(v, f)

    return DeBruijnModel(
        sig,
        var=Var,
        op=lambda label, args: Op(label, tuple(args), sig[label]),
        subst=subst,
        support=support,
        show=print_term,
        name="unscoped-syntax",
    )


def _usubst_env(t: Term, env: Callable[[int], Term], d: int = 0) -> Term:
    if type(t) is Var:
        i = t[0]
        return t if i < d else shift(env(i - d), d)
    label, args, bs = t
    return Op(label, tuple(_usubst_env(a, env, d + b) for a, b in zip(args, bs)), bs)


def _env(M: DeBruijnModel, prefix, sh: int):
    n = len(prefix)
    return lambda i: prefix[i] if i < n else M.var(i - n + sh)


def _sample_values(M: DeBruijnModel, samples: int, rng: random.Random, max_nodes: int = 3,
                   index_bound: int = 2):
    out = [(u, ufold(M, u)) for u in enumerate_raw(M.sig, index_bound, max_nodes)]
    bound = index_bound + 1
    if _inhabited(M.sig, bound, max_nodes + 3):
        for _ in range(samples):
            u = random_raw(M.sig, bound, max_nodes + 3, rng)
            out.append((u, ufold(M, u)))
    return out


def check_debruijn_laws(M: DeBruijnModel, samples: int = 200, seed: int = 42,
                        max_nodes: int = 3) -> list[LawReport]:
    """Associativity and unit laws of ``M.subst`` on folded syntax."""
    rng = random.Random(seed)
    values = _sample_values(M, samples, rng, max_nodes)
    small = [v for u, v in values[:6]]
    assoc = LawReport("debruijn-assoc", bound=f"nodes<={max_nodes}+{samples}random")
    left = LawReport("debruijn-left-unit", bound=assoc.bound)
    right = LawReport("debruijn-right-unit", bound=assoc.bound)
    families = [(p, sh) for k in range(3) for p in product(small, repeat=k) for sh in range(3)]
    eta = M.var
    for u, v in values:
        right.samples += 1
        r = M.subst(v, eta)
        if not M.eq(r, v):
            right.record(print_term(u), M.show(r), M.show(v))
    for (p, sh) in families:
        f = _env(M, p, sh)
        for i in range(4):
            left.samples += 1
            r = M.subst(M.var(i), f)
            if not M.eq(r, f(i)):
                left.record(f"(var {i}) {len(p)}+{sh}", M.show(r), M.show(f(i)))
    for u, v in values[: 40]:
        for (p, sh) in families[:: 3]:
            f = _env(M, p, sh)
            for (q, sh2) in families[:: 7]:
                g = _env(M, q, sh2)
                assoc.samples += 1
                lhs = M.subst(M.subst(v, f), g)
                rhs = M.subst(v, lambda i: M.subst(f(i), g))
                if not M.eq(lhs, rhs):
                    assoc.record(print_term(u), M.show(lhs), M.show(rhs))
    for _ in range(samples):
        u, v = rng.choice(values)
        f = _env(M, [rng.choice(values)[1] for _ in range(rng.randint(0, 3))], rng.randint(0, 3))
        g = _env(M, [rng.choice(values)[1] for _ in range(rng.randint(0, 3))], rng.randint(0, 3))
        assoc.samples += 1
        lhs = M.subst(M.subst(v, f), g)
        rhs = M.subst(v, lambda i: M.subst(f(i), g))
        if not M.eq(lhs, rhs):
            assoc.record(print_term(u), M.show(lhs), M.show(rhs))
    return [assoc, left, right]


def check_support_oracle(M: DeBruijnModel, samples: int = 200, seed: int = 42,
                         max_nodes: int = 3) -> LawReport:
    """The model's support agrees with what renaming probes observe."""
    rng = random.Random(seed)
    rep = LawReport("support-oracle", bound=f"nodes<={max_nodes}+{samples}random")
    for u, v in _sample_values(M, samples, rng, max_nodes):
        rep.samples += 1
        s = M.support(v)
        hi = s + 2

        def renamed(f):
            return M.subst(v, lambda i: M.var(f(i)))

        sound = all(M.eq(renamed(f), v) for f in _probes(s, hi))
        tight = s == 0 or not all(M.eq(renamed(f), v) for f in _probes(s - 1, hi))
        if not (sound and tight):
            rep.record(print_term(u), f"support {s}", "sound" if sound else "unsound")
    return rep


# ---------------------------------------------------------------------------
# transports between the two kinds of model


@dataclass(frozen=True)
class At:
    """A value of an unscoped model viewed at scope ``scope``."""

    value: Any
    scope: int


def transport_unscoped_model(Mu: DeBruijnModel, samples: int = 200, seed: int = 42,
                             on_empty: str = "warn") -> Model:
    """Restrict ``Mu`` to scoped families: the values at ``n`` are those of support at most ``n``.

    Laws and the support oracle are checked on samples first; a violation
    raises ``TransportError`` carrying the failing reports. ``on_empty``
    ("warn", "error" or "ignore") decides what happens when no sampled value
    lives at scope 0.
    """
    reports = check_debruijn_laws(Mu, samples, seed) + [check_support_oracle(Mu, samples, seed)]
    bad = [r for r in reports if not r.ok]
    if bad:
        raise TransportError(
            "model rejected: " + "; ".join(f"{r.law} witness {r.failures[0][0]}" for r in bad), reports)
    if on_empty != "ignore" and not _has_closed_value(Mu):
        msg = f"{Mu.name}: no closed value found; the scope-0 part of the transport is empty"
        if on_empty == "error":
            raise TransportError(msg, reports)
        warnings.warn(msg, stacklevel=2)

    def var(i, n):
        if not 0 <= i < n:
            raise ScopeError(f"variable {i} out of scope {n}")
        return At(Mu.var(i), n)

    def op(label, args, n):
        v = Mu.op(label, [a.value for a in args])
        if Mu.support(v) > n:
            raise ScopeError(f"{label} result has support {Mu.support(v)} > {n}")
        return At(v, n)

    def subst(v, images, n):
        imgs = [a.value for a in images]
        m = len(imgs)
        return At(Mu.subst(v.value, lambda i: imgs[i] if i < m else Mu.var(i)), n)

    return Model(
        Mu.sig, var, op, subst,
        eq=lambda a, b: a.scope == b.scope and Mu.eq(a.value, b.value),
        show=lambda a: f"{Mu.show(a.value)}@{a.scope}",
        name=f"restricted({Mu.name})",
        reports=tuple(reports),
    )


def _has_closed_value(Mu: DeBruijnModel) -> bool:
    for s in range(1, 6):
        if count_terms(Mu.sig, 0, s):
            return True
    return False


class Colim:
    """A scoped value seen in the union over all scopes.

    ``v`` at ``n`` and its weakening at ``n + 1`` are the same element; two
    elements are compared after weakening both to the larger scope.
    """

    __slots__ = ("value", "scope", "model")

    def __init__(self, value, scope: int, model: Model):
        self.value, self.scope, self.model = value, scope, model

    def at(self, n: int):
        if n < self.scope:
            raise ScopeError(f"cannot narrow from scope {self.scope} to {n}")
        if n == self.scope:
            return self.value
        return self.model.rename_value(self.value, range(self.scope), n)

    def __eq__(self, other):
        if not isinstance(other, Colim):
            return NotImplemented
        n = max(self.scope, other.scope)
        return self.model.eq(self.at(n), other.at(n))

    __hash__ = None

    def __repr__(self):
        return f"Colim({self.model.show(self.value)}@{self.scope})"


def transport_scoped_model(Ms: Model, samples: int = 100, seed: int = 42) -> DeBruijnModel:
    """Glue the scoped family of ``Ms`` along weakenings into one unscoped model."""
    rep = _check_renaming(Ms, samples, seed)
    if not rep.ok:
        raise TransportError(f"model rejected: renaming witness {rep.failures[0][0]}", [rep])

    def var(i):
        return Colim(Ms.var(i, i + 1), i + 1, Ms)

    def op(label, args):
        bs = Ms.sig[label]
        n = max([0] + [a.scope - b for a, b in zip(args, bs)])
        return Colim(Ms.op(label, [a.at(n + b) for a, b in zip(args, bs)], n), n, Ms)

    def subst(v, f):
        imgs = [f(i) for i in range(v.scope)]
        p = max([0] + [a.scope for a in imgs])
        return Colim(Ms.subst(v.value, [a.at(p) for a in imgs], p), p, Ms)

    def supp(v):
        m = v.scope
        top = v.at(m + 2)
        for k in range(m + 1):
            if all(Ms.eq(Ms.rename_value(v.value, [f(i) for i in range(m)], m + 2), top)
                   for f in _probes(k, m)):
                return k
        return m

    return DeBruijnModel(Ms.sig, var, op, subst, supp,
                         show=lambda c: f"{Ms.show(c.value)}@{c.scope}",
                         name=f"glued({Ms.name})", reports=(rep,))


def _check_renaming(Ms: Model, samples: int, seed: int) -> LawReport:
    rng = random.Random(seed)
    rep = LawReport("renaming-consistent", bound=f"enumerated+{samples}random")
    if Ms.rename is None:
        return rep
    items = []
    for m in range(3):
        items += [(t, m) for t in enumerate_raw(Ms.sig, m, 3)]
    for _ in range(samples):
        m = rng.randint(0, 3)
        if _inhabited(Ms.sig, m, 5):
            items.append((random_raw(Ms.sig, m, 5, rng), m))
    from .models import _fold

    for t, m in items:
        v = _fold(Ms, t, m)
        for n in range(m, m + 2):
            for rho in product(range(n), repeat=m) if m <= 2 else [tuple(range(m))]:
                rep.samples += 1
                a = Ms.rename(v, tuple(rho), n)
                b = Ms.subst(v, [Ms.var(r, n) for r in rho], n)
                if not Ms.eq(a, b):
                    rep.record(f"{print_term(t)}@{m} rho={list(rho)}", Ms.show(a), Ms.show(b))
    return rep


# ---------------------------------------------------------------------------
# explicit isomorphisms between syntax models


def restricted_to_scoped(a: At) -> ScopedTerm:
    return ScopedTerm(a.value, a.scope)


def scoped_to_restricted(t: ScopedTerm) -> At:
    return At(t.term, t.scope)


def glued_to_unscoped(c: Colim) -> Term:
    return c.value.term


def unscoped_to_glued(u: Term, Ms: Model) -> Colim:
    t = to_scoped(u)
    return Colim(t, t.scope, Ms)
