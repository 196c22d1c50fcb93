"""Well-scoped de Bruijn syntax for an arbitrary binding signature.

Trees (``Var`` / ``Op``) are shared with the unscoped presentation; a
``ScopedTerm`` pairs a tree with the number of free-variable slots it lives
in. Index 0 is always the innermost binder.
"""

from __future__ import annotations

import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import NamedTuple

from . import sexpr
from .signature import BindingSignature, SignatureError


class ScopeError(ValueError):
    pass


class Var(NamedTuple):
    index: int


class Op(NamedTuple):
    """Constructor node. ``binders[j]`` variables are bound in ``args[j]``."""

    label: str
    args: tuple
    binders: tuple[int, ...]


Term = Var | Op


# ---------------------------------------------------------------------------
# raw tree operations (no scope bookkeeping)


def shift(t: Term, k: int, cutoff: int = 0) -> Term:
    """Add ``k`` to every free index at or above ``cutoff``."""
    if k == 0:
        return t
    if type(t) is Var:
        return Var(t[0] + k) if t[0] >= cutoff else t
    label, args, bs = t
    return Op(label, tuple([shift(a, k, cutoff + b) for a, b in zip(args, bs)]), bs)


def rename_raw(t: Term, f: Callable[[int], int], depth: int = 0) -> Term:
    if type(t) is Var:
        i = t[0]
        return t if i < depth else Var(f(i - depth) + depth)
    label, args, bs = t
    return Op(label, tuple([rename_raw(a, f, depth + b) for a, b in zip(args, bs)]), bs)


def free_indices(t: Term, depth: int = 0) -> set[int]:
    match t:
        case Var(i):
            return {i - depth} if i >= depth else set()
        case Op(_, args, bs):
            out: set[int] = set()
            for a, b in zip(args, bs):
                out |= free_indices(a, depth + b)
            return out


def max_free(t: Term, depth: int = 0) -> int:
    """Largest free index plus one (0 when closed)."""
    match t:
        case Var(i):
            return i - depth + 1 if i >= depth else 0
        case Op(_, args, bs):
            return max((max_free(a, depth + b) for a, b in zip(args, bs)), default=0)


def size(t: Term) -> int:
    match t:
        case Var():
            return 1
        case Op(_, args, _):
            return 1 + sum(size(a) for a in args)


def _lift(images: tuple, k: int) -> tuple:
    if k == 0:
        return images
    return tuple([Var(j) for j in range(k)]) + tuple([shift(u, k) for u in images])


class Substitution:
    """Applies a dense image vector to raw trees.

    Under ``d`` binders the vector acts as ``lift_subst(sigma, d)``; lifted
    image vectors are built once per depth. With ``shared=True`` results are
    memoised per (node identity, depth), which pays off on families of
    terms that share subterms (enumeration output does). ``intern`` maps
    each result to a canonical equal object so later memo hits line up.
    """

    __slots__ = ("lifted", "memo", "intern")

    def __init__(self, images: tuple, shared: bool = False, intern: dict | None = None):
        self.lifted = [images]
        self.memo: list[dict] | None = [] if shared else None
        self.intern = intern

    def images_at(self, d: int) -> tuple:
        lifted = self.lifted
        while len(lifted) <= d:
            k = len(lifted)
            lifted.append(tuple([shift(u, k) for u in lifted[0]]))
        return lifted[d]

    def __call__(self, t: Term, d: int = 0) -> Term:
        # variables are cheaper to recompute than to look up
        if type(t) is Var:
            i = t[0]
            if i < d:
                return t
            lifted = self.lifted
            return (lifted[d] if d < len(lifted) else self.images_at(d))[i - d]
        memo = self.memo
        if memo is not None:
            if len(memo) <= d:
                memo.extend({} for _ in range(d + 1 - len(memo)))
            hit = memo[d].get(id(t))
            if hit is not None:
                return hit[1]
        label, args, bs = t
        out = []
        for a, b in zip(args, bs):
            e = d + b
            if type(a) is Var:
                i = a[0]
                if i < e:
                    out.append(a)
                else:
                    lifted = self.lifted
                    out.append((lifted[e] if e < len(lifted) else self.images_at(e))[i - e])
            else:
                hit = memo[e].get(id(a)) if memo is not None and e < len(memo) else None
                out.append(hit[1] if hit is not None else self(a, e))
        r = Op(label, tuple(out), bs)
        if self.intern is not None:
            r = self.intern.setdefault(r, r)
        if memo is not None:
            # keep ``t`` alive so its id cannot be recycled
            memo[d][id(t)] = (t, r)
        return r

    def many(self, terms) -> list:
        if self.memo is None:
            return [self(t) for t in terms]
        if not self.memo:
            self.memo.append({})
        get = self.memo[0].get
        call = self.__call__
        out = []
        for t in terms:
            hit = get(id(t))
            out.append(hit[1] if hit is not None else call(t))
        return out


def _subst_dense(t: Term, images: tuple) -> Term:
    return Substitution(images)(t)


def _check_scope(t: Term, n: int) -> None:
    match t:
        case Var(i):
            if not 0 <= i < n:
                raise ScopeError(f"variable {i} out of scope {n}")
        case Op(label, args, bs):
            if len(args) != len(bs):
                raise ScopeError(f"{label}: {len(args)} arguments for {len(bs)} binder slots")
            for a, b in zip(args, bs):
                _check_scope(a, n + b)
        case _:
            raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# scoped terms and substitutions


@dataclass(frozen=True)
class ScopedTerm:
    term: Term
    scope: int

    def __post_init__(self):
        if self.scope < 0:
            raise ScopeError("negative scope")
        _check_scope(self.term, self.scope)

    def __str__(self):
        return f"{print_term(self.term)} @{self.scope}"


def _trusted(term: Term, scope: int) -> ScopedTerm:
    t = object.__new__(ScopedTerm)
    object.__setattr__(t, "term", term)
    object.__setattr__(t, "scope", scope)
    return t


@dataclass(frozen=True)
class Subst:
    """Dense substitution from scope ``len(images)`` to scope ``target``."""

    images: tuple
    target: int

    def __post_init__(self):
        for u in self.images:
            _check_scope(u, self.target)

    @classmethod
    def of(cls, entries: Sequence[ScopedTerm], target: int | None = None) -> Subst:
        scopes = {e.scope for e in entries}
        if target is None:
            if len(scopes) != 1:
                raise ScopeError("cannot infer target scope of substitution")
            target = scopes.pop()
        elif scopes - {target}:
            raise ScopeError(f"substitution entries at scopes {sorted(scopes)}, expected {target}")
        return cls(tuple(e.term for e in entries), target)

    @property
    def source(self) -> int:
        return len(self.images)

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i: int) -> ScopedTerm:
        return _trusted(self.images[i], self.target)

    def entries(self) -> list[ScopedTerm]:
        return [self[i] for i in range(len(self.images))]


def _trusted_subst(images: tuple, target: int) -> Subst:
    s = object.__new__(Subst)
    object.__setattr__(s, "images", images)
    object.__setattr__(s, "target", target)
    return s


def mk_var(i: int, n: int) -> ScopedTerm:
    if not 0 <= i < n:
        raise ScopeError(f"variable {i} out of scope {n}")
    return _trusted(Var(i), n)


def mk_op(sig: BindingSignature, label: str, args: Sequence[ScopedTerm], n: int) -> ScopedTerm:
    binders = sig[label]
    if len(args) != len(binders):
        raise ScopeError(f"{label} takes {len(binders)} arguments, got {len(args)}")
    for j, (a, b) in enumerate(zip(args, binders)):
        if a.scope != n + b:
            raise ScopeError(f"{label} argument {j} must live in scope {n + b}, not {a.scope}")
    return _trusted(Op(label, tuple(a.term for a in args), binders), n)


def rename(t: ScopedTerm, rho: Sequence[int], n: int) -> ScopedTerm:
    """Relabel free variable ``i`` as ``rho[i]`` in a term at scope ``n``."""
    if len(rho) != t.scope:
        raise ScopeError(f"renaming has length {len(rho)}, term scope is {t.scope}")
    if any(not 0 <= r < n for r in rho):
        raise ScopeError(f"renaming {list(rho)} leaves scope {n}")
    rho = tuple(rho)
    return _trusted(rename_raw(t.term, rho.__getitem__), n)


def weaken(t: ScopedTerm, k: int) -> ScopedTerm:
    return _trusted(t.term, t.scope + k)


def at_scope(t: ScopedTerm, n: int) -> ScopedTerm:
    """The same tree viewed at a (larger or equal) scope ``n``."""
    return ScopedTerm(t.term, n)


def identity_subst(n: int) -> Subst:
    return _trusted_subst(tuple(Var(i) for i in range(n)), n)


def lift_subst(sigma: Subst, k: int) -> Subst:
    return _trusted_subst(_lift(sigma.images, k), sigma.target + k)


def substitute(t: ScopedTerm, sigma: Subst) -> ScopedTerm:
    if len(sigma.images) != t.scope:
        raise ScopeError(f"substitution has {len(sigma.images)} entries, term scope is {t.scope}")
    return _trusted(_subst_dense(t.term, sigma.images), sigma.target)


def compose_subst(sigma: Subst, delta: Subst) -> Subst:
    """``sigma`` then ``delta``: entrywise ``substitute(sigma[i], delta)``."""
    if sigma.target != len(delta.images):
        raise ScopeError(f"cannot compose: {sigma.target} != {len(delta.images)}")
    return _trusted_subst(tuple(_subst_dense(u, delta.images) for u in sigma.images), delta.target)


def renaming_subst(rho: Sequence[int], n: int) -> Subst:
    return Subst(tuple(Var(r) for r in rho), n)


# ---------------------------------------------------------------------------
# enumeration, counting, sampling


def _compositions(total: int, k: int):
    if k == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first, *rest)


@lru_cache(maxsize=None)
def _exact(sig: BindingSignature, n: int, s: int) -> tuple:
    out: list[Term] = []
    if s == 1:
        out.extend(Var(i) for i in range(n))
    for label, bs in sig.arities:
        if not bs:
            if s == 1:
                out.append(Op(label, (), ()))
            continue
        for sizes in _compositions(s - 1, len(bs)):
            pools = [_exact(sig, n + b, z) for b, z in zip(bs, sizes)]
            out.extend(Op(label, args, bs) for args in product(*pools))
    return tuple(out)


@lru_cache(maxsize=None)
def count_terms(sig: BindingSignature, n: int, s: int) -> int:
    """Number of terms at scope ``n`` with exactly ``s`` nodes."""
    total = n if s == 1 else 0
    for _, bs in sig.arities:
        if not bs:
            total += s == 1
            continue
        for sizes in _compositions(s - 1, len(bs)):
            c = 1
            for b, z in zip(bs, sizes):
                c *= count_terms(sig, n + b, z)
                if not c:
                    break
            total += c
    return total


def enumerate_raw(sig: BindingSignature, n: int, max_nodes: int) -> list[Term]:
    return [t for s in range(1, max_nodes + 1) for t in _exact(sig, n, s)]


def enumerate_terms(sig: BindingSignature, n: int, max_nodes: int) -> list[ScopedTerm]:
    """All terms at scope ``n`` with at most ``max_nodes`` nodes.

    Ordered by size, then variables before constructors, constructors in
    signature order, then argument sizes and arguments lexicographically.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    return [_trusted(t, n) for t in enumerate_raw(sig, n, max_nodes)]


def _sample_exact(sig: BindingSignature, n: int, s: int, rng: random.Random) -> Term:
    r = rng.randrange(count_terms(sig, n, s))
    if s == 1 and r < n:
        return Var(r)
    if s == 1:
        r -= n
    for label, bs in sig.arities:
        if not bs:
            if s == 1:
                if r == 0:
                    return Op(label, (), ())
                r -= 1
            continue
        for sizes in _compositions(s - 1, len(bs)):
            c = 1
            for b, z in zip(bs, sizes):
                c *= count_terms(sig, n + b, z)
            if r < c:
                args = tuple(_sample_exact(sig, n + b, z, rng) for b, z in zip(bs, sizes))
                return Op(label, args, bs)
            r -= c
    raise AssertionError("unreachable: counts out of sync")


def random_raw(sig: BindingSignature, n: int, max_nodes: int, rng: random.Random) -> Term:
    weights = [count_terms(sig, n, s) for s in range(1, max_nodes + 1)]
    if not any(weights):
        raise ValueError(f"no terms at scope {n} with at most {max_nodes} nodes")
    (s,) = rng.choices(range(1, max_nodes + 1), weights=weights)
    return _sample_exact(sig, n, s, rng)


def random_term(sig: BindingSignature, n: int, max_nodes: int, rng: random.Random) -> ScopedTerm:
    """A term drawn uniformly among those at scope ``n`` with at most ``max_nodes`` nodes."""
    return _trusted(random_raw(sig, n, max_nodes, rng), n)


def random_subst(sig: BindingSignature, m: int, n: int, max_nodes: int,
                 rng: random.Random) -> Subst:
    return _trusted_subst(tuple(random_raw(sig, n, max_nodes, rng) for _ in range(m)), n)


def all_substs(sig: BindingSignature, m: int, n: int, max_nodes: int) -> list[Subst]:
    pool = enumerate_raw(sig, n, max_nodes)
    return [_trusted_subst(images, n) for images in product(pool, repeat=m)]


# ---------------------------------------------------------------------------
# s-expression syntax


def parse_term(sig: BindingSignature, text_or_node) -> Term:
    """Read ``(var <i>)`` / ``(<label> <arg>...)`` into a tree (no scope check)."""
    node = sexpr.parse_one(text_or_node) if isinstance(text_or_node, str) and not isinstance(
        text_or_node, sexpr.Atom) else text_or_node
    return _from_node(sig, node)


def _from_node(sig: BindingSignature, node) -> Term:
    if not isinstance(node, list) or not node or isinstance(node[0], list):
        raise sexpr.fail(f"expected a term, got {sexpr.to_string(node)!r}", node)
    head = str(node[0])
    if head == "var":
        if len(node) != 2:
            raise sexpr.fail("expected (var <index>)", node)
        return Var(sexpr.nat(node[1], "variable index"))
    try:
        bs = sig[head]
    except SignatureError:
        raise sexpr.fail(f"unknown label {head!r}", node[0]) from None
    if len(node) - 1 != len(bs):
        raise sexpr.fail(f"{head} takes {len(bs)} arguments, got {len(node) - 1}", node)
    return Op(head, tuple(_from_node(sig, a) for a in node[1:]), bs)


def print_term(t: Term) -> str:
    match t:
        case Var(i):
            return f"(var {i})"
        case Op(label, args, _):
            return "(" + " ".join([label, *(print_term(a) for a in args)]) + ")"
        case ScopedTerm(term=inner):
            return print_term(inner)
    raise TypeError(f"not a term: {t!r}")


def parse_scoped(sig: BindingSignature, text_or_node, scope: int) -> ScopedTerm:
    return ScopedTerm(parse_term(sig, text_or_node), scope)
