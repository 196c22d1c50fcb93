"""Reference implementations that share no code with the library.

Terms are converted to a named representation in which every binder gets a
globally fresh name; substitution there cannot capture, so it serves as an
independent check on index arithmetic.
"""

from __future__ import annotations

import itertools
import sys
import threading

from binders.syntax import Op, Var

_fresh = itertools.count()


def _new():
    return f"_b{next(_fresh)}"


def to_named(t, env):
    """``env[i]`` is the name of free index ``i``."""
    if type(t) is Var:
        return ("v", env[t.index])
    args = []
    for a, b in zip(t.args, t.binders):
        xs = [_new() for _ in range(b)]
        args.append((tuple(xs), to_named(a, xs + list(env))))
    return ("o", t.label, tuple(args), t.binders)


def from_named(n, env):
    if n[0] == "v":
        return Var(list(env).index(n[1]))
    _, label, args, bs = n
    return Op(label, tuple(from_named(a, list(xs) + list(env)) for xs, a in args), bs)


def named_subst(n, mapping):
    if n[0] == "v":
        return mapping.get(n[1], n)
    _, label, args, bs = n
    out = []
    for xs, a in args:
        ys = [_new() for _ in xs]
        inner = dict(mapping)
        inner.update({x: ("v", y) for x, y in zip(xs, ys)})
        out.append((tuple(ys), named_subst(a, inner)))
    return ("o", label, tuple(out), bs)


def oracle_substitute(t, m, images, n):
    """``t`` at scope ``m`` with variable ``i`` replaced by ``images[i]`` (scope ``n``)."""
    src = [f"x{i}" for i in range(m)]
    dst = [f"y{i}" for i in range(n)]
    named = to_named(t, src)
    mapping = {x: to_named(u, dst) for x, u in zip(src, images)}
    return from_named(named_subst(named, mapping), dst)


def oracle_rename(t, m, rho, n):
    src = [f"x{i}" for i in range(m)]
    dst = [f"y{i}" for i in range(n)]
    named = to_named(t, src)
    mapping = {x: ("v", dst[r]) for x, r in zip(src, rho)}
    return from_named(named_subst(named, mapping), dst)


def oracle_free(t, depth=0):
    if type(t) is Var:
        return {t.index - depth} if t.index >= depth else set()
    out = set()
    for a, b in zip(t.args, t.binders):
        out |= oracle_free(a, depth + b)
    return out


def brute_terms(sig, n, size):
    """All terms of exactly ``size`` nodes at scope ``n``, by plain recursion."""
    out = []
    if size == 1:
        out += [Var(i) for i in range(n)]
    for label, bs in sig.arities:
        k = len(bs)
        if k == 0:
            if size == 1:
                out.append(Op(label, (), bs))
            continue
        for split in itertools.product(range(1, size), repeat=k):
            if sum(split) != size - 1:
                continue
            pools = [brute_terms(sig, n + b, s) for b, s in zip(bs, split)]
            out += [Op(label, args, bs) for args in itertools.product(*pools)]
    return out


def beta_by_names(t, fuel=10_000):
    """Normal-order reduction on named terms, for cross-checking.

    Runs on a worker thread with a large stack since reducts can get deep.
    """
    out = []
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 200_000))
    size = threading.stack_size(512 * 1024 * 1024)
    try:
        th = threading.Thread(target=lambda: out.append(_beta_by_names(t, fuel)))
        th.start()
        th.join()
    finally:
        threading.stack_size(size)
        sys.setrecursionlimit(old)
    return out[0]


def _beta_by_names(t, fuel):
    names = [f"f{i}" for i in range(_max_free(t))]
    n = to_named(t, names)
    for _ in range(fuel):
        r = _named_step(n)
        if r is None:
            return from_named(n, names)
        n = r
    return None


def _max_free(t):
    fv = oracle_free(t)
    return max(fv) + 1 if fv else 0


def _named_step(n):
    if n[0] == "v":
        return None
    _, label, args, bs = n
    if label == "app":
        (_, f), (_, a) = args
        if f[0] == "o" and f[1] == "abs":
            (xs, body), = f[2]
            return named_subst(body, {xs[0]: a})
        r = _named_step(f)
        if r is not None:
            return ("o", "app", (((), r), ((), a)), bs)
        r = _named_step(a)
        return None if r is None else ("o", "app", (((), f), ((), r)), bs)
    (xs, body), = args
    r = _named_step(body)
    return None if r is None else ("o", "abs", ((xs, r),), bs)
