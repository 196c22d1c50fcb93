"""Simply-typed syntax, typed models, pullback along signature morphisms.

A context is a tuple of types with index 0 the most recently bound
variable. Under an argument with bound types ``(u0, ..., uk-1)`` the context
becomes ``(u0, ..., uk-1) + ctx``, so ``u0`` is variable 0 inside.
"""

from __future__ import annotations

import operator
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, NamedTuple

from . import sexpr
from .signature import (
    Label,
    MorphismReport,
    SigMorphism,
    SignatureError,
    TypedSignature,
    TypeExpr,
    check_label,
    check_morphism,
    parse_type,
    print_type,
)

Context = tuple  # of TypeExpr


class TypeCheckError(ValueError):
    """Ill-typed term; ``path`` lists argument positions from the root."""

    def __init__(self, message: str, path: Sequence[int] = ()):
        self.path = tuple(path)
        where = "root" if not self.path else "/".join(map(str, self.path))
        super().__init__(f"at {where}: {message}")
        self.detail = message


class TVar(NamedTuple):
    index: int


class TOp(NamedTuple):
    label: Label
    args: tuple
    binders: tuple  # number of variables bound in each argument


TTree = TVar | TOp


def tshift(t: TTree, k: int, cutoff: int = 0) -> TTree:
    if k == 0:
        return t
    if type(t) is TVar:
        return TVar(t[0] + k) if t[0] >= cutoff else t
    label, args, bs = t
    return TOp(label, tuple([tshift(a, k, cutoff + b) for a, b in zip(args, bs)]), bs)


def tsubst_raw(t: TTree, images: tuple, depth: int = 0) -> TTree:
    if type(t) is TVar:
        i = t[0]
        return t if i < depth else tshift(images[i - depth], depth)
    label, args, bs = t
    return TOp(label, tuple([tsubst_raw(a, images, depth + b) for a, b in zip(args, bs)]), bs)


def tsize(t: TTree) -> int:
    if type(t) is TVar:
        return 1
    return 1 + sum(tsize(a) for a in t[1])


def tmax_free(t: TTree, depth: int = 0) -> int:
    if type(t) is TVar:
        return t[0] - depth + 1 if t[0] >= depth else 0
    return max((tmax_free(a, depth + b) for a, b in zip(t[1], t[2])), default=0)


def typecheck(sig: TypedSignature, ctx: Context, t: TTree, path: tuple = ()) -> TypeExpr:
    """The type of ``t`` in ``ctx``, or ``TypeCheckError`` naming the offending position."""
    if type(t) is TVar:
        if not 0 <= t.index < len(ctx):
            raise TypeCheckError(f"variable {t.index} unbound in a context of length {len(ctx)}", path)
        return ctx[t.index]
    label, args, bs = t
    try:
        arity = sig.arity_of(label)
    except SignatureError as e:
        raise TypeCheckError(str(e), path) from None
    if len(args) != len(arity.args):
        raise TypeCheckError(f"{label} takes {len(arity.args)} arguments, got {len(args)}", path)
    if tuple(len(b) for b, _ in arity.args) != tuple(bs):
        raise TypeCheckError(f"{label} binder counts disagree with its arity", path)
    for j, (a, (bound, want)) in enumerate(zip(args, arity.args)):
        got = typecheck(sig, tuple(bound) + tuple(ctx), a, path + (j,))
        if got != want:
            raise TypeCheckError(
                f"argument {j} of {label} has type {print_type(got)}, expected {print_type(want)}",
                path + (j,))
    return arity.result


@dataclass(frozen=True)
class TypedTerm:
    tree: TTree
    ctx: Context
    ty: TypeExpr
    sig: TypedSignature = field(compare=False, repr=False)

    def __str__(self):
        return print_typed(self.tree)


def typed_term(sig: TypedSignature, ctx: Sequence[TypeExpr], tree: TTree) -> TypedTerm:
    ctx = tuple(ctx)
    for ty in ctx:
        if not sig.types.well_formed(ty):
            raise TypeCheckError(f"context type {print_type(ty)} is not in the type grammar")
    return TypedTerm(tree, ctx, typecheck(sig, ctx, tree), sig)


def tvar(sig: TypedSignature, i: int, ctx: Sequence[TypeExpr]) -> TypedTerm:
    return typed_term(sig, ctx, TVar(i))


def top(sig: TypedSignature, label: Label, args: Sequence[TypedTerm], ctx: Sequence[TypeExpr]) -> TypedTerm:
    """Build an operation node, checking each argument's context and type."""
    ctx = tuple(ctx)
    arity = sig.arity_of(label)
    if len(args) != len(arity.args):
        raise TypeCheckError(f"{label} takes {len(arity.args)} arguments, got {len(args)}")
    for j, (a, (bound, want)) in enumerate(zip(args, arity.args)):
        if a.ctx != tuple(bound) + ctx or a.ty != want:
            raise TypeCheckError(f"argument {j} of {label} does not fit its slot", (j,))
    tree = TOp(label, tuple(a.tree for a in args), tuple(len(b) for b, _ in arity.args))
    return TypedTerm(tree, ctx, arity.result, sig)


def typed_substitute(t: TypedTerm, sigma: Sequence[TypedTerm], target: Sequence[TypeExpr]) -> TypedTerm:
    """Replace variable ``i`` by ``sigma[i]``, every entry living in ``target``."""
    target = tuple(target)
    if len(sigma) != len(t.ctx):
        raise TypeCheckError(f"substitution has {len(sigma)} entries for a context of {len(t.ctx)}")
    for i, (u, want) in enumerate(zip(sigma, t.ctx)):
        if u.ctx != target:
            raise TypeCheckError(f"entry {i} lives in a different context")
        if u.ty != want:
            raise TypeCheckError(f"entry {i} has type {print_type(u.ty)}, expected {print_type(want)}")
    return TypedTerm(tsubst_raw(t.tree, tuple(u.tree for u in sigma)), target, t.ty, t.sig)


def typed_identity(sig: TypedSignature, ctx: Sequence[TypeExpr]) -> list[TypedTerm]:
    ctx = tuple(ctx)
    return [TypedTerm(TVar(i), ctx, ty, sig) for i, ty in enumerate(ctx)]


# ---------------------------------------------------------------------------
# typed models


@dataclass(frozen=True)
class TypedModel:
    """Values indexed by (context, type).

    ``var(i, ctx)``; ``op(label, args, ctx)`` with argument ``j`` at context
    ``bound_j + ctx``; ``subst(v, images, ctx)`` where ``images[i]`` is a
    value at ``ctx`` and ``v`` lives at a context of length ``len(images)``.
    """

    sig: TypedSignature
    var: Callable[[int, Context], Any]
    op: Callable[[Label, list, Context], Any]
    subst: Callable[[Any, list, Context], Any]
    eq: Callable[[Any, Any], bool] = operator.eq
    show: Callable[[Any], str] = repr
    name: str = "typed-model"

    def lift(self, images: list, ctx: Context, bound: Context) -> list:
        if not bound:
            return list(images)
        wide = tuple(bound) + tuple(ctx)
        k = len(bound)
        moved = [self.var(i + k, wide) for i in range(len(ctx))]
        return [self.var(j, wide) for j in range(k)] + [self.subst(v, moved, wide) for v in images]


def typed_fold(M: TypedModel, t: TypedTerm):
    return _tfold(M, t.tree, t.ctx)


def _tfold(M: TypedModel, t: TTree, ctx: Context):
    if type(t) is TVar:
        return M.var(t[0], ctx)
    label, args, _ = t
    arity = M.sig.arity_of(label) if M.sig is not None else None
    if arity is None:
        raise SignatureError(f"model {M.name} has no signature")
    return M.op(label, [_tfold(M, a, tuple(b) + ctx) for a, (b, _) in zip(args, arity.args)], ctx)


def typed_syntax_model(sig: TypedSignature) -> TypedModel:
    return TypedModel(
        sig,
        var=lambda i, ctx: TypedTerm(TVar(i), ctx, ctx[i], sig),
        op=lambda label, args, ctx: top(sig, label, args, ctx),
        subst=lambda v, images, ctx: typed_substitute(v, images, ctx),
        show=str,
        name=f"syntax({sig.name})",
    )


def pullback_model(m: SigMorphism, M: TypedModel, source: TypedSignature,
                   depth: int = 2) -> TypedModel:
    """View a model of the target signature as one of ``source`` along ``m``.

    The value at ``(ctx, ty)`` is ``M``'s value at ``(g ctx, g ty)``; labels
    are sent through ``h``. The morphism is checked up to ``depth`` before
    anything is built, and every label actually used is checked again.
    """
    report = check_morphism(m, source, M.sig, depth)
    if not report.ok:
        raise SignatureError("\n".join(report.lines()))
    g, h = m.type_map, m.label_map
    checked: set = set()

    def gctx(ctx):
        return tuple(g(t) for t in ctx)

    def op(label, args, ctx):
        if label not in checked:
            check_label(m, source, M.sig, label)
            checked.add(label)
        return M.op(h(label), args, gctx(ctx))

    return TypedModel(
        source,
        var=lambda i, ctx: M.var(i, gctx(ctx)),
        op=op,
        subst=lambda v, images, ctx: M.subst(v, images, gctx(ctx)),
        eq=M.eq,
        show=M.show,
        name=f"pullback({M.name})",
    )


@dataclass(frozen=True, eq=False)
class ExtendedModel:
    """A model of another signature reached from ``source`` by a morphism."""

    source: TypedSignature
    morphism: SigMorphism
    model: TypedModel
    depth: int = 2

    @cached_property
    def report(self) -> MorphismReport:
        return check_morphism(self.morphism, self.source, self.model.sig, self.depth)

    @cached_property
    def pulled_back(self) -> TypedModel:
        return pullback_model(self.morphism, self.model, self.source, self.depth)


def translate(E: ExtendedModel, t: TypedTerm):
    """The initial map out of ``E.source``'s syntax, landing in ``E.model``."""
    if t.sig is not E.source and t.sig is not None and t.sig.name != E.source.name:
        raise SignatureError(f"term over {t.sig.name!r}, extended model over {E.source.name!r}")
    return typed_fold(E.pulled_back, t)


# ---------------------------------------------------------------------------
# enumeration and sampling


def _labels_by_result(sig: TypedSignature, depth: int) -> dict:
    out: dict = {}
    for label in sig.labels(depth):
        out.setdefault(sig.arity_of(label).result, []).append(label)
    return out


_LABEL_CACHE: dict = {}


def _result_index(sig: TypedSignature, depth: int) -> dict:
    key = (id(sig), depth)
    hit = _LABEL_CACHE.get(key)
    if hit is None or hit[0] is not sig:
        hit = _LABEL_CACHE[key] = (sig, _labels_by_result(sig, depth))
    return hit[1]


def enumerate_typed(sig: TypedSignature, ctx: Sequence[TypeExpr], ty: TypeExpr,
                    max_nodes: int, depth: int = 2) -> list[TTree]:
    """Every tree of type ``ty`` in ``ctx`` with at most ``max_nodes`` nodes.

    Operation labels are restricted to parameters of depth at most ``depth``.
    """
    index = _result_index(sig, depth)
    memo: dict = {}

    def exact(ctx, ty, s):
        key = (ctx, ty, s)
        if key in memo:
            return memo[key]
        out = []
        if s == 1:
            out += [TVar(i) for i, c in enumerate(ctx) if c == ty]
        for label in index.get(ty, ()):
            arity = sig.arity_of(label)
            slots = [(tuple(b) + ctx, a) for b, a in arity.args]
            bs = tuple(len(b) for b, _ in arity.args)
            if not slots:
                if s == 1:
                    out.append(TOp(label, (), ()))
                continue
            for sizes in _compositions(s - 1, len(slots)):
                pools = [exact(c, a, k) for (c, a), k in zip(slots, sizes)]
                out += [TOp(label, args, bs) for args in product(*pools)]
        memo[key] = out
        return out

    ctx = tuple(ctx)
    return [t for s in range(1, max_nodes + 1) for t in exact(ctx, ty, s)]


def _compositions(total, k):
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def random_typed(sig: TypedSignature, ctx: Sequence[TypeExpr], ty: TypeExpr,
                 rng: random.Random, budget: int = 8, depth: int = 2) -> TTree:
    """A seeded random tree of type ``ty``; ``budget`` roughly bounds its size.

    Retries until a tree is found; raises if the type looks uninhabited.
    """
    index = _result_index(sig, depth)
    for _ in range(200):
        t = _grow(sig, index, tuple(ctx), ty, rng, budget, 0)
        if t is not None:
            return t
    raise TypeCheckError(f"no term of type {print_type(ty)} found in this context")


def _grow(sig, index, ctx, ty, rng, budget, level):
    if level > 12:
        return None
    vars_ = [TVar(i) for i, c in enumerate(ctx) if c == ty]
    labels = index.get(ty, [])
    leaves = [lb for lb in labels if not sig.arity_of(lb).args]
    inner = [lb for lb in labels if sig.arity_of(lb).args]
    if budget <= 1 or not inner:
        choices = vars_ + [TOp(lb, (), ()) for lb in leaves]
        if choices:
            return rng.choice(choices)
        if not inner:
            return None
        # nothing small: fall through with the cheapest constructor
        inner = sorted(inner, key=lambda lb: len(sig.arity_of(lb).args))[:1]
    pick = rng.randrange(len(vars_) + len(leaves) + 2 * len(inner))
    if pick < len(vars_):
        return vars_[pick]
    pick -= len(vars_)
    if pick < len(leaves):
        return TOp(leaves[pick], (), ())
    label = inner[(pick - len(leaves)) // 2]
    arity = sig.arity_of(label)
    share = max(1, (budget - 1) // len(arity.args))
    args = []
    for bound, a in arity.args:
        sub = _grow(sig, index, tuple(bound) + ctx, a, rng, rng.randint(1, share), level + 1)
        if sub is None:
            return None
        args.append(sub)
    return TOp(label, tuple(args), tuple(len(b) for b, _ in arity.args))


# ---------------------------------------------------------------------------
# text format: (var i) and (op <name> (<type>...) <arg>...)


def parse_typed(sig: TypedSignature, text_or_node) -> TTree:
    node = sexpr.parse_one(text_or_node) if isinstance(text_or_node, str) else text_or_node
    return _typed_from_node(sig, node)


def _typed_from_node(sig, node) -> TTree:
    if not isinstance(node, list) or not node:
        raise sexpr.fail("expected (var i) or (op <name> (<types>) <args>...)", node)
    head = node[0]
    if head == "var":
        if len(node) != 2:
            raise sexpr.fail("(var i) takes one index", node)
        return TVar(sexpr.nat(node[1], "variable index"))
    if head != "op" or len(node) < 3 or not isinstance(node[2], list):
        raise sexpr.fail("expected (op <name> (<types>) <args>...)", node)
    label = Label(str(node[1]), tuple(parse_type(p) for p in node[2]))
    try:
        arity = sig.arity_of(label)
    except SignatureError as e:
        raise sexpr.fail(str(e), node[1]) from None
    args = tuple(_typed_from_node(sig, a) for a in node[3:])
    if len(args) != len(arity.args):
        raise sexpr.fail(f"{label} takes {len(arity.args)} arguments, got {len(args)}", node)
    return TOp(label, args, tuple(len(b) for b, _ in arity.args))


def print_typed(t: TTree) -> str:
    if type(t) is TVar:
        return f"(var {t.index})"
    label, args, _ = t
    params = "(" + " ".join(print_type(p) for p in label.params) + ")"
    return "(" + " ".join(["op", label.name, params, *(print_typed(a) for a in args)]) + ")"


def parse_context(text: str) -> Context:
    """Whitespace-separated types, index 0 first: ``"nat (=> nat bool)"``."""
    return tuple(parse_type(n) for n in sexpr.parse_all(text))
