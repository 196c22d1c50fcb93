import random
import warnings
from itertools import product

import pytest

from binders.models import fold, syntax_model
from binders.representations import (
    ETA,
    At,
    Colim,
    DeBruijnModel,
    TransportError,
    UnscopedSubst,
    check_debruijn_laws,
    check_support_oracle,
    embed,
    glued_to_unscoped,
    intersectionality_check,
    restricted_to_scoped,
    scoped_to_restricted,
    shift_subst,
    support,
    support_by_probes,
    to_scoped,
    to_unscoped,
    transport_scoped_model,
    transport_unscoped_model,
    ucompose,
    ufold,
    unscoped_syntax_model,
    unscoped_to_glued,
    usubst,
)
from binders.signature import LC, BindingSignature
from binders.syntax import (
    Op,
    ScopedTerm,
    Var,
    all_substs,
    at_scope,
    enumerate_raw,
    random_raw,
    shift,
    substitute,
)

from oracles import oracle_free, oracle_substitute

APP = lambda a, b: Op("app", (a, b), (0, 0))  # noqa: E731
ABS = lambda b: Op("abs", (b,), (1,))  # noqa: E731
SMALL = [Var(0), Var(1), ABS(Var(0))]


def denote(f, upto):
    return [f(i) for i in range(upto)]


def test_usubst_examples():
    for t in enumerate_raw(LC, 3, 4):
        assert usubst(t, ETA) == t
    assert usubst(Var(7), UnscopedSubst((), 3)) == Var(10)
    u = APP(Var(0), Var(2))
    assert usubst(ABS(Var(1)), UnscopedSubst((u,), 0)) == ABS(shift(u, 1))


def test_usubst_agrees_with_scoped_substitute():
    for m in range(3):
        for n in range(3):
            for s in all_substs(LC, m, n, 2):
                for t in enumerate_raw(LC, m, 4):
                    assert to_unscoped(substitute(ScopedTerm(t, m), s)) == usubst(t, embed(s))


def test_usubst_against_named_oracle():
    # a prefix-plus-shift substitution on terms with free indices < 3 acts
    # like a dense one whose tail entries are the shifted variables
    for p, sh in product([(), (ABS(Var(0)),), (Var(1), Var(0))], range(3)):
        f = UnscopedSubst(p, sh)
        dense = tuple(f(i) for i in range(3))
        target = max([support(u) for u in dense] + [0])
        for t in enumerate_raw(LC, 3, 4):
            assert usubst(t, f) == oracle_substitute(t, 3, dense, target)


def test_canonical_form():
    assert UnscopedSubst((Var(0), Var(1)), 2) == ETA
    assert UnscopedSubst((Var(2),), 3) == UnscopedSubst((), 2)
    assert UnscopedSubst((ABS(Var(0)), Var(1)), 2) == UnscopedSubst((ABS(Var(0)),), 1)
    assert UnscopedSubst((Var(5),), 0).prefix == (Var(5),)
    with pytest.raises(ValueError):
        UnscopedSubst((), -1)


def _substs():
    for k in range(3):
        for p in product(SMALL, repeat=k):
            for sh in range(4):
                yield UnscopedSubst(p, sh)


def test_ucompose_denotation_and_units():
    fs = list(_substs())
    for f in fs:
        assert ucompose(f, ETA) == f and ucompose(ETA, f) == f
        for g in fs[::5]:
            h = ucompose(f, g)
            upto = len(f.prefix) + len(g.prefix) + max(f.shift, g.shift) + 4
            assert denote(h, upto) == [usubst(f(i), g) for i in range(upto)]
    assert denote(ucompose(shift_subst(2), shift_subst(3)), 11) == [Var(i + 5) for i in range(11)]


def test_debruijn_laws_exhaustive():
    # units: terms up to 5 nodes with free indices below 3; associativity:
    # every term up to 4 nodes against every pair (f, g); prefixes of f up to
    # 3 and of g up to 2 from a small pool, shifts up to 3
    terms = enumerate_raw(LC, 3, 5)
    small_terms = enumerate_raw(LC, 3, 4)
    fs = [UnscopedSubst(p, sh) for k in range(4) for p in product(SMALL, repeat=k) for sh in range(4)]
    gs = [UnscopedSubst(p, sh) for k in range(3) for p in product(SMALL, repeat=k) for sh in range(4)]
    for t in terms:
        assert usubst(t, ETA) == t
    for f in fs:
        for i in range(6):
            assert usubst(Var(i), f) == f(i)
    for f in fs:
        for g in gs:
            fg = ucompose(f, g)
            for t in small_terms:
                assert usubst(usubst(t, f), g) == usubst(t, fg)


def test_debruijn_laws_random():
    rng = random.Random(42)

    def rand_subst():
        return UnscopedSubst(tuple(random_raw(LC, 4, 5, rng) for _ in range(rng.randint(0, 4))),
                             rng.randint(0, 4))

    for _ in range(1000):
        t = random_raw(LC, 4, 8, rng)
        f, g = rand_subst(), rand_subst()
        assert usubst(usubst(t, f), g) == usubst(t, ucompose(f, g))


def test_support_examples():
    assert support(Var(3)) == 4
    assert support(ABS(Var(0))) == 0
    assert support(APP(Var(1), ABS(Var(2)))) == 2
    assert support_by_probes(APP(Var(1), ABS(Var(2)))) == 2


def test_support_agrees_with_probes_and_free_variables():
    for t in enumerate_raw(LC, 4, 6):
        fv = oracle_free(t)
        assert support(t) == support_by_probes(t) == (max(fv) + 1 if fv else 0)


def test_support_monotone_under_substitution():
    for f in list(_substs())[::3]:
        for t in enumerate_raw(LC, 3, 4):
            bound = max([support(f(i)) for i in oracle_free(t)] + [0])
            assert support(usubst(t, f)) <= bound


def test_conversions():
    assert to_scoped(Var(0)) == ScopedTerm(Var(0), 1)
    assert to_scoped(ABS(Var(0))) == ScopedTerm(ABS(Var(0)), 0)
    assert to_scoped(APP(Var(1), Var(0))).scope == 2
    assert to_unscoped(ScopedTerm(Var(2), 5)) == Var(2)
    for u in enumerate_raw(LC, 3, 6):
        assert to_unscoped(to_scoped(u)) == u
    for n in range(4):
        for t in enumerate_raw(LC, n, 5):
            s = ScopedTerm(t, n)
            back = to_scoped(to_unscoped(s))
            assert back.scope <= n and at_scope(back, n) == s
            if support(t) == n:
                assert back == s


def test_intersectionality():
    assert intersectionality_check(LC, 5).ok
    rep = intersectionality_check(BindingSignature.of(bin=[0, 0]), 5)
    assert rep.ok and all(a == b == 0 for _, a, b in rep.rows)
    rep = intersectionality_check(BindingSignature.of(c=[]), 3)
    assert rep.ok and rep.rows[0] == (1, 1, 1)
    with pytest.raises(ValueError):
        intersectionality_check(LC, 0)


def test_unscoped_syntax_laws():
    M = unscoped_syntax_model(LC)
    assert all(r.ok for r in check_debruijn_laws(M, samples=50))
    assert check_support_oracle(M, samples=50).ok


def test_transport_unscoped_is_scoped_syntax():
    Ms = transport_unscoped_model(unscoped_syntax_model(LC), samples=50)
    S = syntax_model(LC)
    for n in range(3):
        for t in enumerate_raw(LC, n, 5):
            v = fold(Ms, ScopedTerm(t, n))
            assert v == At(t, n)
            assert restricted_to_scoped(v) == fold(S, ScopedTerm(t, n))
            assert scoped_to_restricted(ScopedTerm(t, n)) == v
    assert all(r.ok for r in Ms.reports)


def _capturing_monad():
    base = unscoped_syntax_model(LC)

    def subst(v, f):
        def go(t, d):
            if type(t) is Var:
                return t if t.index < d else f(t.index - d)  # forgets to shift
            return Op(t.label, tuple(go(a, d + b) for a, b in zip(t.args, t.binders)), t.binders)

        return go(v, 0)

    return DeBruijnModel(LC, base.var, base.op, subst, base.support, show=base.show, name="capturing")


def test_transport_rejects_broken_monad():
    with pytest.raises(TransportError) as e:
        transport_unscoped_model(_capturing_monad(), samples=30)
    assert any(not r.ok for r in e.value.reports)
    assert "witness" in str(e.value)


def test_transport_rejects_unsound_support():
    base = unscoped_syntax_model(LC)
    lying = DeBruijnModel(LC, base.var, base.op, base.subst, lambda v: 0, show=base.show)
    with pytest.raises(TransportError):
        transport_unscoped_model(lying, samples=30)


def test_empty_model_policy():
    sig = BindingSignature.of(bin=[0, 0])
    M = unscoped_syntax_model(sig)
    with pytest.warns(UserWarning):
        transport_unscoped_model(M, samples=10)
    with pytest.raises(TransportError):
        transport_unscoped_model(M, samples=10, on_empty="error")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transport_unscoped_model(M, samples=10, on_empty="ignore")


def test_transport_scoped_is_unscoped_syntax():
    G = transport_scoped_model(syntax_model(LC), samples=30)
    for u in enumerate_raw(LC, 3, 5):
        c = ufold(G, u)
        assert glued_to_unscoped(c) == u
        assert c == unscoped_to_glued(u, syntax_model(LC))
        assert G.support(c) == support(u)
    assert all(r.ok for r in check_debruijn_laws(G, samples=20, max_nodes=2))


def test_colim_identifies_weakenings():
    S = syntax_model(LC)
    a = Colim(ScopedTerm(Var(0), 1), 1, S)
    b = Colim(ScopedTerm(Var(0), 3), 3, S)
    assert a == b
    assert a != Colim(ScopedTerm(Var(1), 2), 2, S)
    with pytest.raises(TypeError):
        hash(a)


def test_round_trip_transport():
    Mu = unscoped_syntax_model(LC)
    back = transport_scoped_model(transport_unscoped_model(Mu, samples=20), samples=20)
    for u in enumerate_raw(LC, 3, 5):
        c = ufold(back, u)
        assert c.value.value == u


def test_constant_family_model():
    # ignores scope entirely: every value is the label count
    from binders.models import Model

    def count(label, args, n):
        return 1 + sum(args)

    M = Model(LC, var=lambda i, n: 0, op=count, subst=lambda v, images, n: v, name="const")
    G = transport_scoped_model(M, samples=10)
    c = ufold(G, APP(Var(3), ABS(Var(0))))
    assert c.value == 2
    assert c.at(c.scope + 4) == 2
