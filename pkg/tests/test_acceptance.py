"""Acceptance criteria 1 to 10, one test each.

Each test prints ``ACCEPTANCE k PASS|FAIL detail`` (see conftest.py) and the
lines are repeated in the terminal summary. Tolerances are pinned here:

* criterion 1 runtime budget: 60 s wall clock for the whole criterion
* criterion 2 broken-model witness: at most 5 nodes
* criterion 8 fuel: 10000 beta steps
* random suites: seed 42, 1000 samples
"""

import os
import random
import time

import pytest

from binders.models import (
    broken_model,
    check_fold_morphism,
    check_substitution_laws,
    fold,
    random_substitution_laws,
    swap_model,
    syntax_model,
)
from binders.representations import (
    At,
    check_debruijn_laws,
    check_support_oracle,
    glued_to_unscoped,
    intersectionality_check,
    restricted_to_scoped,
    scoped_to_restricted,
    support,
    support_by_probes,
    to_scoped,
    to_unscoped,
    transport_scoped_model,
    transport_unscoped_model,
    ufold,
    unscoped_syntax_model,
    unscoped_to_glued,
)
from binders.signature import LC, NAT, BOOL, PCF, ULC, BindingSignature, Label, SigMorphism, check_morphism, to_binding_signature
from binders.syntax import ScopedTerm, enumerate_raw, max_free
from binders.typed import TypeCheckError, parse_typed, random_typed, typecheck, typed_substitute, typed_term
from binders.ulc import (
    CHURCH_IF,
    Y_COMB,
    app,
    beta_normalize,
    church_nat,
    erased_pcf_signature,
    lam,
    pcf_morphism,
    pcf_to_ulc,
)
from binders.syntax import Var

from cli_cases import CASES, golden_path, run_case

SEED = 42
SAMPLES = 1000
RUNTIME_BUDGET_S = 60.0
WITNESS_MAX_NODES = 5
FUEL = 10_000
NODES = 6
DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def _note(request, text):
    request.node.user_properties.append(("detail", text))


def _all_ok(reports):
    return all(r.ok for r in reports), sum(r.samples for r in reports)


@pytest.mark.criterion(1)
def test_monoid_and_debruijn_laws(request):
    start = time.perf_counter()
    pcf_untyped = to_binding_signature(erased_pcf_signature(), 1)
    suites = {
        "lc-exhaustive": check_substitution_laws(LC, max_nodes=5, subst_nodes=3, max_scope=2),
        "lc-random": random_substitution_laws(LC, SAMPLES, SEED),
        "pcf-random": random_substitution_laws(pcf_untyped, SAMPLES, SEED),
        "lc-debruijn": check_debruijn_laws(unscoped_syntax_model(LC), SAMPLES, SEED),
        "pcf-debruijn": check_debruijn_laws(unscoped_syntax_model(pcf_untyped), SAMPLES, SEED, max_nodes=2),
    }
    elapsed = time.perf_counter() - start
    failing = [name for name, reps in suites.items() if not _all_ok(reps)[0]]
    checked = sum(_all_ok(reps)[1] for reps in suites.values())
    _note(request, f"checks={checked} failing={failing or 'none'} runtime={elapsed:.1f}s budget={RUNTIME_BUDGET_S:.0f}s")
    assert not failing
    assert elapsed < RUNTIME_BUDGET_S


@pytest.mark.criterion(2)
def test_fold_is_a_morphism(request):
    reps = {name: check_fold_morphism(M, max_nodes=5, subst_nodes=3, samples=SAMPLES, seed=SEED)
            for name, M in (("syntax", syntax_model(LC)), ("swap", swap_model()))}
    broken = check_fold_morphism(broken_model(LC), max_nodes=5, subst_nodes=3, samples=SAMPLES, seed=SEED)
    witness = broken.failures[0][0] if broken.failures else None
    _note(request, " ".join(f"{k}={'ok' if r.ok else 'FAIL'}(n={r.samples})" for k, r in reps.items())
          + f" broken-witness-nodes={witness.nodes if witness else 'none'}")
    assert all(r.ok for r in reps.values())
    assert not broken.ok and witness.nodes <= WITNESS_MAX_NODES


def _scoped_terms(max_scope=3):
    for n in range(max_scope + 1):
        for t in enumerate_raw(LC, n, NODES):
            yield ScopedTerm(t, n)


@pytest.mark.criterion(3)
def test_round_trips(request):
    unscoped = enumerate_raw(LC, 3, NODES)
    assert all(to_unscoped(to_scoped(u)) == u for u in unscoped)
    minimal = [s for s in _scoped_terms() if support(s.term) == s.scope]
    assert all(to_scoped(to_unscoped(s)) == s for s in minimal)

    # unscoped -> scoped -> unscoped transport: folding syntax gives back the term, injectively
    Mu = unscoped_syntax_model(LC)
    there_and_back = transport_scoped_model(transport_unscoped_model(Mu, seed=SEED), seed=SEED)
    images = [ufold(there_and_back, u) for u in unscoped]
    assert [c.value.value for c in images] == unscoped

    # scoped -> unscoped -> scoped transport
    Ms = syntax_model(LC)
    other_way = transport_unscoped_model(transport_scoped_model(Ms, seed=SEED), seed=SEED, on_empty="ignore")
    scoped = list(_scoped_terms(2))
    for s in scoped:
        v = fold(other_way, s)
        assert v.value.at(s.scope) == s
    _note(request, f"unscoped={len(unscoped)} minimal-scoped={len(minimal)} transported-scoped={len(scoped)} nodes<={NODES}")


@pytest.mark.criterion(4)
def test_transported_syntax_is_isomorphic(request):
    Ms = transport_unscoped_model(unscoped_syntax_model(LC), seed=SEED)
    scoped = list(_scoped_terms(2))
    for s in scoped:
        v = fold(Ms, s)
        assert v == scoped_to_restricted(s) and isinstance(v, At)
        assert restricted_to_scoped(v) == s
        assert scoped_to_restricted(restricted_to_scoped(v)) == v

    S = syntax_model(LC)
    G = transport_scoped_model(S, seed=SEED)
    unscoped = enumerate_raw(LC, 3, NODES)
    for u in unscoped:
        c = ufold(G, u)
        assert c == unscoped_to_glued(u, S)
        assert glued_to_unscoped(c) == u
        assert unscoped_to_glued(glued_to_unscoped(c), S) == c
    _note(request, f"scoped={len(scoped)} unscoped={len(unscoped)} nodes<={NODES}")


@pytest.mark.criterion(5)
def test_support_oracle(request):
    terms = enumerate_raw(LC, 3, NODES)
    bad = [u for u in terms if support(u) != support_by_probes(u) or support(u) != max_free(u)]
    rep = check_support_oracle(unscoped_syntax_model(LC), SAMPLES, SEED)
    _note(request, f"terms={len(terms)} disagreements={len(bad)} model-check={'ok' if rep.ok else 'FAIL'}")
    assert not bad and rep.ok


@pytest.mark.criterion(6)
def test_intersectionality(request):
    sigs = {
        "lc": LC,
        "ulc-shaped": to_binding_signature(ULC, 1),
        "bin": BindingSignature.of(bin=[0, 0]),
    }
    reps = {k: intersectionality_check(s, NODES) for k, s in sigs.items()}
    _note(request, " ".join(f"{k}={'ok' if r.ok else 'FAIL'}" for k, r in reps.items()) + f" nodes<={NODES}")
    assert all(r.ok for r in reps.values())
    assert all(a == b for r in reps.values() for _, a, b in r.rows)
    assert all(a == b == 0 for _, a, b in reps["bin"].rows)
    assert [a for _, a, _ in reps["lc"].rows] == [0, 1, 2, 4, 13, 42]


@pytest.mark.criterion(7)
def test_signature_morphism(request):
    target = erased_pcf_signature()
    good = check_morphism(pcf_morphism(), PCF, target, 3)
    swapped = SigMorphism(pcf_morphism().type_map,
                          lambda lbl: Label("abs" if lbl.name == "app" else lbl.name, lbl.params))
    bad = check_morphism(swapped, PCF, target, 3)
    _note(request, f"good={good.lines()[0]} bad-violations={len(bad.violations)}")
    assert good.ok and good.depth == 3
    assert not bad.ok and bad.violations


def _pcf(text, ctx=()):
    return typed_term(PCF, ctx, parse_typed(PCF, text))


@pytest.mark.criterion(8)
def test_pcf_to_ulc_goldens(request):
    assert pcf_to_ulc(_pcf("(op true ())")) == lam(lam(Var(1)))

    if_nat = pcf_to_ulc(_pcf("(op if_nat ())"))
    assert if_nat == CHURCH_IF == lam(lam(lam(app(Var(2), Var(1), Var(0)))))
    tru, fls = pcf_to_ulc(_pcf("(op true ())")), pcf_to_ulc(_pcf("(op false ())"))
    x, y = church_nat(1), church_nat(2)
    for b in (tru, fls):
        assert beta_normalize(app(if_nat, b, x, y)) == beta_normalize(app(b, x, y))

    u = "(op abs (nat nat) (op app (nat nat) (op succ ()) (var 0)))"
    fixed = pcf_to_ulc(_pcf(f"(op fix (nat) {u})"))
    assert fixed == app(Y_COMB, pcf_to_ulc(_pcf(u)))

    with open(os.path.join(DATA, "pcf_if.txt")) as fh:
        cond = pcf_to_ulc(_pcf(fh.read()))
    assert beta_normalize(cond, FUEL) == church_nat(0)

    with open(os.path.join(DATA, "pcf_ctx.txt")) as fh:
        open_term = pcf_to_ulc(_pcf(fh.read(), (NAT, BOOL)))
    assert support(open_term) <= 2
    _note(request, f"if-true-0-succ0 normal form=church 0 fuel={FUEL} open-support={support(open_term)}")


@pytest.mark.criterion(9)
def test_typed_subject_substitution(request):
    from binders.signature import arrow

    rng = random.Random(SEED)
    pool = [NAT, BOOL, arrow(NAT, NAT), arrow(NAT, BOOL)]
    failures = 0
    for _ in range(SAMPLES):
        g = tuple(rng.choice(pool) for _ in range(rng.randint(0, 3)))
        d = tuple(rng.choice(pool) for _ in range(rng.randint(0, 3)))
        ty = rng.choice(pool)
        t = typed_term(PCF, g, random_typed(PCF, g, ty, rng, 10))
        sigma = [typed_term(PCF, d, random_typed(PCF, d, a, rng, 6)) for a in g]
        r = typed_substitute(t, sigma, d)
        try:
            if typecheck(PCF, d, r.tree) != ty or r.ty != ty:
                failures += 1
        except TypeCheckError:
            failures += 1
    _note(request, f"samples={SAMPLES} seed={SEED} failures={failures}")
    assert failures == 0


@pytest.mark.criterion(10)
def test_cli_determinism(request):
    mismatched = []
    for name in sorted(CASES):
        first, second = run_case(name), run_case(name)
        with open(golden_path(name), "rb") as fh:
            golden = fh.read()
        if first != second or first[1] != golden or first[0] != CASES[name][1]:
            mismatched.append(name)
    _note(request, f"cases={len(CASES)} runs=2 mismatched={mismatched or 'none'}")
    assert not mismatched
