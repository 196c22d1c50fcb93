"""Scoped and unscoped terms, supports, and moving models between the two.

Run: python demos/03_representations.py
"""

from binders.models import fold, syntax_model
from binders.representations import (
    ETA,
    UnscopedSubst,
    intersectionality_check,
    support,
    support_by_probes,
    to_scoped,
    to_unscoped,
    transport_scoped_model,
    transport_unscoped_model,
    ucompose,
    ufold,
    unscoped_syntax_model,
    usubst,
)
from binders.signature import LC
from binders.syntax import ScopedTerm, parse_term, print_term

u = parse_term(LC, "(app (var 1) (abs (var 3)))")
print("unscoped term:", print_term(u))
print("  support (max free index + 1):", support(u))
print("  support by renaming probes:  ", support_by_probes(u))
print("  as a scoped term:            ", to_scoped(u))
print("  and back:                    ", print_term(to_unscoped(to_scoped(u))))

# an unscoped substitution is a finite prefix followed by a shift
f = UnscopedSubst((parse_term(LC, "(abs (var 0))"),), 2)
print("\nf = prefix [(abs (var 0))] then shift by 2; f(0..3) =",
      [print_term(f(i)) for i in range(4)])
print("u[f]      =", print_term(usubst(u, f)))
print("u[f][f]   =", print_term(usubst(usubst(u, f), f)))
print("u[f;f]    =", print_term(usubst(u, ucompose(f, f))))
print("u[eta]    =", print_term(usubst(u, ETA)))

print("\nunscoped syntax restricted to scopes:")
Ms = transport_unscoped_model(unscoped_syntax_model(LC), samples=100)
s = ScopedTerm(parse_term(LC, "(abs (app (var 0) (var 1)))"), 1)
v = fold(Ms, s)
print("  fold", s, "-> value", print_term(v.value), "at scope", v.scope)

print("scoped syntax glued into one unscoped model:")
G = transport_scoped_model(syntax_model(LC), samples=50)
print("  ufold", print_term(u), "->", ufold(G, u))

print("\nclosed terms versus the equalizer, by size:")
for line in intersectionality_check(LC, 6).lines():
    print("  " + line)
