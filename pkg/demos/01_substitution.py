"""Scoped terms and simultaneous substitution on the lambda calculus.

Run: python demos/01_substitution.py
"""

from binders.signature import LC, print_signature
from binders.syntax import (
    compose_subst,
    count_terms,
    identity_subst,
    lift_subst,
    parse_scoped,
    parse_term,
    print_term,
    substitute,
    Subst,
)

print("signature:", print_signature(LC))

# a term with one free variable, index 0
t = parse_scoped(LC, "(app (var 0) (abs (var 0)))", 1)
print("t          =", t)

# replace var 0 by the closed identity function
closed = Subst((parse_term(LC, "(abs (var 0))"),), 0)
print("t[id]      =", substitute(t, closed))

# under a binder the substitution is lifted: bound index 0 stays put and
# the image gets shifted past it
u = parse_term(LC, "(app (var 0) (var 1))")
under = parse_scoped(LC, "(abs (var 1))", 1)
print("lift by 1  =", [print_term(x) for x in lift_subst(Subst((u,), 2), 1).images])
print("(abs 1)[u] =", substitute(under, Subst((u,), 2)))

# associativity: substituting twice equals substituting once by the composite
s = Subst((u,), 2)
d = Subst((parse_term(LC, "(abs (var 0))"), parse_term(LC, "(var 0)")), 1)
twice = substitute(substitute(t, s), d)
once = substitute(t, compose_subst(s, d))
print("t[s][d]    =", twice)
print("t[s;d]     =", once, "(equal)" if twice == once else "(DIFFERENT)")
print("t[ident]   =", substitute(t, identity_subst(1)))

print("closed terms by size:", [count_terms(LC, 0, k) for k in range(1, 9)])
