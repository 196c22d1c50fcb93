"""Folding syntax into models, and catching a model that breaks the laws.

Run: python demos/02_folds.py
"""

from binders.models import (
    broken_model,
    check_fold_morphism,
    check_model_laws,
    fold,
    free_variable_model,
    swap_model,
    syntax_model,
)
from binders.signature import LC
from binders.syntax import parse_scoped

t = parse_scoped(LC, "(app (var 0) (abs (app (var 0) (var 2))))", 2)
print("term:", t)
for M in (syntax_model(LC), swap_model(), free_variable_model(LC)):
    print(f"  fold into {M.name:<8}", M.show(fold(M, t)))

print("\nlaw reports for the swap model:")
for rep in check_model_laws(swap_model(), samples=200):
    print("  " + rep.lines()[0])
print("  " + check_fold_morphism(swap_model(), samples=200).lines()[0])

# this model substitutes without shifting under binders
print("\nthe capturing model is rejected with a small witness:")
bad = check_fold_morphism(broken_model(LC), samples=200)
for line in bad.lines()[:4]:
    print("  " + line)
