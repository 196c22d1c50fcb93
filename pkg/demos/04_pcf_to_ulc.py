"""Type-erasing PCF into the untyped lambda calculus with Church encodings.

Run: python demos/04_pcf_to_ulc.py
"""

from binders.signature import BOOL, NAT, PCF, check_morphism
from binders.syntax import print_term
from binders.typed import parse_typed, print_typed, typecheck, typed_term
from binders.ulc import (
    FuelExhausted,
    beta_normalize,
    church_nat,
    erased_pcf_signature,
    pcf_morphism,
    pcf_to_ulc,
)

report = check_morphism(pcf_morphism(), PCF, erased_pcf_signature(), 3)
print(report.lines()[0])


def show(text, ctx=()):
    tree = parse_typed(PCF, text)
    t = typed_term(PCF, ctx, tree)
    print("\nPCF :", print_typed(tree), ":", typecheck(PCF, ctx, tree))
    u = pcf_to_ulc(t)
    print("ULC :", print_term(u))
    try:
        print("nf  :", print_term(beta_normalize(u, 2000)))
    except FuelExhausted as e:
        print("nf  : FUEL-EXHAUSTED after", e.steps, "steps")


show("(op true ())")
show("(op app (nat nat) (op succ ()) (op zero ()))")
show("(op app (nat nat) (op pred ()) (op app (nat nat) (op succ ()) (op app (nat nat) (op succ ()) (op zero ()))))")
show("(op app (nat nat) (op app ((=> nat nat) nat) (op app ((=> nat (=> nat nat)) bool)"
     " (op if_nat ()) (op false ())) (op zero ())) (op app (nat nat) (op succ ()) (op zero ())))")
show("(op fix (nat) (op abs (nat nat) (op app (nat nat) (op succ ()) (var 0))))")
# open terms keep their free variables; erasure never adds any
show("(op app (nat nat) (op succ ()) (var 0))", (NAT, BOOL))

print("\nChurch numeral 2:", print_term(church_nat(2)))
