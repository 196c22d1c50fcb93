"""Abstract syntax with variable binding over arbitrary binding signatures."""

__version__ = "0.1.0"

from .models import Model, LawReport, check_fold_morphism, check_model_laws, fold, syntax_model
from .representations import (
    UnscopedSubst,
    intersectionality_check,
    support,
    to_scoped,
    to_unscoped,
    ucompose,
    usubst,
)
from .signature import (
    LC,
    PCF,
    ULC,
    BindingSignature,
    TypedSignature,
    builtin_signatures,
    check_morphism,
    parse_signature,
    retype_arity,
    retype_signature,
)
from .syntax import (
    ScopedTerm,
    Subst,
    compose_subst,
    enumerate_terms,
    identity_subst,
    lift_subst,
    mk_op,
    mk_var,
    rename,
    substitute,
    weaken,
)
from .typed import TypedTerm, translate, typecheck, typed_fold, typed_substitute
from .ulc import beta_normalize, pcf_to_ulc, ulc_stdlib
