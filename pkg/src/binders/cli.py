"""Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage or parse error."""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .models import (
    broken_model,
    check_fold_morphism,
    check_model_laws,
    check_substitution_laws,
    fold,
    free_variable_model,
    random_substitution_laws,
    swap_model,
    syntax_model,
)
from .representations import (
    TransportError,
    check_debruijn_laws,
    check_support_oracle,
    intersectionality_check,
    support,
    to_scoped,
    unscoped_syntax_model,
)
from .sexpr import SexprError, parse_all
from .signature import (
    LC,
    PCF,
    BindingSignature,
    SignatureError,
    parse_signature,
    parse_typed_signature,
    to_binding_signature,
)
from .syntax import ScopedTerm, ScopeError, Subst, parse_term, print_term, enumerate_raw, substitute
from .typed import TypeCheckError, parse_context, parse_typed, print_typed, typed_term
from .ulc import FuelExhausted, beta_normalize, erased_pcf_signature, pcf_to_ulc

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    """A literal s-expression, or the contents of the file it names."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    if arg.lstrip().startswith("("):
        return arg
    raise UsageError(f"no such file: {arg}")


def load_signature(arg: str) -> BindingSignature:
    """A built-in name (``lc``, ``ulc``, ``pcf``) or a signature file."""
    if arg in ("lc", "ulc"):
        return LC
    if arg == "pcf":
        return to_binding_signature(erased_pcf_signature(), 1)
    text = _text(arg)
    if text.lstrip().startswith("(tysig"):
        return to_binding_signature(parse_typed_signature(text), 1)
    return parse_signature(text)


def _emit(lines):
    for line in lines:
        sys.stdout.write(line + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_laws(a) -> int:
    sig = load_signature(a.signature)
    reports = []
    reports += random_substitution_laws(sig, samples=a.samples, seed=a.seed)
    reports += check_substitution_laws(sig, max_nodes=a.max_nodes, subst_nodes=a.subst_nodes)
    model = syntax_model(sig)
    bounds = dict(samples=a.samples, seed=a.seed, max_nodes=a.max_nodes)
    reports += check_model_laws(model, subst_nodes=a.subst_nodes, **bounds)
    reports.append(check_fold_morphism(model, subst_nodes=a.subst_nodes, **bounds))
    unscoped = unscoped_syntax_model(sig)
    reports += check_debruijn_laws(unscoped, **bounds)
    reports.append(check_support_oracle(unscoped, **bounds))
    for r in reports:
        _emit(r.lines())
    ok = all(r.ok for r in reports)
    if len(sig):
        inter = intersectionality_check(sig, a.max_nodes)
        _emit(inter.lines())
        ok = ok and inter.ok
    _emit([f"SUMMARY {'PASS' if ok else 'FAIL'} reports={len(reports) + (1 if len(sig) else 0)}"])
    return 0 if ok else 1


def cmd_subst(a) -> int:
    sig = load_signature(a.signature)
    t = ScopedTerm(parse_term(sig, _text(a.term)), a.scope)
    entries = [parse_term(sig, node) for node in parse_all(_text(a.subst))]
    target = a.target_scope
    if target is None:
        target = max((support(u) for u in entries), default=0)
    sigma = Subst.of([ScopedTerm(u, target) for u in entries], target)
    _emit([print_term(substitute(t, sigma))])
    return 0


def cmd_convert(a) -> int:
    sig = load_signature(a.signature)
    tree = parse_term(sig, _text(a.term))
    if a.to == "scoped":
        t = to_scoped(tree)
        _emit([print_term(t), f"scope {t.scope}"])
    else:
        if a.scope is None:
            raise UsageError("--scope is required when converting a scoped term")
        _emit([print_term(ScopedTerm(tree, a.scope).term)])
    return 0


MODELS = {
    "syntax": syntax_model,
    "swap": lambda sig: swap_model(),
    "fv": free_variable_model,
    "broken": broken_model,
}


def cmd_fold(a) -> int:
    sig = load_signature(a.signature)
    if a.model == "swap" and sig != LC:
        raise SignatureError("the swap model is defined for the lc signature only")
    model = MODELS[a.model](sig)
    t = ScopedTerm(parse_term(sig, _text(a.term)), a.scope)
    _emit([model.show(fold(model, t))])
    return 0


def cmd_translate(a) -> int:
    if a.source != "pcf" or a.target != "ulc":
        raise UsageError("only --from pcf --to ulc is supported")
    ctx = parse_context(a.ctx or "")
    tree = parse_typed(PCF, _text(a.term))
    t = typed_term(PCF, ctx, tree)
    u = pcf_to_ulc(t)
    if not a.normalize:
        _emit([print_term(u)])
        return 0
    try:
        _emit([print_term(beta_normalize(u, a.fuel))])
    except FuelExhausted:
        _emit(["FUEL-EXHAUSTED"])
    return 0


def cmd_typecheck(a) -> int:
    ctx = parse_context(a.ctx or "")
    t = typed_term(PCF, ctx, parse_typed(PCF, _text(a.term)))
    _emit([print_typed(t.tree), f"type {t.ty}"])
    return 0


def cmd_enumerate(a) -> int:
    sig = load_signature(a.signature)
    if a.max_nodes < 1:
        raise UsageError("--max-nodes must be at least 1")
    terms = enumerate_raw(sig, a.scope, a.max_nodes)
    _emit([print_term(t) for t in terms] + [f"count {len(terms)}"])
    return 0


def cmd_intersect(a) -> int:
    sig = load_signature(a.signature)
    if a.max_nodes < 1:
        raise UsageError("--max-nodes must be at least 1")
    rep = intersectionality_check(sig, a.max_nodes)
    _emit(rep.lines())
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _nat(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return v


def _positive(text: str) -> int:
    v = _nat(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binders", description="Syntax with binders: substitution, folds, conversions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sig_help = "signature file, or one of: lc, ulc, pcf"

    s = sub.add_parser("laws", help="run the law suites on a signature")
    s.add_argument("signature", help=sig_help)
    s.add_argument("--samples", type=_positive, default=1000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--max-nodes", type=_positive, default=3)
    s.add_argument("--subst-nodes", type=_positive, default=2)
    s.set_defaults(run=cmd_laws)

    s = sub.add_parser("subst", help="apply a substitution to a term")
    s.add_argument("signature", help=sig_help)
    s.add_argument("term", help="term s-expression or file")
    s.add_argument("subst", help="file of whitespace-separated terms (or a literal)")
    s.add_argument("--scope", type=_nat, required=True)
    s.add_argument("--target-scope", type=_nat)
    s.set_defaults(run=cmd_subst)

    s = sub.add_parser("convert", help="move a term between scoped and unscoped form")
    s.add_argument("signature", help=sig_help)
    s.add_argument("term", help="term s-expression or file")
    s.add_argument("--to", choices=("scoped", "unscoped"), required=True)
    s.add_argument("--scope", type=_nat, help="scope of the input when converting to unscoped")
    s.set_defaults(run=cmd_convert)

    s = sub.add_parser("fold", help="fold a term into a reference model")
    s.add_argument("signature", help=sig_help)
    s.add_argument("term", help="term s-expression or file")
    s.add_argument("--scope", type=_nat, required=True)
    s.add_argument("--model", choices=sorted(MODELS), default="syntax")
    s.set_defaults(run=cmd_fold)

    s = sub.add_parser("translate", help="translate a typed term into another language")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--term", required=True, help="typed term s-expression or file")
    s.add_argument("--ctx", default="", help='context types, index 0 first, e.g. "nat bool"')
    s.add_argument("--normalize", action="store_true")
    s.add_argument("--fuel", type=_nat, default=10_000)
    s.set_defaults(run=cmd_translate)

    s = sub.add_parser("typecheck", help="type a PCF term")
    s.add_argument("--term", required=True)
    s.add_argument("--ctx", default="")
    s.set_defaults(run=cmd_typecheck)

    s = sub.add_parser("enumerate", help="list every term up to a size")
    s.add_argument("signature", help=sig_help)
    s.add_argument("--scope", type=_nat, default=0)
    s.add_argument("--max-nodes", type=int, required=True)
    s.set_defaults(run=cmd_enumerate)

    s = sub.add_parser("intersect-check", help="compare closed terms with the scope-1 equalizer")
    s.add_argument("signature", help=sig_help)
    s.add_argument("--max-nodes", type=int, default=6)
    s.set_defaults(run=cmd_intersect)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (SexprError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TypeCheckError as e:
        print(f"type error: {e}", file=sys.stderr)
        return 1
    except (ScopeError, SignatureError, TransportError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
