"""Binding signatures, simply-typed signatures, retyping and signature morphisms."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from . import sexpr
from .sexpr import SexprError


class SignatureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# untyped binding signatures


@dataclass(frozen=True)
class BindingSignature(Mapping):
    """Ordered map from constructor label to its binder list.

    ``sig["abs"] == (1,)`` says that ``abs`` has one argument binding one
    variable. Iteration follows declaration order.
    """

    arities: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        seen = set()
        for label, binders in self.arities:
            if label in seen:
                raise SignatureError(f"duplicate label {label!r}")
            if any(b < 0 for b in binders):
                raise SignatureError(f"negative binder count in {label!r}")
            seen.add(label)

    @classmethod
    def of(cls, **arities) -> BindingSignature:
        return cls(tuple((k, tuple(v)) for k, v in arities.items()))

    @cached_property
    def _table(self) -> dict[str, tuple[int, ...]]:
        return dict(self.arities)

    def __getitem__(self, label: str) -> tuple[int, ...]:
        try:
            return self._table[label]
        except KeyError:
            raise SignatureError(f"unknown label {label!r}") from None

    def __iter__(self):
        return (label for label, _ in self.arities)

    def __len__(self):
        return len(self.arities)

    def __hash__(self):
        return hash(self.arities)

    def __eq__(self, other):
        if isinstance(other, BindingSignature):
            return self.arities == other.arities
        return NotImplemented

    def __repr__(self):
        body = ", ".join(f"{k}:{list(v)}" for k, v in self.arities)
        return "{" + body + "}"


def parse_signature(text: str) -> BindingSignature:
    """Read ``(sig (<label> <n1> <n2> ...) ...)``."""
    form = sexpr.parse_one(text)
    if not isinstance(form, list) or not form or form[0] != "sig":
        raise sexpr.fail("expected (sig ...)", form)
    arities = []
    seen = set()
    for entry in form[1:]:
        if not isinstance(entry, list) or not entry or isinstance(entry[0], list):
            raise sexpr.fail("expected (<label> <n>...)", entry)
        label = str(entry[0])
        if label == "var":
            raise sexpr.fail("'var' is reserved for variables", entry[0])
        if label in seen:
            raise sexpr.fail(f"duplicate label {label!r}", entry[0])
        seen.add(label)
        counts = []
        for n in entry[1:]:
            if not isinstance(n, list) and str(n).startswith("-") and str(n)[1:].isdigit():
                raise sexpr.fail(f"negative binder count {n} for {label!r}", n)
            counts.append(sexpr.nat(n, "binder count"))
        arities.append((label, tuple(counts)))
    return BindingSignature(tuple(arities))


def print_signature(sig: BindingSignature) -> str:
    parts = ["(" + " ".join([label, *map(str, b)]) + ")" for label, b in sig.arities]
    return "(sig" + "".join(" " + p for p in parts) + ")\n"


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TypeExpr:
    """A type: a base name (no args) or a constructor applied to types."""

    name: str
    args: tuple[TypeExpr, ...] = ()

    def __str__(self):
        return print_type(self)

    @property
    def depth(self) -> int:
        return 1 + max((a.depth for a in self.args), default=0)


def base(name: str) -> TypeExpr:
    return TypeExpr(name)


def arrow(*types: TypeExpr) -> TypeExpr:
    """Right-nested arrow: ``arrow(a, b, c)`` is ``a => (b => c)``."""
    *dom, res = types
    for t in reversed(dom):
        res = TypeExpr("=>", (t, res))
    return res


BOOL, NAT, STAR = base("bool"), base("nat"), base("star")


def print_type(t: TypeExpr) -> str:
    if not t.args:
        return t.name
    return "(" + " ".join([t.name, *(print_type(a) for a in t.args)]) + ")"


def parse_type(node) -> TypeExpr:
    """Read a type from a parsed node or from source text like ``(=> nat bool)``."""
    if isinstance(node, str) and not isinstance(node, sexpr.Atom):
        node = sexpr.parse_one(node)
    if isinstance(node, list):
        if not node or isinstance(node[0], list):
            raise sexpr.fail("malformed type", node)
        return TypeExpr(str(node[0]), tuple(parse_type(a) for a in node[1:]))
    return TypeExpr(str(node))


@dataclass(frozen=True)
class TypeGrammar:
    """Base types plus type constructors with their arities.

    ``admissible`` optionally narrows the generated set further (a grammar
    where some base type may not appear under a constructor, say).
    """

    bases: tuple[str, ...]
    constructors: tuple[tuple[str, int], ...] = ()
    admissible: Callable[[TypeExpr], bool] | None = field(default=None, compare=False)

    def well_formed(self, t: TypeExpr) -> bool:
        ok = self._shape_ok(t)
        return ok and (self.admissible is None or self.admissible(t))

    def _shape_ok(self, t: TypeExpr) -> bool:
        if not t.args:
            return t.name in self.bases
        arity = dict(self.constructors).get(t.name)
        return arity == len(t.args) and all(self._shape_ok(a) for a in t.args)

    def types(self, depth: int) -> list[TypeExpr]:
        """All well-formed types of depth at most ``depth``, shallow first."""
        levels: list[list[TypeExpr]] = [[base(b) for b in self.bases]]
        for _ in range(depth - 1):
            known = [t for lvl in levels for t in lvl]
            new = []
            for name, n in self.constructors:
                for args in itertools.product(known, repeat=n):
                    if max(a.depth for a in args) == len(levels):
                        new.append(TypeExpr(name, args))
            levels.append(new)
        return [t for lvl in levels for t in lvl if self.well_formed(t)]


PCF_TYPES = TypeGrammar(("bool", "nat"), (("=>", 2),))
ULC_TYPES = TypeGrammar(("star",))


# ---------------------------------------------------------------------------
# simply-typed arities and signatures


@dataclass(frozen=True)
class TypedArity:
    """``t1^(u1...) x ... x tn^(un...) -> result``.

    Each entry of ``args`` is ``(bound_types, arg_type)``.
    """

    args: tuple[tuple[tuple[TypeExpr, ...], TypeExpr], ...]
    result: TypeExpr

    def types(self) -> Iterator[TypeExpr]:
        for bound, ty in self.args:
            yield from bound
            yield ty
        yield self.result

    def __str__(self):
        def one(bound, ty):
            if not bound:
                return print_type(ty)
            return f"{print_type(ty)}^({' '.join(map(print_type, bound))})"

        lhs = " x ".join(one(b, t) for b, t in self.args) or "()"
        return f"{lhs} -> {print_type(self.result)}"


def typed_arity(args=(), result: TypeExpr = STAR) -> TypedArity:
    return TypedArity(tuple((tuple(b), t) for b, t in args), result)


@dataclass(frozen=True)
class Label:
    name: str
    params: tuple[TypeExpr, ...] = ()

    def __str__(self):
        if not self.params:
            return self.name
        return f"{self.name}[{','.join(map(print_type, self.params))}]"


@dataclass(frozen=True)
class OpFamily:
    """A family of labels sharing a name, indexed by type parameters.

    ``arity`` receives the parameters positionally. ``params_ok`` narrows the
    index set (``if`` only exists at bool and nat).
    """

    name: str
    n_params: int
    arity: Callable[..., TypedArity] = field(compare=False)
    param_grammar: TypeGrammar | None = field(default=None, compare=False)
    params_ok: Callable[..., bool] | None = field(default=None, compare=False)


@dataclass(frozen=True, eq=False)
class TypedSignature:
    """A simply-typed binding signature over a (possibly infinite) type set."""

    types: TypeGrammar
    families: tuple[OpFamily, ...]
    name: str = ""

    @cached_property
    def _by_name(self) -> dict[str, OpFamily]:
        return {f.name: f for f in self.families}

    def family(self, name: str) -> OpFamily:
        try:
            return self._by_name[name]
        except KeyError:
            raise SignatureError(f"unknown label {name!r}") from None

    def has_label(self, label: Label) -> bool:
        fam = self._by_name.get(label.name)
        return fam is not None and self._params_valid(fam, label.params)

    def _params_valid(self, fam: OpFamily, params) -> bool:
        grammar = fam.param_grammar or self.types
        return (
            len(params) == fam.n_params
            and all(grammar.well_formed(p) for p in params)
            and (fam.params_ok is None or fam.params_ok(*params))
        )

    def arity_of(self, label: Label) -> TypedArity:
        fam = self.family(label.name)
        if not self._params_valid(fam, label.params):
            raise SignatureError(f"ill-formed label instance {label}")
        return fam.arity(*label.params)

    def labels(self, depth: int) -> Iterator[Label]:
        """Every label instance whose parameters have depth at most ``depth``."""
        for fam in self.families:
            grammar = fam.param_grammar or self.types
            pool = grammar.types(depth)
            for params in itertools.product(pool, repeat=fam.n_params):
                if fam.params_ok is None or fam.params_ok(*params):
                    yield Label(fam.name, params)

    def __repr__(self):
        return f"TypedSignature({self.name or '?'}: {[f.name for f in self.families]})"


def _const(arity: TypedArity):
    return lambda: arity


def _stlc_families(grammar: TypeGrammar, params_ok=None) -> tuple[OpFamily, ...]:
    return (
        OpFamily("app", 2, lambda s, t: typed_arity([((), arrow(t, s)), ((), t)], s),
                 params_ok=params_ok),
        OpFamily("abs", 2, lambda s, t: typed_arity([((t,), s)], arrow(t, s)),
                 params_ok=params_ok),
    )


def pcf_signature() -> TypedSignature:
    fams = _stlc_families(PCF_TYPES) + (
        OpFamily("true", 0, _const(typed_arity([], BOOL))),
        OpFamily("false", 0, _const(typed_arity([], BOOL))),
        OpFamily("zero", 0, _const(typed_arity([], NAT))),
        OpFamily("succ", 0, _const(typed_arity([], arrow(NAT, NAT)))),
        OpFamily("pred", 0, _const(typed_arity([], arrow(NAT, NAT)))),
        OpFamily("fix", 1, lambda t: typed_arity([((), arrow(t, t))], t)),
        OpFamily("if_bool", 0, _const(typed_arity([], arrow(BOOL, BOOL, BOOL, BOOL)))),
        OpFamily("if_nat", 0, _const(typed_arity([], arrow(BOOL, NAT, NAT, NAT)))),
    )
    return TypedSignature(PCF_TYPES, fams, "pcf")


def ulc_signature() -> TypedSignature:
    fams = (
        OpFamily("app", 0, _const(typed_arity([((), STAR), ((), STAR)], STAR))),
        OpFamily("abs", 0, _const(typed_arity([((STAR,), STAR)], STAR))),
    )
    return TypedSignature(ULC_TYPES, fams, "ulc")


LC = BindingSignature.of(app=[0, 0], abs=[1])
PCF = pcf_signature()
ULC = ulc_signature()


def builtin_signatures() -> dict:
    return {"lc": LC, "pcf": PCF, "ulc": ULC}


def stlc_signature(grammar: TypeGrammar, arrow_ok=None, name="stlc") -> TypedSignature:
    """Application and abstraction at every admissible pair of types."""
    return TypedSignature(grammar, _stlc_families(grammar, arrow_ok), name)


def to_binding_signature(sig: TypedSignature, depth: int) -> BindingSignature:
    """View a signature over a one-type grammar as an untyped one.

    Only labels with parameters up to ``depth`` are kept; each label instance
    becomes its own constructor, named as ``str(label)``.
    """
    if len(sig.types.bases) != 1 or sig.types.constructors:
        raise SignatureError("only signatures over a single type can be untyped")
    return BindingSignature(tuple(
        (str(lbl), tuple(len(b) for b, _ in sig.arity_of(lbl).args))
        for lbl in sig.labels(depth)
    ))


# ---------------------------------------------------------------------------
# retyping and morphisms


@dataclass(frozen=True)
class TypeMap:
    """A function between type grammars."""

    source: TypeGrammar
    target: TypeGrammar
    fn: Callable[[TypeExpr], TypeExpr] = field(compare=False)

    def __call__(self, t: TypeExpr) -> TypeExpr:
        if not self.source.well_formed(t):
            raise SignatureError(f"type {t} is outside the source grammar")
        return self.fn(t)

    def then(self, other: TypeMap) -> TypeMap:
        return TypeMap(self.source, other.target, lambda t: other(self(t)))


def identity_map(grammar: TypeGrammar) -> TypeMap:
    return TypeMap(grammar, grammar, lambda t: t)


def constant_map(source: TypeGrammar, target: TypeGrammar, value: TypeExpr) -> TypeMap:
    return TypeMap(source, target, lambda t: value)


def retype_arity(g: TypeMap, a: TypedArity) -> TypedArity:
    return TypedArity(
        tuple((tuple(g(u) for u in bound), g(t)) for bound, t in a.args),
        g(a.result),
    )


def retype_signature(g: TypeMap, sig: TypedSignature) -> TypedSignature:
    """Same labels, every arity retyped along ``g``.

    Label parameters keep ranging over the old types, so the label set is
    unchanged.
    """
    fams = tuple(
        OpFamily(
            f.name,
            f.n_params,
            (lambda f: lambda *ps: retype_arity(g, f.arity(*ps)))(f),
            param_grammar=f.param_grammar or sig.types,
            params_ok=f.params_ok,
        )
        for f in sig.families
    )
    name = f"retyped({sig.name})" if sig.name else ""
    return TypedSignature(g.target, fams, name)


@dataclass(frozen=True)
class SigMorphism:
    type_map: TypeMap
    label_map: Callable[[Label], Label] = field(compare=False)


def identity_morphism(sig: TypedSignature) -> SigMorphism:
    return SigMorphism(identity_map(sig.types), lambda lbl: lbl)


@dataclass
class MorphismReport:
    depth: int
    checked: int = 0
    violations: list[tuple[Label, Label, TypedArity, TypedArity]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        status = "PASS" if self.ok else "FAIL"
        out = [f"MORPHISM {status} labels={self.checked} type-depth={self.depth}"]
        for src, dst, want, got in self.violations:
            out.append(f"  {src} -> {dst}: expected {want}, target has {got}")
        return out


def check_morphism(m: SigMorphism, source: TypedSignature, target: TypedSignature,
                   depth: int) -> MorphismReport:
    """Check arity compatibility on every label with parameters up to ``depth``."""
    if depth < 1:
        raise ValueError("type depth must be at least 1")
    report = MorphismReport(depth)
    for label in source.labels(depth):
        image = m.label_map(label)
        if not target.has_label(image):
            raise SignatureError(f"label map sends {label} to {image}, unknown to target")
        want = retype_arity(m.type_map, source.arity_of(label))
        got = target.arity_of(image)
        report.checked += 1
        if want != got:
            report.violations.append((label, image, want, got))
    return report


def check_label(m: SigMorphism, source: TypedSignature, target: TypedSignature,
                label: Label) -> None:
    image = m.label_map(label)
    if not target.has_label(image):
        raise SignatureError(f"label map sends {label} to {image}, unknown to target")
    want = retype_arity(m.type_map, source.arity_of(label))
    got = target.arity_of(image)
    if want != got:
        raise SignatureError(f"{label} -> {image}: expected {want}, target has {got}")


def collapse_to_star(sig: TypedSignature) -> SigMorphism:
    """Send every type to ``star`` and every label to itself."""
    return SigMorphism(constant_map(sig.types, ULC_TYPES, STAR), lambda lbl: lbl)


# ---------------------------------------------------------------------------
# custom typed signature files


def parse_typed_signature(text: str) -> TypedSignature:
    """Read ``(tysig (types <t>...) (op <label> (arg (<bound>...) <ty>)... <res>) ...)``.

    Only finite base-type grammars are supported here; labels carry no
    type parameters.
    """
    form = sexpr.parse_one(text)
    if not isinstance(form, list) or not form or form[0] != "tysig":
        raise sexpr.fail("expected (tysig ...)", form)
    if len(form) < 2 or not isinstance(form[1], list) or not form[1] or form[1][0] != "types":
        raise sexpr.fail("expected (types ...) first", form)
    bases = tuple(str(b) for b in form[1][1:])
    grammar = TypeGrammar(bases)
    fams, seen = [], set()
    for entry in form[2:]:
        if not isinstance(entry, list) or len(entry) < 3 or entry[0] != "op":
            raise sexpr.fail("expected (op <label> ... <result>)", entry)
        label = str(entry[1])
        if label in seen:
            raise sexpr.fail(f"duplicate label {label!r}", entry[1])
        seen.add(label)
        args = []
        for a in entry[2:-1]:
            if not isinstance(a, list) or len(a) != 3 or a[0] != "arg" or not isinstance(a[1], list):
                raise sexpr.fail("expected (arg (<bound>...) <type>)", a)
            args.append((tuple(_checked_type(grammar, b) for b in a[1]), _checked_type(grammar, a[2])))
        arity = typed_arity(args, _checked_type(grammar, entry[-1]))
        fams.append(OpFamily(label, 0, _const(arity)))
    return TypedSignature(grammar, tuple(fams))


def _checked_type(grammar: TypeGrammar, node) -> TypeExpr:
    t = parse_type(node)
    if not grammar.well_formed(t):
        raise sexpr.fail(f"type {t} not declared", node)
    return t


__all__ = [
    "BindingSignature", "SignatureError", "SexprError", "TypeExpr", "TypeGrammar",
    "TypedArity", "TypedSignature", "Label", "OpFamily", "TypeMap", "SigMorphism",
    "MorphismReport", "parse_signature", "print_signature", "parse_type", "print_type",
    "retype_arity", "retype_signature", "check_morphism", "builtin_signatures",
    "LC", "PCF", "ULC", "BOOL", "NAT", "STAR", "arrow", "base",
]
