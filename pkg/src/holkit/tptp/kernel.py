"""Conversion between TPTP syntax trees and kernel terms.

Quantifiers become the polymorphic constants ``!!`` (Π) and ``??`` (Σ)
applied to a type and an abstraction; ``<=>`` becomes equality at ``$o``.
CNF (and any other) formulas with free variables are universally closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..normalization import Strategy, beta_normalize, shift_term
from ..terms import (
    LOGIC,
    BoundVar,
    Constant,
    KernelTypeError,
    Redex,
    Root,
    Signature,
    SignatureError,
    Term,
    TermAbs,
    TypeAbs,
    mk_app,
)
from ..types import (
    TTYPE,
    TYPE_ID,
    TCons,
    TypeSubst,
    substitute_type,
    Arrow,
    BaseType,
    Forall,
    I,
    O,
    Type,
    TypeVar,
    arrows,
    instantiate_forall,
    shift_type,
    split_arrows,
)
from .ast import (
    AnnotatedFormula,
    Binary,
    Connective,
    Dialect,
    DistinctObject,
    Expr,
    Func,
    Number,
    Quantified,
    TypeDecl,
    TypedVar,
    Unary,
    Var,
    free_variables,
)
from .printer import format_problem

__all__ = [
    "ConversionError",
    "UndeclaredSymbol",
    "Unsupported",
    "TPTPTypeError",
    "DialectMismatch",
    "to_kernel",
    "type_to_kernel",
    "declare",
    "problem_to_kernel",
    "from_kernel",
    "type_from_kernel",
    "kernel_problem",
    "type_declarations",
    "convert_formula",
    "render_problem",
]

NOT, AND, OR, IMP, EQ = (LOGIC[k] for k in ("~", "&", "|", "=>", "="))
PI, SIGMA, TRUE, FALSE = LOGIC["!!"], LOGIC["??"], LOGIC["$true"], LOGIC["$false"]

_BUILTIN_TYPES = {"$o": O, "$i": I, "$tType": TTYPE}
_ARITH = ("$int", "$rat", "$real")


class ConversionError(ValueError):
    pass


class UndeclaredSymbol(ConversionError, KeyError):
    def __init__(self, symbol: str, location: str = "") -> None:
        self.symbol = symbol
        self.location = location
        where = f" in {location}" if location else ""
        ConversionError.__init__(self, f"undeclared symbol {symbol}{where}")

    __str__ = ConversionError.__str__


class Unsupported(ConversionError):
    pass


class TPTPTypeError(ConversionError, TypeError):
    def __init__(self, message: str, symbol: str = "", location: str = "") -> None:
        self.symbol = symbol
        self.location = location
        parts = [message]
        if symbol:
            parts.append(f"symbol {symbol}")
        if location:
            parts.append(f"in {location}")
        super().__init__(", ".join(parts))


class DialectMismatch(ConversionError):
    pass


# ---------------------------------------------------------------------------
# TPTP → kernel


@dataclass
class _Scope:
    # innermost first: (name, number of type binders at binding time, type)
    vars: tuple = ()
    tvars: tuple = ()

    def bind(self, name: str, ty: Type) -> _Scope:
        return _Scope(((name, len(self.tvars), ty),) + self.vars, self.tvars)

    def bind_type(self, name: str) -> _Scope:
        return _Scope(self.vars, (name,) + self.tvars)

    def lookup(self, name: str) -> Root | None:
        for i, (n, level, ty) in enumerate(self.vars, 1):
            if n == name:
                return Root(BoundVar(i, shift_type(ty, len(self.tvars) - level)))
        return None


@dataclass
class _Converter:
    sig: Signature
    dialect: Dialect
    strict: bool = False
    location: str = ""
    declared: list[Constant] = field(default_factory=list)
    bindings: Mapping[str, Term] = field(default_factory=dict)

    # -- types ----------------------------------------------------------

    def type(self, e: Expr, scope: _Scope) -> Type:
        if isinstance(e, Func) and not e.args:
            if e.name in _ARITH:
                raise Unsupported(f"arithmetic type {e.name} in {self.location}")
            if e.name in _BUILTIN_TYPES:
                return _BUILTIN_TYPES[e.name]
            if e.name in self.sig.types:
                return self.sig.types[e.name]
            if self.strict:
                raise UndeclaredSymbol(e.name, self.location)
            return self.sig.declare_type(e.name)
        if isinstance(e, Var):
            if e.name in scope.tvars:
                return TypeVar(scope.tvars.index(e.name) + 1)
            raise UndeclaredSymbol(e.name, self.location)
        if isinstance(e, Binary) and e.op == ">":
            domains = _product(e.left)
            result = self.type(e.right, scope)
            return arrows(*(self.type(d, scope) for d in domains), result)
        if isinstance(e, Quantified) and e.quantifier == "!>":
            inner = scope
            for v in e.variables:
                if not _is_ttype(v.type):
                    raise Unsupported(f"type quantifier over a non-type variable in {self.location}")
                inner = inner.bind_type(v.name)
            body = self.type(e.body, inner)
            for _ in e.variables:
                body = Forall(body)
            return body
        raise Unsupported(f"unsupported type expression {e!r} in {self.location}")

    def is_type_expr(self, e: Expr, scope: _Scope) -> bool:
        if isinstance(e, Func) and not e.args:
            return e.name in _BUILTIN_TYPES or e.name in self.sig.types
        if isinstance(e, Var):
            return e.name in scope.tvars and scope.lookup(e.name) is None
        if isinstance(e, Binary):
            return e.op in (">", "*")
        return isinstance(e, Quantified) and e.quantifier == "!>"

    # -- terms ----------------------------------------------------------

    def term(self, e: Expr, scope: _Scope, expected: Type | None) -> Term:
        if isinstance(e, Unary):
            return Root(NOT, (self.term(e.arg, scope, O),))
        if isinstance(e, Quantified):
            return self.quantified(e, scope, expected)
        if isinstance(e, Binary):
            if e.op == "@":
                head, args = _spine(e)
                return self.application(head, args, scope, expected)
            if e.op in (">", "*"):
                raise TPTPTypeError(f"type operator {e.op} used as a term", location=self.location)
            return self.connective(e.op, e.left, e.right, scope)
        if isinstance(e, Number):
            raise Unsupported(f"arithmetic literal {e.text} in {self.location}")
        if isinstance(e, Func) and e.args:
            return self.application(Func(e.name), list(e.args), scope, expected)
        return self.application(e, [], scope, expected)

    def connective(self, op: str, left: Expr, right: Expr, scope: _Scope) -> Term:
        if op in ("=", "!="):
            eq = self.equation(left, right, scope)
            return Root(NOT, (eq,)) if op == "!=" else eq
        lhs = self.term(left, scope, O)
        rhs = self.term(right, scope, O)
        return logical(op, lhs, rhs)

    def equation(self, left: Expr, right: Expr, scope: _Scope) -> Term:
        if self.is_unknown_name(left, scope) and not self.is_unknown_name(right, scope):
            rhs = self.term(right, scope, None)
            lhs = self.term(left, scope, rhs.type)
        else:
            lhs = self.term(left, scope, None)
            rhs = self.term(right, scope, lhs.type)
        if lhs.type is not rhs.type:
            raise TPTPTypeError(
                f"equation between types {lhs.type} and {rhs.type}", location=self.location
            )
        return Root(EQ, (lhs.type, lhs, rhs))

    def is_unknown_name(self, e: Expr, scope: _Scope) -> bool:
        return isinstance(e, Func) and not e.args and e.name not in self.sig and not e.name.startswith("$")

    def quantified(self, e: Quantified, scope: _Scope, expected: Type | None) -> Term:
        q = e.quantifier
        if q in ("!", "?"):
            binders = []
            inner = scope
            for v in e.variables:
                if _is_ttype(v.type):
                    raise Unsupported(f"quantification over types in {self.location}")
                ty = self.type(v.type, inner) if v.type is not None else I
                binders.append(ty)
                inner = inner.bind(v.name, ty)
            body = self.term(e.body, inner, O)
            const = PI if q == "!" else SIGMA
            for ty in reversed(binders):
                body = Root(const, (ty, TermAbs(ty, body)))
            return body
        if q == "^":
            return self.lam(list(e.variables), e.body, scope, expected)
        raise Unsupported(f"binder {q} in {self.location}")

    def lam(self, variables: list[TypedVar], body: Expr, scope: _Scope, expected: Type | None) -> Term:
        if not variables:
            return self.term(body, scope, expected)
        v, rest = variables[0], variables[1:]
        if _is_ttype(v.type):
            inner_expected = expected.body if isinstance(expected, Forall) else None
            return TypeAbs(self.lam(rest, body, scope.bind_type(v.name), inner_expected))
        if v.type is not None:
            ty = self.type(v.type, scope)
        elif isinstance(expected, Arrow):
            ty = expected.domain
        else:
            ty = I
        inner_expected = expected.codomain if isinstance(expected, Arrow) else None
        return TermAbs(ty, self.lam(rest, body, scope.bind(v.name, ty), inner_expected))

    def application(self, head: Expr, args: list[Expr], scope: _Scope, expected: Type | None) -> Term:
        if isinstance(head, Var):
            var = scope.lookup(head.name)
            if var is None:
                raise UndeclaredSymbol(head.name, self.location)
            return self.apply(var, var.type, args, scope)
        if isinstance(head, Connective):
            if head.op in ("~", "&", "|", "=>", "=", "!!", "??"):
                const = LOGIC[head.op]
                return self.apply_constant(const, args, scope, expected)
            fun = connective_term(head.op)
            return self.apply(fun, fun.type, args, scope)
        if isinstance(head, DistinctObject):
            const = self.sig.get(head.text) or self.sig.declare(head.text, I)
            return self.apply_constant(const, args, scope, expected)
        if isinstance(head, Func):
            name = head.name
            if name in ("$true", "$false"):
                if args:
                    raise TPTPTypeError("applied truth constant", name, self.location)
                return Root(LOGIC[name])
            bound = self.bindings.get(name)
            if bound is not None:
                return self.apply(bound, bound.type, args, scope)
            if name.startswith("$") and name not in self.sig:
                raise Unsupported(f"defined symbol {name} in {self.location}")
            const = self.sig.get(name)
            if const is None:
                return self.undeclared(name, args, scope, expected)
            return self.apply_constant(const, args, scope, expected)
        fun = self.term(head, scope, None)
        return self.apply(fun, fun.type, args, scope)

    def undeclared(self, name: str, args: list[Expr], scope: _Scope, expected: Type | None) -> Term:
        if self.strict and self.dialect in (Dialect.THF, Dialect.TFF):
            raise UndeclaredSymbol(name, self.location)
        converted = [self.term(a, scope, None) for a in args]
        result = expected if expected is not None else I
        if result.max_free:
            result = I
        arg_types = [a.type for a in converted]
        if any(t.max_free for t in arg_types):
            raise TPTPTypeError("cannot default a symbol over type variables", name, self.location)
        const = self.sig.declare(name, arrows(*arg_types, result))
        self.declared.append(const)
        return self._root(const, tuple(converted))

    def apply_constant(self, const: Constant, args: list[Expr], scope: _Scope, expected: Type | None) -> Term:
        ty = const.type
        if not isinstance(ty, Forall):
            return self.apply(Root(const), ty, args, scope)
        k = 0
        probe = ty
        while isinstance(probe, Forall):
            k += 1
            probe = probe.body
        explicit: list[Type] = []
        while len(explicit) < k and len(explicit) < len(args) and self.is_type_expr(args[len(explicit)], scope):
            explicit.append(self.type(args[len(explicit)], scope))
        if len(explicit) == k:
            type_args = explicit
            rest = args[k:]
            inst = ty
            for t in type_args:
                inst = instantiate_forall(inst, t)
            return self.apply(Root(const, tuple(type_args)), inst, rest, scope)
        if explicit:
            raise TPTPTypeError("partial explicit type arguments", const.name, self.location)
        # implicit type arguments: match argument types against the domains
        converted = [self.term(a, scope, None) for a in args]
        holes: dict[int, Type] = {}
        current: Type = probe
        for arg in converted:
            if not isinstance(current, Arrow):
                raise TPTPTypeError("too many arguments", const.name, self.location)
            if not _match(current.domain, arg.type, k, 0, holes):
                raise TPTPTypeError(
                    f"argument of type {arg.type} does not fit {current.domain}", const.name, self.location
                )
            current = current.codomain
        if expected is not None and len(holes) < k:
            _match(current, expected, k, 0, holes)
        type_args = [holes.get(k - i, I) for i in range(k)]
        return self._root(const, tuple(type_args) + tuple(converted))

    def apply(self, fun: Term, ty: Type, args: list[Expr], scope: _Scope) -> Term:
        converted = []
        for a in args:
            if isinstance(ty, Forall):
                t = self.type(a, scope)
                converted.append(t)
                ty = instantiate_forall(ty, t)
            elif isinstance(ty, Arrow):
                converted.append(self.term(a, scope, ty.domain))
                ty = ty.codomain
            else:
                raise TPTPTypeError("too many arguments", location=self.location)
        try:
            return mk_app(fun, converted)
        except KernelTypeError as exc:
            raise TPTPTypeError(str(exc), location=self.location) from None

    def _root(self, const: Constant, args: tuple) -> Term:
        try:
            return Root(const, args)
        except KernelTypeError as exc:
            raise TPTPTypeError(str(exc), const.name, self.location) from None


def _match(pattern: Type, actual: Type, k: int, depth: int, holes: dict[int, Type]) -> bool:
    """First-order matching of a type with ``k`` holes (indices depth+1..depth+k)."""
    if isinstance(pattern, TypeVar) and depth < pattern.index <= depth + k:
        if actual.max_free and _min_free(actual) <= depth:
            return False
        value = shift_type_down(actual, depth)
        hole = pattern.index - depth
        if hole in holes:
            return holes[hole] is value
        holes[hole] = value
        return True
    if isinstance(pattern, Arrow):
        return (
            isinstance(actual, Arrow)
            and _match(pattern.domain, actual.domain, k, depth, holes)
            and _match(pattern.codomain, actual.codomain, k, depth, holes)
        )
    if isinstance(pattern, Forall):
        return isinstance(actual, Forall) and _match(pattern.body, actual.body, k, depth + 1, holes)
    return pattern is actual


def _min_free(ty: Type, depth: int = 0) -> int:
    if isinstance(ty, TypeVar):
        return ty.index - depth if ty.index > depth else 10**9
    if isinstance(ty, Arrow):
        return min(_min_free(ty.domain, depth), _min_free(ty.codomain, depth))
    if isinstance(ty, Forall):
        return _min_free(ty.body, depth + 1)
    return 10**9


def shift_type_down(ty: Type, amount: int) -> Type:
    if amount == 0:
        return ty
    # indices 1..amount are known not to occur; drop them
    sub: TypeSubst = TYPE_ID
    for _ in range(amount):
        sub = TCons(I, sub)
    return substitute_type(ty, sub)


def _product(e: Expr) -> list[Expr]:
    if isinstance(e, Binary) and e.op == "*":
        return _product(e.left) + _product(e.right)
    return [e]


def _spine(e: Expr) -> tuple[Expr, list[Expr]]:
    args: list[Expr] = []
    while isinstance(e, Binary) and e.op == "@":
        args.append(e.right)
        e = e.left
    args.reverse()
    if isinstance(e, Func) and e.args:
        return Func(e.name), list(e.args) + args
    return e, args


def _is_ttype(e: Expr | None) -> bool:
    return isinstance(e, Func) and e.name == "$tType" and not e.args


def logical(op: str, lhs: Term, rhs: Term) -> Term:
    """Kernel term for a binary connective applied to two formulas."""
    if op == "&":
        return Root(AND, (lhs, rhs))
    if op == "|":
        return Root(OR, (lhs, rhs))
    if op == "=>":
        return Root(IMP, (lhs, rhs))
    if op == "<=":
        return Root(IMP, (rhs, lhs))
    if op == "<=>":
        return Root(EQ, (O, lhs, rhs))
    if op == "<~>":
        return Root(NOT, (Root(EQ, (O, lhs, rhs)),))
    if op == "~|":
        return Root(NOT, (Root(OR, (lhs, rhs)),))
    if op == "~&":
        return Root(NOT, (Root(AND, (lhs, rhs)),))
    raise Unsupported(f"connective {op}")


def connective_term(op: str) -> Term:
    """A derived binary connective as a closed term of type o → o → o."""
    if op in ("!=",):
        raise Unsupported("(!=) as a term needs an explicit type")
    x, y = Root(BoundVar(2, O)), Root(BoundVar(1, O))
    return TermAbs(O, TermAbs(O, logical(op, x, y)))


def type_to_kernel(e: Expr, sig: Signature, strict: bool = False) -> Type:
    return _Converter(sig, Dialect.THF, strict).type(e, _Scope())


def declare(decl: TypeDecl, sig: Signature, strict: bool = False, location: str = "") -> BaseType | Constant:
    """Enter a type declaration into ``sig``."""
    if _is_ttype(decl.type):
        return sig.declare_type(decl.name)
    conv = _Converter(sig, Dialect.THF, strict, location)
    ty = conv.type(decl.type, _Scope())
    if ty is TTYPE:
        raise Unsupported(f"type constructor {decl.name} in {location}")
    try:
        return sig.declare(decl.name, ty)
    except SignatureError as exc:
        raise TPTPTypeError(str(exc), decl.name, location) from None


def to_kernel(
    f: AnnotatedFormula | Expr,
    sig: Signature,
    strict: bool = False,
    dialect: Dialect | None = None,
    expected: Type | None = O,
    normalize: bool = True,
    bindings: Mapping[str, Term] | None = None,
) -> Term | None:
    """Kernel term for a formula (``None`` for type declarations, which are
    entered into ``sig`` instead).

    Symbols that are not declared get default types ($i for terms, $o for
    formulas; argument types from the arguments) unless ``strict`` is set
    for a typed dialect.  Names in ``bindings`` stand for the given closed
    terms and take precedence over signature constants.
    """
    if isinstance(f, AnnotatedFormula):
        if isinstance(f.formula, TypeDecl):
            declare(f.formula, sig, strict, f.name)
            return None
        expr, dialect, location = f.formula, f.dialect, f.name
    else:
        expr, location = f, ""
        dialect = dialect or Dialect.THF
    bindings = bindings or {}
    if any(t.max_tm or t.max_ty for t in bindings.values()):
        raise ValueError("bound terms must be closed")
    conv = _Converter(sig, dialect, strict, location, bindings=bindings)
    free = free_variables(expr)
    if free and expected is O:
        expr = Quantified("!", tuple(TypedVar(v) for v in free), expr)
    term = conv.term(expr, _Scope(), expected)
    if expected is O and term.type is not O:
        raise TPTPTypeError(f"formula has type {term.type}, not $o", location=location)
    if normalize and not term.normal:
        term, _ = beta_normalize(term, Strategy.LL)
    return term


def problem_to_kernel(
    formulas: list[AnnotatedFormula], sig: Signature, strict: bool = False
) -> list[tuple[AnnotatedFormula, Term]]:
    """Convert every non-declaration formula, declaring types along the way."""
    out = []
    for f in formulas:
        term = to_kernel(f, sig, strict)
        if term is not None:
            out.append((f, term))
    return out


# ---------------------------------------------------------------------------
# kernel → TPTP


def type_from_kernel(ty: Type, tnames: tuple[str, ...] = (), dialect: Dialect = Dialect.THF) -> Expr:
    if isinstance(ty, BaseType):
        return Func(ty.name)
    if isinstance(ty, TypeVar):
        return Var(tnames[ty.index - 1])
    if isinstance(ty, Arrow):
        if dialect is Dialect.TFF:
            domains, result = split_arrows(ty)
            if any(isinstance(d, (Arrow, Forall)) for d in domains) or isinstance(result, Forall):
                raise DialectMismatch(f"higher-order type {ty} in TFF")
            left = type_from_kernel(domains[0], tnames, dialect)
            for d in domains[1:]:
                left = Binary("*", left, type_from_kernel(d, tnames, dialect))
            return Binary(">", left, type_from_kernel(result, tnames, dialect))
        return Binary(">", type_from_kernel(ty.domain, tnames, dialect), type_from_kernel(ty.codomain, tnames, dialect))
    if dialect is not Dialect.THF:
        raise DialectMismatch(f"polymorphic type {ty} outside THF")
    name = f"T{len(tnames) + 1}"
    return Quantified("!>", (TypedVar(name, Func("$tType")),), type_from_kernel(ty.body, (name,) + tnames, dialect))


@dataclass
class _Printer:
    dialect: Dialect
    counter: int = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def ty(self, ty: Type, tnames) -> Expr:
        return type_from_kernel(ty, tnames, self.dialect)

    def check_first_order(self, ty: Type) -> None:
        if self.dialect is Dialect.THF:
            return
        if isinstance(ty, (Arrow, Forall)):
            raise DialectMismatch(f"quantification over {ty} outside THF")
        if self.dialect in (Dialect.FOF, Dialect.CNF) and ty is not I:
            raise DialectMismatch(f"variable of type {ty} in untyped dialect")

    def go(self, t: Term, names: tuple, tnames: tuple) -> Expr:
        if isinstance(t, TermAbs):
            if self.dialect is not Dialect.THF:
                raise DialectMismatch("λ-abstraction outside THF")
            name = self.fresh("X")
            body = self.go(t.body, (name,) + names, tnames)
            var = TypedVar(name, self.ty(t.var_type, tnames))
            return _merge("^", var, body)
        if isinstance(t, TypeAbs):
            if self.dialect is not Dialect.THF:
                raise DialectMismatch("type abstraction outside THF")
            name = self.fresh("T")
            body = self.go(t.body, names, (name,) + tnames)
            return _merge("^", TypedVar(name, Func("$tType")), body)
        if not isinstance(t, Root):
            raise ConversionError("β-normalize before printing")
        head, args = t.head, t.args
        if isinstance(head, BoundVar):
            if args and self.dialect is not Dialect.THF:
                raise DialectMismatch("applied variable outside THF")
            return self.apply(Var(names[head.index - 1]), args, names, tnames)
        name = head.name
        if name in ("!!", "??") and len(args) == 2:
            ty, body = args
            if not isinstance(body, TermAbs):
                body = TermAbs(ty, mk_app(shift_term(body, 1, 0), (Root(BoundVar(1, ty)),)))
            self.check_first_order(ty)
            var_name = self.fresh("X")
            inner = self.go(body.body, (var_name,) + names, tnames)
            typed = None if self.dialect in (Dialect.FOF, Dialect.CNF) else self.ty(ty, tnames)
            return _merge("!" if name == "!!" else "?", TypedVar(var_name, typed), inner)
        if name == "~" and len(args) == 1:
            return Unary("~", self.go(args[0], names, tnames))
        if name in ("&", "|", "=>") and len(args) == 2:
            return Binary(name, self.go(args[0], names, tnames), self.go(args[1], names, tnames))
        if name == "=" and len(args) == 3:
            ty = args[0]
            lhs, rhs = self.go(args[1], names, tnames), self.go(args[2], names, tnames)
            if ty is O and self.dialect is not Dialect.THF:
                return Binary("<=>", lhs, rhs)
            if self.dialect is not Dialect.THF:
                self.check_first_order(ty)
            return Binary("=", lhs, rhs)
        if name in LOGIC and name not in ("$true", "$false"):
            if self.dialect is not Dialect.THF:
                raise DialectMismatch(f"partially applied connective {name} outside THF")
            return self.apply(Connective(name), args, names, tnames)
        if self.dialect is Dialect.THF:
            return self.apply(Func(name), args, names, tnames)
        if any(isinstance(a, Type) for a in args):
            raise DialectMismatch(f"polymorphic symbol {name} outside THF")
        domains, result = split_arrows(head.type)
        if len(args) != len(domains) or isinstance(result, (Arrow, Forall)) or any(
            isinstance(d, (Arrow, Forall)) for d in domains
        ):
            raise DialectMismatch(f"higher-order use of {name} outside THF")
        return Func(name, tuple(self.go(a, names, tnames) for a in args))

    def apply(self, head: Expr, args: tuple, names, tnames) -> Expr:
        result = head
        for a in args:
            arg = self.ty(a, tnames) if isinstance(a, Type) else self.go(a, names, tnames)
            result = Binary("@", result, arg)
        return result


def _merge(q: str, var: TypedVar, body: Expr) -> Expr:
    if isinstance(body, Quantified) and body.quantifier == q:
        return Quantified(q, (var,) + body.variables, body.body)
    return Quantified(q, (var,), body)


def from_kernel(t: Term, dialect: Dialect = Dialect.THF) -> Expr:
    """TPTP syntax for a kernel term (β-normalized first).

    In CNF the formula must be a universally closed clause; the prefix is
    dropped and its variables become free.
    """
    if not t.normal:
        t, _ = beta_normalize(t, Strategy.LL)
    printer = _Printer(dialect)
    if dialect is Dialect.CNF:
        printer.dialect = Dialect.FOF
        expr = printer.go(t, (), ())
        while isinstance(expr, Quantified) and expr.quantifier == "!":
            expr = expr.body
        _check_clause(expr)
        return expr
    return printer.go(t, (), ())


def _check_clause(e: Expr) -> None:
    if isinstance(e, Binary) and e.op == "|":
        _check_clause(e.left)
        _check_clause(e.right)
        return
    if isinstance(e, Unary):
        e = e.arg
    if isinstance(e, (Func, Var)):
        return
    if isinstance(e, Binary) and e.op in ("=", "!="):
        return
    raise DialectMismatch("formula is not a clause")


def _used_constants(t: Term, acc: dict[str, Constant]) -> None:
    stack = [t]
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, (TermAbs, TypeAbs)):
            stack.append(node.body)
        elif isinstance(node, Root):
            if isinstance(node.head, Constant) and node.head.name not in LOGIC:
                acc.setdefault(node.head.name, node.head)
            stack.extend(a for a in node.args if isinstance(a, Term))
        elif isinstance(node, Redex):
            stack.append(node.fun)
            stack.extend(a for a in node.args if isinstance(a, Term))


def _base_types(ty: Type, acc: dict[str, BaseType]) -> None:
    if isinstance(ty, BaseType):
        if ty.name not in _BUILTIN_TYPES:
            acc.setdefault(ty.name, ty)
    elif isinstance(ty, Arrow):
        _base_types(ty.domain, acc)
        _base_types(ty.codomain, acc)
    elif isinstance(ty, Forall):
        _base_types(ty.body, acc)


def kernel_problem(
    formulas: list[tuple[str, str, Term]], dialect: Dialect
) -> list[AnnotatedFormula]:
    """Annotated formulas for kernel terms, preceded by the type
    declarations they need (typed dialects only)."""
    body = [AnnotatedFormula(dialect, name, role, from_kernel(t, dialect)) for name, role, t in formulas]
    if dialect in (Dialect.FOF, Dialect.CNF):
        return body
    return type_declarations([t for _, _, t in formulas], dialect) + body


def type_declarations(terms: list[Term], dialect: Dialect) -> list[AnnotatedFormula]:
    """Declarations of the base types and user symbols occurring in ``terms``."""
    consts: dict[str, Constant] = {}
    for t in terms:
        _used_constants(t, consts)
    bases: dict[str, BaseType] = {}
    for c in consts.values():
        _base_types(c.type, bases)
    decls = [AnnotatedFormula(dialect, f"{_decl_name(n)}_type", "type", TypeDecl(n, Func("$tType"))) for n in bases]
    decls += [
        AnnotatedFormula(dialect, f"{_decl_name(n)}_decl", "type", TypeDecl(n, type_from_kernel(c.type, (), dialect)))
        for n, c in consts.items()
    ]
    return decls


def _decl_name(symbol: str) -> str:
    cleaned = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in symbol.strip("'"))
    if not cleaned or not cleaned[0].islower():
        cleaned = "s" + cleaned
    return cleaned


def convert_formula(f: AnnotatedFormula, dialect: Dialect, sig: Signature) -> AnnotatedFormula | None:
    """``f`` expressed in ``dialect`` (``None`` for a declaration the
    target dialect has no syntax for)."""
    if isinstance(f.formula, TypeDecl):
        decl = declare(f.formula, sig, location=f.name)
        if f.dialect is dialect:
            return f
        if dialect in (Dialect.FOF, Dialect.CNF):
            if isinstance(decl, BaseType):
                raise DialectMismatch(f"type {decl.name} has no {dialect.value.upper()} syntax")
            domains, result = split_arrows(decl.type)
            if any(d is not I for d in domains) or result not in (I, O):
                raise DialectMismatch(f"symbol {decl.name} of type {decl.type} is not first-order over $i")
            return None
        ty = Func("$tType") if isinstance(decl, BaseType) else type_from_kernel(decl.type, (), dialect)
        return AnnotatedFormula(dialect, f.name, f.role, TypeDecl(f.formula.name, ty), f.annotations)
    if f.dialect is dialect:
        return f
    term = to_kernel(f, sig)
    return AnnotatedFormula(dialect, f.name, f.role, from_kernel(term, dialect), f.annotations)


_CONJECTURE_ROLES = ("conjecture", "negated_conjecture")


def render_problem(problem: list[AnnotatedFormula], dialect: Dialect | str, sig: Signature | None = None) -> str:
    """TPTP text for ``problem`` in ``dialect``.

    Type declarations come first and conjectures last; the relative order
    is otherwise kept.  Formulas already in ``dialect`` are printed as
    they are; others are converted through the kernel.
    """
    dialect = Dialect(dialect)
    sig = sig if sig is not None else Signature()
    converted: list[AnnotatedFormula] = []
    for f in problem:
        g = convert_formula(f, dialect, sig)
        if g is not None:
            converted.append(g)
    if dialect in (Dialect.TFF, Dialect.THF):
        declared = {g.formula.name for g in converted if isinstance(g.formula, TypeDecl)}
        declared_sources = any(f.dialect in (Dialect.TFF, Dialect.THF) for f in problem)
        if not declared_sources or any(f.dialect is not dialect for f in problem):
            # symbols defaulted by untyped sources need declarations
            terms = [to_kernel(f, sig) for f in problem if not isinstance(f.formula, TypeDecl)]
            extra = [d for d in type_declarations(terms, dialect) if d.formula.name not in declared]
            converted = extra + converted
    order = {id(g): i for i, g in enumerate(converted)}

    def rank(g: AnnotatedFormula) -> tuple[int, int]:
        if isinstance(g.formula, TypeDecl):
            group = 0
        elif g.role in _CONJECTURE_ROLES:
            group = 2
        else:
            group = 1
        return group, order[id(g)]

    return format_problem(sorted(converted, key=rank))
