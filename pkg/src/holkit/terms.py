"""Spine-form λ-terms with explicit substitutions and perfect sharing.

Terms are hash-consed: every constructor call goes through the shared
:class:`TermBank`, so two structurally equal terms are the same object.
Syntactic equality is therefore pointer equality (:func:`equal`).

Node variants:

* ``Root(head, args)`` -- a head (bound variable or constant) applied to a
  spine of term and type arguments.  A bare variable/constant has ``()``.
* ``TermAbs(var_type, body)`` -- λ-abstraction.
* ``TypeAbs(body)`` -- type abstraction Λ.
* ``Redex(fun, args)`` -- an abstraction or closure applied to a spine.
* ``Closure(body, subst)`` -- a suspended explicit substitution.

Term and type variables are de Bruijn indices starting at 1.  A bound
variable carries its type as seen at the occurrence.
"""

from __future__ import annotations

import enum
import itertools
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Union

from .types import (
    TYPE_ID,
    Arrow,
    BaseType,
    Forall,
    I,
    O,
    TCons,
    TShift,
    Type,
    TypeSubst,
    TypeVar,
    arrows,
    base_display,
    instantiate_forall,
    pretty_type,
    substitute_type,
)

__all__ = [
    "KernelTypeError",
    "SignatureError",
    "Constant",
    "BoundVar",
    "Signature",
    "LOGIC",
    "Term",
    "Root",
    "TermAbs",
    "TypeAbs",
    "Redex",
    "Closure",
    "Shift",
    "Cons",
    "Comp",
    "Subst",
    "ID_SUBST",
    "HeadKind",
    "TermBank",
    "TERM_BANK",
    "intern",
    "equal",
    "structural_equal",
    "EQUALITY_STATS",
    "head_symbol",
    "type_of",
    "apply_subst",
    "mk_app",
    "mk_const",
    "mk_var",
    "pretty",
    "subterms",
    "check_well_formed",
    "bank_stats",
]


class KernelTypeError(TypeError):
    """A term construction violates the typing rules."""


class SignatureError(ValueError):
    pass


_const_ids = itertools.count()
_const_lock = threading.Lock()


class Constant:
    """A typed symbol of a signature. Doubles as a spine head."""

    __slots__ = ("id", "name", "type", "_display")

    def __init__(self, name: str, type: Type, display: str | None = None) -> None:
        if type.max_free:
            raise SignatureError(f"type of constant {name} must be closed")
        with _const_lock:
            self.id = next(_const_ids)
        self.name = name
        self.type = type
        self._display = display

    @property
    def display(self) -> str:
        if self._display is not None:
            return self._display
        name = self.name
        if len(name) >= 2 and name[0] == name[-1] == "'":
            return name[1:-1]
        return name

    def __repr__(self) -> str:
        return f"Constant({self.name!r}, {pretty_type(self.type)})"


@dataclass(frozen=True)
class BoundVar:
    """Head referring to the ``index``-th enclosing λ-binder."""

    index: int
    type: Type

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("bound variable index must be >= 1")


Head = Union[Constant, BoundVar]
Arg = Union["Term", Type]


def _poly(body: Type) -> Type:
    return Forall(body)


LOGIC = {
    "$true": Constant("$true", O, "⊤"),
    "$false": Constant("$false", O, "⊥"),
    "~": Constant("~", Arrow(O, O), "¬"),
    "&": Constant("&", arrows(O, O, O), "∧"),
    "|": Constant("|", arrows(O, O, O), "∨"),
    "=>": Constant("=>", arrows(O, O, O), "⇒"),
    "=": Constant("=", _poly(arrows(TypeVar(1), TypeVar(1), O)), "="),
    "!!": Constant("!!", _poly(Arrow(Arrow(TypeVar(1), O), O)), "Π"),
    "??": Constant("??", _poly(Arrow(Arrow(TypeVar(1), O), O)), "Σ"),
}


class Signature:
    """Base types and constants, addressable by name and by id.

    ``$o``, ``$i`` and the logical constants are preinstalled.
    """

    def __init__(self) -> None:
        self.types: dict[str, BaseType] = {"$o": O, "$i": I}
        self._consts: dict[str, Constant] = dict(LOGIC)
        self._by_id: dict[int, Constant] = {c.id: c for c in LOGIC.values()}
        self._skolem_counter = 0
        self._lock = threading.RLock()

    def declare_type(self, name: str) -> BaseType:
        with self._lock:
            ty = self.types.get(name)
            if ty is None:
                ty = self.types[name] = BaseType(name)
            return ty

    def declare(self, name: str, type: Type, display: str | None = None) -> Constant:
        with self._lock:
            existing = self._consts.get(name)
            if existing is not None:
                if existing.type is not type:
                    raise SignatureError(
                        f"{name} already declared with type {pretty_type(existing.type)}"
                    )
                return existing
            const = Constant(name, type, display)
            self._consts[name] = const
            self._by_id[const.id] = const
            return const

    def fresh(self, type: Type, prefix: str = "sk") -> Constant:
        """Declare a new constant ``<prefix><N>`` using the signature counter."""
        with self._lock:
            while True:
                self._skolem_counter += 1
                name = f"{prefix}{self._skolem_counter}"
                if name not in self._consts:
                    return self.declare(name, type)

    def copy(self) -> Signature:
        other = Signature()
        other.types = dict(self.types)
        other._consts = dict(self._consts)
        other._by_id = dict(self._by_id)
        other._skolem_counter = self._skolem_counter
        return other

    def __getitem__(self, name: str) -> Constant:
        try:
            return self._consts[name]
        except KeyError:
            raise SignatureError(f"undeclared symbol {name}") from None

    def get(self, name: str) -> Constant | None:
        return self._consts.get(name)

    def by_id(self, ident: int) -> Constant:
        return self._by_id[ident]

    def __contains__(self, name: str) -> bool:
        return name in self._consts

    def constants(self) -> list[Constant]:
        return list(self._consts.values())

    def user_constants(self) -> list[Constant]:
        return [c for c in self._consts.values() if c.name not in LOGIC]


# ---------------------------------------------------------------------------
# bank


class TermBank:
    """Hash-consing table shared by all terms and substitutions."""

    def __init__(self) -> None:
        self._table: dict[tuple, object] = {}
        self._lock = threading.Lock()
        self._next_id = 0
        self.requests = 0

    def intern(self, key: tuple, build):
        self.requests += 1
        node = self._table.get(key)
        if node is not None:
            return node
        with self._lock:
            node = self._table.get(key)
            if node is None:
                node = build(self._next_id)
                self._next_id += 1
                self._table[key] = node
        return node

    def __len__(self) -> int:
        return len(self._table)

    def __iter__(self) -> Iterator[object]:
        return iter(list(self._table.values()))


TERM_BANK = TermBank()


def bank_stats() -> dict[str, float]:
    """Node census of the term bank and the sharing ratio.

    The sharing ratio is construction requests per stored node; values
    above 1 mean constructions were served from the bank.
    """
    kinds = Counter(type(node).__name__ for node in TERM_BANK)
    stats: dict[str, float] = {"nodes": len(TERM_BANK), "requests": TERM_BANK.requests}
    stats.update(sorted(kinds.items()))
    stats["sharing_ratio"] = TERM_BANK.requests / max(len(TERM_BANK), 1)
    return stats


class Term:
    """Interned term node. Equality is identity."""

    __slots__ = ("id", "type", "max_tm", "max_ty", "normal", "size", "depth", "__weakref__")

    id: int
    type: Type
    max_tm: int
    max_ty: int
    normal: bool
    size: int
    depth: int

    __eq__ = object.__eq__
    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {pretty(self)}>"

    def __str__(self) -> str:
        return pretty(self)


def _make(cls, key, fill):
    def build(ident: int):
        obj = object.__new__(cls)
        obj.id = ident
        fill(obj)
        return obj

    return TERM_BANK.intern(key, build)


def _spine_type(ty: Type, args: tuple, what: str) -> Type:
    for pos, arg in enumerate(args, 1):
        if isinstance(arg, Type):
            if not isinstance(ty, Forall):
                raise KernelTypeError(
                    f"{what}: type argument {pos} given to non-polymorphic type {pretty_type(ty)}"
                )
            ty = instantiate_forall(ty, arg)
        elif isinstance(arg, Term):
            if not isinstance(ty, Arrow):
                raise KernelTypeError(
                    f"{what}: argument {pos} applied to non-function type {pretty_type(ty)}"
                )
            if arg.type is not ty.domain:
                raise KernelTypeError(
                    f"{what}: argument {pos} has type {pretty_type(arg.type)}, "
                    f"expected {pretty_type(ty.domain)}"
                )
            ty = ty.codomain
        else:
            raise KernelTypeError(f"{what}: spine entries must be terms or types, got {arg!r}")
    return ty


def _spine_stats(args: tuple) -> tuple[int, int, bool, int, int]:
    max_tm = max_ty = 0
    normal = True
    size = depth = 0
    for arg in args:
        if isinstance(arg, Type):
            max_ty = max(max_ty, arg.max_free)
            size += 1
        else:
            max_tm = max(max_tm, arg.max_tm)
            max_ty = max(max_ty, arg.max_ty)
            normal = normal and arg.normal
            size += arg.size
            depth = max(depth, arg.depth)
    return max_tm, max_ty, normal, size, depth


class Root(Term):
    """Head applied to a (possibly empty) spine."""

    __slots__ = ("head", "args")

    head: Head
    args: tuple

    def __new__(cls, head: Head, args: tuple = ()) -> Root:
        args = tuple(args)
        if isinstance(head, Constant):
            head_type = head.type
            head_tm, head_ty = 0, 0
        elif isinstance(head, BoundVar):
            head_type = head.type
            head_tm, head_ty = head.index, head.type.max_free
        else:
            raise KernelTypeError(f"invalid head {head!r}")

        def fill(obj):
            obj.head = head
            obj.args = args
            obj.type = _spine_type(head_type, args, _head_name(head))
            max_tm, max_ty, normal, size, depth = _spine_stats(args)
            obj.max_tm = max(head_tm, max_tm)
            obj.max_ty = max(head_ty, max_ty)
            obj.normal = normal
            obj.size = 1 + size
            obj.depth = 1 + depth

        return _make(cls, ("root", head, *args), fill)


class TermAbs(Term):
    __slots__ = ("var_type", "body")

    var_type: Type
    body: Term

    def __new__(cls, var_type: Type, body: Term) -> TermAbs:
        if not isinstance(var_type, Type) or not isinstance(body, Term):
            raise KernelTypeError("λ-abstraction needs a type and a term body")

        def fill(obj):
            obj.var_type = var_type
            obj.body = body
            obj.type = Arrow(var_type, body.type)
            obj.max_tm = max(body.max_tm - 1, 0)
            obj.max_ty = max(var_type.max_free, body.max_ty)
            obj.normal = body.normal
            obj.size = 1 + body.size
            obj.depth = 1 + body.depth

        return _make(cls, ("lam", var_type, body), fill)


class TypeAbs(Term):
    __slots__ = ("body",)

    body: Term

    def __new__(cls, body: Term) -> TypeAbs:
        if not isinstance(body, Term):
            raise KernelTypeError("type abstraction needs a term body")

        def fill(obj):
            obj.body = body
            obj.type = Forall(body.type)
            obj.max_tm = body.max_tm
            obj.max_ty = max(body.max_ty - 1, 0)
            obj.normal = body.normal
            obj.size = 1 + body.size
            obj.depth = 1 + body.depth

        return _make(cls, ("tlam", body), fill)


class Redex(Term):
    """An abstraction (or closure) applied to a non-empty spine."""

    __slots__ = ("fun", "args")

    fun: Term
    args: tuple

    def __new__(cls, fun: Term, args: tuple) -> Redex:
        args = tuple(args)
        if not isinstance(fun, (TermAbs, TypeAbs, Closure)):
            raise KernelTypeError(f"redex function must be an abstraction or closure, got {fun!r}")
        if not args:
            raise KernelTypeError("redex needs a non-empty spine")

        def fill(obj):
            obj.fun = fun
            obj.args = args
            obj.type = _spine_type(fun.type, args, "redex")
            max_tm, max_ty, _, size, depth = _spine_stats(args)
            obj.max_tm = max(fun.max_tm, max_tm)
            obj.max_ty = max(fun.max_ty, max_ty)
            obj.normal = False
            obj.size = fun.size + size
            obj.depth = 1 + max(fun.depth, depth)

        return _make(cls, ("redex", fun, *args), fill)


class Closure(Term):
    """``body`` under the suspended substitution ``subst``."""

    __slots__ = ("body", "subst")

    body: Term
    subst: Subst

    def __new__(cls, body: Term, subst: Subst) -> Closure:
        if not isinstance(body, Term) or not isinstance(subst, Subst):
            raise KernelTypeError("closure needs a term and a substitution")

        def fill(obj):
            obj.body = body
            obj.subst = subst
            obj.type = substitute_type(body.type, subst.ty)
            obj.max_tm, obj.max_ty = subst.range_bound(body.max_tm, body.max_ty)
            obj.normal = False
            obj.size = 1 + body.size
            obj.depth = 1 + body.depth

        return _make(cls, ("closure", body, subst), fill)


def _head_name(head: Head) -> str:
    if isinstance(head, Constant):
        return head.name
    return f"bound variable {head.index}"


# ---------------------------------------------------------------------------
# explicit substitutions


class TermSubst:
    """Term part of an explicit substitution."""

    __slots__ = ("id", "__weakref__")
    __eq__ = object.__eq__
    __hash__ = object.__hash__


class Shift(TermSubst):
    """Maps term index ``i`` to the variable ``i + n``."""

    __slots__ = ("n",)

    n: int

    def __new__(cls, n: int) -> Shift:
        if n < 0:
            raise ValueError("shift amount must be non-negative")

        def fill(obj):
            obj.n = n

        return _make(cls, ("shift", n), fill)

    def __repr__(self) -> str:
        return f"↑{self.n}"


class Cons(TermSubst):
    """Maps index 1 to ``front`` and ``i + 1`` to ``rest(i)``.

    ``front`` is a variable index (a renaming) or a term.
    """

    __slots__ = ("front", "rest")

    front: int | Term
    rest: TermSubst

    def __new__(cls, front: int | Term, rest: TermSubst) -> Cons:
        if isinstance(front, int) and front < 1:
            raise ValueError("renaming front must be >= 1")

        def fill(obj):
            obj.front = front
            obj.rest = rest

        return _make(cls, ("cons", front, rest), fill)

    def __repr__(self) -> str:
        front = self.front if isinstance(self.front, int) else pretty(self.front)
        return f"{front} . {self.rest!r}"


class Comp(TermSubst):
    """Deferred composition: ``first`` followed by the full substitution ``then``."""

    __slots__ = ("first", "then")

    first: TermSubst
    then: Subst

    def __new__(cls, first: TermSubst, then: Subst) -> Comp:
        def fill(obj):
            obj.first = first
            obj.then = then

        return _make(cls, ("comp", first, then), fill)

    def __repr__(self) -> str:
        return f"({self.first!r} ∘ {self.then!r})"


class Subst:
    """Two-sorted substitution: a term part and a type part."""

    __slots__ = ("id", "tm", "ty", "_bounds", "__weakref__")

    tm: TermSubst
    ty: TypeSubst

    __eq__ = object.__eq__
    __hash__ = object.__hash__

    def __new__(cls, tm: TermSubst, ty: TypeSubst = TYPE_ID) -> Subst:
        def fill(obj):
            obj.tm = tm
            obj.ty = ty
            obj._bounds = {}

        return _make(cls, ("subst", tm, ty), fill)

    @property
    def is_identity(self) -> bool:
        return self is ID_SUBST

    def range_bound(self, k_tm: int, k_ty: int) -> tuple[int, int]:
        """Upper bounds on loose (term, type) indices after applying ``self``
        to a term whose loose indices are at most ``k_tm`` and ``k_ty``."""
        key = (k_tm, k_ty)
        hit = self._bounds.get(key)
        if hit is None:
            tm_bound, ty_from_fronts = _tm_range(self.tm, k_tm, k_ty, self.ty)
            hit = (tm_bound, max(ty_from_fronts, _ty_range(self.ty, k_ty)))
            self._bounds[key] = hit
        return hit

    def __repr__(self) -> str:
        return f"⟨{self.tm!r} | {self.ty!r}⟩"


def _ty_range(sigma: TypeSubst, k: int) -> int:
    best = 0
    while k > 0 and isinstance(sigma, TCons):
        best = max(best, sigma.head.max_free)
        sigma = sigma.rest
        k -= 1
    if k > 0:
        best = max(best, k + sigma.n)
    return best


def _tm_range(sigma: TermSubst, k: int, k_ty: int, ty: TypeSubst) -> tuple[int, int]:
    best_tm = best_ty = 0
    while k > 0:
        if isinstance(sigma, Cons):
            front = sigma.front
            if isinstance(front, int):
                best_tm = max(best_tm, front)
            else:
                best_tm = max(best_tm, front.max_tm)
                best_ty = max(best_ty, front.max_ty)
            sigma = sigma.rest
            k -= 1
        elif isinstance(sigma, Shift):
            best_tm = max(best_tm, k + sigma.n)
            break
        else:
            mid_tm, mid_ty = _tm_range(sigma.first, k, k_ty, ty)
            inner_tm, inner_ty = sigma.then.range_bound(mid_tm, mid_ty)
            best_tm = max(best_tm, inner_tm)
            best_ty = max(best_ty, inner_ty)
            break
    return best_tm, best_ty


ID_SUBST = Subst(Shift(0), TYPE_ID)


# ---------------------------------------------------------------------------
# public operations


def intern(node: tuple) -> Term:
    """Intern a term from a tagged tuple such as ``("lam", I, body)``."""
    tag, *args = node
    if tag == "root":
        head, *spine = args
        return Root(head, tuple(spine))
    if tag == "lam":
        return TermAbs(*args)
    if tag == "tlam":
        return TypeAbs(*args)
    if tag == "redex":
        fun, *spine = args
        return Redex(fun, tuple(spine))
    if tag == "closure":
        return Closure(*args)
    raise ValueError(f"unknown term node tag {tag!r}")


class _EqualityStats:
    """Instrumentation for equality checks: counts visited nodes."""

    def __init__(self) -> None:
        self.visited = 0
        self.calls = 0

    def reset(self) -> None:
        self.visited = 0
        self.calls = 0


EQUALITY_STATS = _EqualityStats()


def equal(a: Term, b: Term) -> bool:
    """Syntactic equality in constant time (no traversal)."""
    EQUALITY_STATS.calls += 1
    return a is b


def structural_equal(a: Term, b: Term) -> bool:
    """Deep structural comparison, counting every node visited.

    Only useful as a reference point for :func:`equal`.
    """
    EQUALITY_STATS.visited += 1
    if type(a) is not type(b):
        return False
    if isinstance(a, Root):
        return a.head == b.head and _args_equal(a.args, b.args)
    if isinstance(a, TermAbs):
        return a.var_type is b.var_type and structural_equal(a.body, b.body)
    if isinstance(a, TypeAbs):
        return structural_equal(a.body, b.body)
    if isinstance(a, Redex):
        return structural_equal(a.fun, b.fun) and _args_equal(a.args, b.args)
    return a.subst is b.subst and structural_equal(a.body, b.body)


def _args_equal(xs: tuple, ys: tuple) -> bool:
    if len(xs) != len(ys):
        return False
    for x, y in zip(xs, ys):
        if isinstance(x, Type) or isinstance(y, Type):
            if x is not y:
                return False
        elif not structural_equal(x, y):
            return False
    return True


class HeadKind(enum.Enum):
    ABSTRACTION = "abstraction"
    TYPE_ABSTRACTION = "type-abstraction"
    UNRESOLVED = "unresolved"


def head_symbol(t: Term) -> Head | HeadKind:
    if isinstance(t, Root):
        return t.head
    if isinstance(t, TermAbs):
        return HeadKind.ABSTRACTION
    if isinstance(t, TypeAbs):
        return HeadKind.TYPE_ABSTRACTION
    return HeadKind.UNRESOLVED


def type_of(t: Term) -> Type:
    return t.type


def apply_subst(t: Term, sigma: Subst) -> Term:
    """Suspend ``sigma`` over ``t`` as a closure (no evaluation)."""
    if sigma is ID_SUBST or (t.max_tm == 0 and t.max_ty == 0):
        return t
    return Closure(t, sigma)


def mk_app(fun: Term, args) -> Term:
    """Apply ``fun`` to a spine, flattening into an existing spine."""
    args = tuple(args)
    if not args:
        return fun
    if isinstance(fun, Root):
        return Root(fun.head, fun.args + args)
    if isinstance(fun, Redex):
        return Redex(fun.fun, fun.args + args)
    if isinstance(fun, (TermAbs, TypeAbs, Closure)):
        return Redex(fun, args)
    raise KernelTypeError(f"cannot apply {fun!r}")


def mk_const(c: Constant, *args) -> Term:
    return Root(c, args)


def mk_var(index: int, type: Type, *args) -> Term:
    return Root(BoundVar(index, type), args)


def subterms(t: Term) -> Iterator[Term]:
    """Distinct subterms of ``t`` (including ``t``), each yielded once."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if node.id in seen:
            continue
        seen.add(node.id)
        yield node
        if isinstance(node, (Root, Redex)):
            stack.extend(a for a in node.args if isinstance(a, Term))
            if isinstance(node, Redex):
                stack.append(node.fun)
        elif isinstance(node, (TermAbs, TypeAbs, Closure)):
            stack.append(node.body)


def check_well_formed(t: Term, context: tuple[Type, ...] = ()) -> None:
    """Verify bound-variable annotations against their binders.

    ``context`` lists the types of enclosing λ-binders, innermost first.
    Node-local typing is already enforced at construction; this checks the
    global property that every index is bound (or within ``context``) and
    carries its binder's type. Closures are not inspected.
    """
    shift_one = TShift(1)

    def go(node: Term, ctx: tuple[Type, ...]) -> None:
        if isinstance(node, Root):
            head = node.head
            if isinstance(head, BoundVar):
                if head.index > len(ctx):
                    raise KernelTypeError(f"dangling bound variable {head.index}")
                if ctx[head.index - 1] is not head.type:
                    raise KernelTypeError(
                        f"variable {head.index} annotated {pretty_type(head.type)}, "
                        f"bound at {pretty_type(ctx[head.index - 1])}"
                    )
            for arg in node.args:
                if isinstance(arg, Term):
                    go(arg, ctx)
        elif isinstance(node, TermAbs):
            go(node.body, (node.var_type,) + ctx)
        elif isinstance(node, TypeAbs):
            go(node.body, tuple(substitute_type(c, shift_one) for c in ctx))
        elif isinstance(node, Redex):
            go(node.fun, ctx)
            for arg in node.args:
                if isinstance(arg, Term):
                    go(arg, ctx)

    go(t, tuple(context))


# ---------------------------------------------------------------------------
# printing


def _atomic_type(ty: Type) -> bool:
    return isinstance(ty, (BaseType, TypeVar))


def _sub(ty: Type, ascii: bool) -> str:
    text = pretty_type(ty, compact=True, ascii=ascii)
    return f"_{text}" if _atomic_type(ty) else f"_{{{text}}}"


def pretty(t: Term, style: str = "nameless", *, ascii: bool = False) -> str:
    """Render a term.

    ``nameless``: curried applications, constants subscripted with their
    types, type indices underlined.  ``spine``: head · (arg; ...; arg).
    ``named``: binder names invented from nesting depth.

    The ASCII encoding replaces Λ, λ, →, ∀, · and the underline with
    ``/\\``, ``\\``, ``->``, ``!``, ``.`` and a trailing ``_``.
    """
    lam = "\\" if ascii else "λ"
    tlam = "/\\" if ascii else "Λ"
    dot = "." if ascii else "·"

    if style == "named":
        return _pretty_named(t, ascii)
    if style not in ("nameless", "spine"):
        raise ValueError(f"unknown style {style!r}")

    def type_arg(ty: Type) -> str:
        text = pretty_type(ty, compact=True, ascii=ascii)
        if style == "nameless" and not _atomic_type(ty):
            return f"({text})"
        return text

    def head_text(head: Head) -> str:
        if isinstance(head, BoundVar):
            return str(head.index)
        if style == "spine":
            return head.display
        return head.display + _sub(head.type, ascii)

    def wrap(arg: Arg) -> str:
        if isinstance(arg, Type):
            return type_arg(arg)
        text = go(arg)
        if style == "nameless" and not (isinstance(arg, Root) and not arg.args):
            return f"({text})"
        return text

    def spine(first: str, args: tuple) -> str:
        if style == "spine":
            inner = "; ".join(type_arg(a) if isinstance(a, Type) else go(a) for a in args)
            return f"{first} {dot} ({inner})"
        text = first
        for i, arg in enumerate(args):
            left = text if i == 0 else f"({text})"
            text = f"{left} {wrap(arg)}"
        return text

    def go(node: Term) -> str:
        if isinstance(node, Root):
            if not node.args:
                return head_text(node.head)
            return spine(head_text(node.head), node.args)
        if isinstance(node, TermAbs):
            return f"{lam}{_sub(node.var_type, ascii)} {go(node.body)}"
        if isinstance(node, TypeAbs):
            return f"{tlam} {go(node.body)}"
        if isinstance(node, Redex):
            return spine(f"({go(node.fun)})", node.args)
        return f"({go(node.body)})[{node.subst!r}]"

    return go(t)


def _pretty_named(t: Term, ascii: bool) -> str:
    lam = "\\" if ascii else "λ"
    tlam = "/\\" if ascii else "Λ"
    tnames = "abcdefgh" if ascii else "αβγδεζηθ"

    def tname(d: int) -> str:
        return tnames[d % len(tnames)] + (str(d // len(tnames)) if d >= len(tnames) else "")

    def ty_text(ty: Type, tdepth: int) -> str:
        # rename type indices relative to the current type depth
        def go_ty(x: Type, extra: int) -> str:
            if isinstance(x, BaseType):
                return base_display(x.name, ascii)
            if isinstance(x, TypeVar):
                level = tdepth + extra - x.index
                return tname(level) if level >= 0 else f"?{-level}"
            if isinstance(x, Arrow):
                left = go_ty(x.domain, extra)
                if isinstance(x.domain, (Arrow, Forall)):
                    left = f"({left})"
                return f"{left} {'->' if ascii else '→'} {go_ty(x.codomain, extra)}"
            return f"{'!' if ascii else '∀'}{tname(tdepth + extra)}. {go_ty(x.body, extra + 1)}"

        return go_ty(ty, 0)

    def go(node: Term, names: list[str], tdepth: int) -> str:
        if isinstance(node, Root):
            head = node.head
            if isinstance(head, BoundVar):
                text = names[-head.index] if head.index <= len(names) else f"?{head.index}"
            else:
                text = head.display
            for arg in node.args:
                text = f"{text} {arg_text(arg, names, tdepth)}"
            return text
        if isinstance(node, TermAbs):
            name = f"x{len(names) + 1}"
            body = go(node.body, names + [name], tdepth)
            return f"{lam}{name}:{ty_text(node.var_type, tdepth)}. {body}"
        if isinstance(node, TypeAbs):
            return f"{tlam}{tname(tdepth)}. {go(node.body, names, tdepth + 1)}"
        if isinstance(node, Redex):
            text = f"({go(node.fun, names, tdepth)})"
            for arg in node.args:
                text = f"{text} {arg_text(arg, names, tdepth)}"
            return text
        return f"({go(node.body, names, tdepth)})[{node.subst!r}]"

    def arg_text(arg: Arg, names: list[str], tdepth: int) -> str:
        if isinstance(arg, Type):
            text = ty_text(arg, tdepth)
            return text if _atomic_type(arg) else f"({text})"
        text = go(arg, names, tdepth)
        if isinstance(arg, Root) and not arg.args:
            return text
        return f"({text})"

    return go(t, [], 0)
