"""System F types with de Bruijn type variables and perfect sharing.

Every type is built through its class constructor, which consults the
shared :class:`TypeBank`; structurally equal types are therefore the very
same Python object and may be compared with ``is``.

Type variable indices start at 1 (1 = innermost enclosing ``Forall``).
"""

from __future__ import annotations

import threading
from typing import Iterator

__all__ = [
    "Type",
    "BaseType",
    "TypeVar",
    "Arrow",
    "Forall",
    "TypeSubst",
    "TShift",
    "TCons",
    "TypeBank",
    "TYPE_BANK",
    "O",
    "I",
    "TTYPE",
    "intern_type",
    "substitute_type",
    "compose_type_subst",
    "lift_type_subst",
    "instantiate_forall",
    "shift_type",
    "occurs_type_var",
    "pretty_type",
    "arrows",
    "split_arrows",
    "type_size",
]


class TypeBank:
    """Hash-consing table for types and type substitutions."""

    def __init__(self) -> None:
        self._table: dict[tuple, object] = {}
        self._lock = threading.Lock()
        self._next_id = 0
        self.subst_cache: dict[tuple, Type] = {}

    def intern(self, key: tuple, build):
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


TYPE_BANK = TypeBank()


class Type:
    """Interned type node. Equality is identity."""

    __slots__ = ("id", "max_free", "depth", "__weakref__")

    id: int
    max_free: int
    depth: int

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {pretty_type(self)}>"

    def __str__(self) -> str:
        return pretty_type(self)

    # identity semantics are inherited from object; keep them explicit
    __eq__ = object.__eq__
    __hash__ = object.__hash__


def _node(cls, key, fill):
    def build(ident: int):
        obj = object.__new__(cls)
        obj.id = ident
        fill(obj)
        return obj

    return TYPE_BANK.intern(key, build)


class BaseType(Type):
    """A signature type constant such as ``$o`` or ``$i``."""

    __slots__ = ("name",)

    def __new__(cls, name: str) -> BaseType:
        def fill(obj):
            obj.name = name
            obj.max_free = 0
            obj.depth = 1

        return _node(cls, ("base", name), fill)


class TypeVar(Type):
    """de Bruijn type variable; ``index`` >= 1."""

    __slots__ = ("index",)

    def __new__(cls, index: int) -> TypeVar:
        if index < 1:
            raise ValueError(f"type variable index must be >= 1, got {index}")

        def fill(obj):
            obj.index = index
            obj.max_free = index
            obj.depth = 1

        return _node(cls, ("var", index), fill)


class Arrow(Type):
    __slots__ = ("domain", "codomain")

    def __new__(cls, domain: Type, codomain: Type) -> Arrow:
        if not isinstance(domain, Type) or not isinstance(codomain, Type):
            raise TypeError("Arrow children must be types")

        def fill(obj):
            obj.domain = domain
            obj.codomain = codomain
            obj.max_free = max(domain.max_free, codomain.max_free)
            obj.depth = 1 + max(domain.depth, codomain.depth)

        return _node(cls, ("arrow", domain, codomain), fill)


class Forall(Type):
    """Polymorphic type; its body refers to the bound variable as index 1."""

    __slots__ = ("body",)

    def __new__(cls, body: Type) -> Forall:
        if not isinstance(body, Type):
            raise TypeError("Forall body must be a type")

        def fill(obj):
            obj.body = body
            obj.max_free = max(body.max_free - 1, 0)
            obj.depth = 1 + body.depth

        return _node(cls, ("forall", body), fill)


O = BaseType("$o")
I = BaseType("$i")
# kind of types in TPTP declarations (`t: $tType`); never the type of a term
TTYPE = BaseType("$tType")


def intern_type(node: tuple) -> Type:
    """Intern a type from a tagged tuple, e.g. ``("arrow", I, O)``."""
    tag, *args = node
    builders = {"base": BaseType, "var": TypeVar, "arrow": Arrow, "forall": Forall}
    try:
        return builders[tag](*args)
    except KeyError:
        raise ValueError(f"unknown type node tag {tag!r}") from None


def arrows(*types: Type) -> Type:
    """Right-nested arrow type ``t1 → t2 → ... → tn``."""
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


def split_arrows(ty: Type) -> tuple[list[Type], Type]:
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.domain)
        ty = ty.codomain
    return args, ty


def type_size(ty: Type) -> int:
    if isinstance(ty, Arrow):
        return 1 + type_size(ty.domain) + type_size(ty.codomain)
    if isinstance(ty, Forall):
        return 1 + type_size(ty.body)
    return 1


# ---------------------------------------------------------------------------
# substitutions


class TypeSubst:
    """Explicit substitution on type indices (shift / cons)."""

    __slots__ = ("id", "__weakref__")
    __eq__ = object.__eq__
    __hash__ = object.__hash__


def _subst_node(cls, key, fill):
    def build(ident: int):
        obj = object.__new__(cls)
        obj.id = ident
        fill(obj)
        return obj

    return TYPE_BANK.intern(key, build)


class TShift(TypeSubst):
    """Maps index ``i`` to ``i + n``. ``TShift(0)`` is the identity."""

    __slots__ = ("n",)

    def __new__(cls, n: int) -> TShift:
        if n < 0:
            raise ValueError("shift amount must be non-negative")

        def fill(obj):
            obj.n = n

        return _subst_node(cls, ("tshift", n), fill)

    def __repr__(self) -> str:
        return f"↑{self.n}"


class TCons(TypeSubst):
    """Maps index 1 to ``head`` and ``i + 1`` to ``rest(i)``."""

    __slots__ = ("head", "rest")

    def __new__(cls, head: Type, rest: TypeSubst) -> TCons:
        def fill(obj):
            obj.head = head
            obj.rest = rest

        return _subst_node(cls, ("tcons", head, rest), fill)

    def __repr__(self) -> str:
        return f"{pretty_type(self.head)} . {self.rest!r}"


TYPE_ID = TShift(0)


def lookup_type_subst(sigma: TypeSubst, index: int) -> Type:
    while isinstance(sigma, TCons):
        if index == 1:
            return sigma.head
        index -= 1
        sigma = sigma.rest
    return TypeVar(index + sigma.n)


def substitute_type(ty: Type, sigma: TypeSubst) -> Type:
    """Capture-free simultaneous substitution of type indices."""
    if sigma is TYPE_ID or ty.max_free == 0:
        return ty
    cache = TYPE_BANK.subst_cache
    key = (ty, sigma)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if isinstance(ty, TypeVar):
        result = lookup_type_subst(sigma, ty.index)
    elif isinstance(ty, Arrow):
        result = Arrow(substitute_type(ty.domain, sigma), substitute_type(ty.codomain, sigma))
    elif isinstance(ty, Forall):
        result = Forall(substitute_type(ty.body, lift_type_subst(sigma)))
    else:
        result = ty
    cache[key] = result
    return result


def compose_type_subst(first: TypeSubst, then: TypeSubst) -> TypeSubst:
    """Substitution equivalent to applying ``first`` and then ``then``."""
    if isinstance(first, TCons):
        return TCons(substitute_type(first.head, then), compose_type_subst(first.rest, then))
    n = first.n
    while n > 0:
        if isinstance(then, TShift):
            return TShift(n + then.n)
        then = then.rest
        n -= 1
    return then


def lift_type_subst(sigma: TypeSubst) -> TypeSubst:
    """Push ``sigma`` under one type binder."""
    if sigma is TYPE_ID:
        return sigma
    return TCons(TypeVar(1), compose_type_subst(sigma, TShift(1)))


def shift_type(ty: Type, amount: int = 1) -> Type:
    return substitute_type(ty, TShift(amount))


def instantiate_forall(ty: Forall, arg: Type) -> Type:
    """Result type of applying a term of type ``ty`` to the type ``arg``."""
    return substitute_type(ty.body, TCons(arg, TYPE_ID))


def occurs_type_var(ty: Type, index: int) -> bool:
    """True iff the type variable at ``index`` occurs free in ``ty``."""
    if index < 1:
        raise ValueError("index must be >= 1")
    if ty.max_free < index:
        return False
    if isinstance(ty, TypeVar):
        return ty.index == index
    if isinstance(ty, Arrow):
        return occurs_type_var(ty.domain, index) or occurs_type_var(ty.codomain, index)
    if isinstance(ty, Forall):
        return occurs_type_var(ty.body, index + 1)
    return False


# ---------------------------------------------------------------------------
# printing

UNDERLINE = "̲"
_DISPLAY = {"$o": "o", "$i": "ι"}
_DISPLAY_ASCII = {"$o": "o", "$i": "i"}
_GREEK = "αβγδεζηθκμνξπρστφχψω"


def _greek(depth: int) -> str:
    if depth < len(_GREEK):
        return _GREEK[depth]
    return f"{_GREEK[depth % len(_GREEK)]}{depth // len(_GREEK)}"


def base_display(name: str, ascii: bool = False) -> str:
    table = _DISPLAY_ASCII if ascii else _DISPLAY
    return table.get(name, name)


def pretty_type(ty: Type, style: str = "nameless", *, compact: bool = False, ascii: bool = False) -> str:
    """Render a type.

    ``nameless`` marks type indices with a combining underline (``1̲``);
    ``named`` invents Greek binder names. ``compact`` drops blanks, as used
    for subscripts in term rendering. ``ascii`` uses ``->``, ``!`` and a
    trailing ``_`` for type indices.
    """
    if style not in ("nameless", "named"):
        raise ValueError(f"unknown style {style!r}")
    arrow = "->" if ascii else "→"
    forall = "!" if ascii else "∀"
    arrow_sep = arrow if compact else f" {arrow} "

    def go(t: Type, depth: int) -> str:
        if isinstance(t, BaseType):
            return base_display(t.name, ascii)
        if isinstance(t, TypeVar):
            if style == "named":
                if t.index <= depth:
                    return _greek(depth - t.index)
                return f"?{t.index - depth}"
            return f"{t.index}_" if ascii else f"{t.index}{UNDERLINE}"
        if isinstance(t, Arrow):
            left = go(t.domain, depth)
            if isinstance(t.domain, (Arrow, Forall)):
                left = f"({left})"
            return left + arrow_sep + go(t.codomain, depth)
        if isinstance(t, Forall):
            body = go(t.body, depth + 1)
            if style == "named":
                sep = "." if compact else ". "
                return f"{forall}{_greek(depth)}{sep}{body}"
            return f"{forall}{body}" if compact else f"{forall}. {body}"
        raise TypeError(f"not a type: {t!r}")

    return go(ty, 0)
