"""Random well-typed System F terms and small benchmark corpora."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .terms import (
    BoundVar,
    Closure,
    Cons,
    Constant,
    Redex,
    Root,
    Shift,
    Signature,
    Subst,
    Term,
    TermAbs,
    TypeAbs,
    mk_app,
)
from .types import (
    Arrow,
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

__all__ = [
    "sample_signature",
    "TermGenerator",
    "church_type",
    "church_numeral",
    "church_exp",
    "church_corpus",
]


def sample_signature() -> Signature:
    """A signature with first-order, higher-order and polymorphic constants."""
    sig = Signature()
    a1 = TypeVar(1)
    sig.declare("a", I)
    sig.declare("b", I)
    sig.declare("q", O)
    sig.declare("f", Arrow(I, I))
    sig.declare("g", arrows(I, I, I))
    sig.declare("p", Arrow(I, O))
    sig.declare("h", Arrow(Arrow(I, I), I))
    sig.declare("arb", Forall(a1))
    sig.declare("pid", Forall(Arrow(a1, a1)))
    sig.declare("twice", Forall(arrows(Arrow(a1, a1), a1, a1)))
    sig.declare("pick", Forall(arrows(O, a1, a1, a1)))
    return sig


@dataclass
class TermGenerator:
    """Top-down generator of closed well-typed terms.

    Terms contain β-redexes, type redexes and (optionally) explicit
    closures, so normalization has real work to do.  ``base_only_type_args``
    restricts type arguments of redexes to base types.
    """

    rng: random.Random
    sig: Signature = field(default_factory=sample_signature)
    max_type_depth: int = 4
    max_size: int = 40
    closures: bool = True
    base_only_type_args: bool = False

    def __post_init__(self) -> None:
        self.constants: list[Constant] = self.sig.user_constants()

    # -- types --------------------------------------------------------------

    def gen_type(self, tdepth: int, depth: int | None = None) -> Type:
        if depth is None:
            depth = self.rng.randint(1, self.max_type_depth)
        rng = self.rng
        if depth <= 1 or rng.random() < 0.35:
            choices: list[Type] = [I, I, O]
            choices.extend(TypeVar(k) for k in range(1, tdepth + 1))
            return rng.choice(choices)
        if rng.random() < 0.15:
            return Forall(self.gen_type(tdepth + 1, depth - 1))
        return Arrow(self.gen_type(tdepth, depth - 1), self.gen_type(tdepth, depth - 1))

    def _arg_type(self, tdepth: int) -> Type:
        if self.base_only_type_args:
            return self.rng.choice([I, O])
        return self.gen_type(tdepth, self.rng.randint(1, 2))

    # -- terms --------------------------------------------------------------

    def term(self, ty: Type | None = None) -> Term:
        """A closed term of size at most ``max_size``."""
        while True:
            target = ty if ty is not None else self.gen_type(0)
            budget = self.rng.randint(3, self.max_size)
            t = self.gen((), 0, target, budget)
            if t.size <= self.max_size and t.type.depth <= self.max_type_depth + 1:
                return t

    def gen(self, ctx: tuple[Type, ...], tdepth: int, ty: Type, size: int) -> Term:
        rng = self.rng
        if size <= 1:
            return self.atom(ctx, tdepth, ty, size)
        options = ["head", "head", "redex"]
        if isinstance(ty, Arrow):
            options += ["lam", "lam"]
        if isinstance(ty, Forall):
            options += ["tlam", "tlam"]
        if tdepth < 3 and ty.depth < self.max_type_depth:
            options.append("tredex")
        if self.closures:
            options.append("closure")
        choice = rng.choice(options)
        if choice == "lam":
            return TermAbs(ty.domain, self.gen((ty.domain,) + ctx, tdepth, ty.codomain, size - 1))
        if choice == "tlam":
            shifted = tuple(shift_type(c) for c in ctx)
            return TypeAbs(self.gen(shifted, tdepth + 1, ty.body, size - 1))
        if choice in ("redex", "closure"):
            arg_ty = self.gen_type(tdepth, rng.randint(1, 2))
            k = rng.randint(1, max(size - 2, 1))
            body = self.gen((arg_ty,) + ctx, tdepth, ty, k)
            arg = self.gen(ctx, tdepth, arg_ty, max(size - 1 - k, 1))
            if choice == "redex":
                return Redex(TermAbs(arg_ty, body), (arg,))
            return Closure(body, Subst(Cons(arg, Shift(0))))
        if choice == "tredex":
            arg_ty = self._arg_type(tdepth)
            shifted = tuple(shift_type(c) for c in ctx)
            body = self.gen(shifted, tdepth + 1, shift_type(ty), size - 1)
            return Redex(TypeAbs(body), (arg_ty,))
        return self.head_app(ctx, tdepth, ty, size)

    def atom(self, ctx, tdepth, ty, size) -> Term:
        rng = self.rng
        bound = [Root(BoundVar(i, c)) for i, c in enumerate(ctx, 1) if c is ty]
        consts = [Root(c) for c in self.constants if c.type is ty]
        # favour bound variables so that substitution has something to do
        if bound and rng.random() < 0.75:
            return rng.choice(bound)
        if consts and rng.random() < 0.85:
            return rng.choice(consts)
        if isinstance(ty, Arrow) and rng.random() < 0.8:
            # identity-like or constant function instead of an opaque `arb`
            body = self.atom((ty.domain,) + ctx, tdepth, ty.codomain, 1)
            return TermAbs(ty.domain, body)
        return Root(self.sig["arb"], (ty,))

    def head_app(self, ctx, tdepth, ty, size) -> Term:
        """A head (variable or constant) applied to enough arguments to reach ``ty``."""
        plans = []
        heads = [BoundVar(i, c) for i, c in enumerate(ctx, 1)] + list(self.constants)
        for head in heads:
            head_ty = head.type
            type_args: tuple = ()
            if isinstance(head_ty, Forall):
                _, result = split_arrows(head_ty.body)
                if result is TypeVar(1):
                    inst = ty
                else:
                    continue
                if inst.max_free > tdepth:
                    continue
                head_ty = instantiate_forall(head_ty, inst)
                type_args = (inst,)
            doms, _ = split_arrows(head_ty)
            cur = head_ty
            for k in range(len(doms) + 1):
                if cur is ty:
                    plans.append((head, type_args, doms[:k]))
                    break
                if not isinstance(cur, Arrow):
                    break
                cur = cur.codomain
        if not plans:
            return self.atom(ctx, tdepth, ty, size)
        head, type_args, doms = self.rng.choice(plans)
        if not doms:
            return Root(head, type_args)
        budget = max(size - 1, len(doms))
        cuts = sorted(self.rng.randint(1, max(budget - 1, 1)) for _ in range(len(doms) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [budget])]
        args = tuple(self.gen(ctx, tdepth, d, max(p, 1)) for d, p in zip(doms, parts))
        return Root(head, type_args + args)


# ---------------------------------------------------------------------------
# Church numerals (polymorphic encoding)


def church_type() -> Type:
    a = TypeVar(1)
    return Forall(arrows(Arrow(a, a), a, a))


def church_numeral(n: int) -> Term:
    """Λα. λf:α→α. λx:α. fⁿ x"""
    a = TypeVar(1)
    body: Term = Root(BoundVar(1, a))
    for _ in range(n):
        body = Root(BoundVar(2, Arrow(a, a)), (body,))
    return TypeAbs(TermAbs(Arrow(a, a), TermAbs(a, body)))


def church_exp(base: int, exponent: int) -> Term:
    """``base ^ exponent`` as the redex Λα. (exponent [α→α]) (base [α])."""
    a = TypeVar(1)
    m = church_numeral(base)
    n = church_numeral(exponent)
    body = mk_app(n, (Arrow(a, a), mk_app(m, (a,))))
    return TypeAbs(body)


def church_corpus() -> list[Term]:
    return [church_exp(2, 2), church_exp(3, 2), church_exp(2, 3)]
