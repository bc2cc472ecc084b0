"""β-normalization strategies and η-long expansion.

All strategies are leftmost-outermost.  They differ in how explicit
substitutions are handled:

========  ====================  ===============================
strategy  composition           closures
========  ====================  ===============================
``BASE``  none (meta-level)     immediate full substitution
``SS``    strict                propagated eagerly when built
``SL``    strict                suspended, pushed on head demand
``LS``    lazy (deferred node)  propagated eagerly when built
``LL``    lazy (deferred node)  suspended, pushed on head demand
========  ====================  ===============================

Strict composition merges adjacent substitutions immediately by walking
the cons chain; lazy composition records a :class:`~holkit.terms.Comp`
node that is resolved only when a variable lookup reaches it.

Since β-normal forms contain no closures or redexes and terms are
perfectly shared, agreement of strategies is identity of results.
"""

from __future__ import annotations

import csv
import enum
import io
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .terms import (
    ID_SUBST,
    BoundVar,
    Closure,
    Comp,
    Cons,
    Constant,
    Redex,
    Root,
    Shift,
    Subst,
    Term,
    TermAbs,
    TermSubst,
    TypeAbs,
    mk_app,
)
from .types import (
    TYPE_ID,
    Arrow,
    Forall,
    TCons,
    TShift,
    Type,
    TypeSubst,
    TypeVar,
    compose_type_subst,
    lift_type_subst,
    substitute_type,
)

__all__ = [
    "Strategy",
    "NormalizationStats",
    "ResourceLimit",
    "StrategyMismatch",
    "DEFAULT_STEP_BUDGET",
    "beta_normalize",
    "type_beta_normalize",
    "eta_long",
    "is_eta_long",
    "is_beta_normal",
    "shift_term",
    "instantiate",
    "BenchmarkRow",
    "BenchmarkTable",
    "benchmark_strategies",
]

DEFAULT_STEP_BUDGET = 10**7

# deep terms need more than the default limit; beyond about 10000 frames
# the default 8 MB C stack can overflow before RecursionError is raised
if sys.getrecursionlimit() < 10000:
    sys.setrecursionlimit(10000)


class Strategy(enum.Enum):
    BASE = ("BASE", None, None)
    SS = ("SS", "strict", "eager")
    SL = ("SL", "strict", "lazy")
    LS = ("LS", "lazy", "eager")
    LL = ("LL", "lazy", "lazy")

    def __init__(self, label: str, composition: str | None, closure: str | None) -> None:
        self.label = label
        self.composition = composition
        self.closure = closure

    @classmethod
    def from_name(cls, name: str) -> Strategy:
        try:
            return cls[name.upper()]
        except KeyError:
            names = ", ".join(s.name for s in cls)
            raise ValueError(f"unknown strategy {name!r} (expected one of {names})") from None


@dataclass
class NormalizationStats:
    reduction_steps: int = 0
    closures_built: int = 0
    subst_compositions: int = 0
    wall_time_ns: int = 0

    def __iadd__(self, other: NormalizationStats) -> NormalizationStats:
        self.reduction_steps += other.reduction_steps
        self.closures_built += other.closures_built
        self.subst_compositions += other.subst_compositions
        self.wall_time_ns += other.wall_time_ns
        return self


class ResourceLimit(RuntimeError):
    """The configured β-step budget was exhausted."""


class StrategyMismatch(AssertionError):
    """Two strategies disagreed on a normal form."""


_SHIFT1 = Subst(Shift(1), TYPE_ID)
_TSHIFT1 = Subst(Shift(0), TShift(1))


class _Budget:
    __slots__ = ("stats", "budget")

    def __init__(self, stats: NormalizationStats, budget: int) -> None:
        self.stats = stats
        self.budget = budget

    def step(self) -> None:
        self.stats.reduction_steps += 1
        if self.stats.reduction_steps > self.budget:
            raise ResourceLimit(f"β-step budget of {self.budget} exceeded")


# ---------------------------------------------------------------------------
# closure-based strategies


class _ClosureMachine:
    def __init__(self, strategy: Strategy, budget: int) -> None:
        self.strict = strategy.composition == "strict"
        self.eager = strategy.closure == "eager"
        self.stats = NormalizationStats()
        self.meter = _Budget(self.stats, budget)
        self._nf: dict[Term, Term] = {}
        self._full: dict[tuple, Term] = {}

    # -- substitutions ------------------------------------------------------

    def lookup(self, tm: TermSubst, i: int) -> int | Term:
        while True:
            if isinstance(tm, Cons):
                if i == 1:
                    return tm.front
                i -= 1
                tm = tm.rest
            elif isinstance(tm, Shift):
                return i + tm.n
            else:
                return self.apply_front(self.lookup(tm.first, i), tm.then)

    def apply_front(self, front: int | Term, then: Subst) -> int | Term:
        if isinstance(front, int):
            return self.lookup(then.tm, front)
        return self.close(front, then)

    def compose(self, first: Subst, then: Subst) -> Subst:
        if first is ID_SUBST:
            return then
        if then is ID_SUBST:
            return first
        self.stats.subst_compositions += 1
        return Subst(self.compose_tm(first.tm, then), compose_type_subst(first.ty, then.ty))

    def compose_tm(self, first: TermSubst, then: Subst) -> TermSubst:
        if isinstance(first, Shift) and first.n == 0:
            return then.tm
        if then is ID_SUBST:
            return first
        if isinstance(first, Shift):
            return self.drop(then.tm, first.n)
        if not self.strict:
            return Comp(first, then)
        if isinstance(first, Cons):
            return Cons(self.apply_front(first.front, then), self.compose_tm(first.rest, then))
        return self.compose_tm(first.first, self.compose(first.then, then))

    def drop(self, tm: TermSubst, n: int) -> TermSubst:
        while n > 0:
            if isinstance(tm, Shift):
                return Shift(tm.n + n)
            if isinstance(tm, Cons):
                tm = tm.rest
                n -= 1
            else:
                inner = self.drop(tm.first, n)
                if isinstance(inner, Shift) and inner.n == 0:
                    return tm.then.tm
                return Comp(inner, tm.then)
        return tm

    def lift_tm(self, sigma: Subst) -> Subst:
        if sigma is ID_SUBST:
            return sigma
        self.stats.subst_compositions += 1
        return Subst(Cons(1, self.compose_tm(sigma.tm, _SHIFT1)), sigma.ty)

    def lift_ty(self, sigma: Subst) -> Subst:
        if sigma is ID_SUBST:
            return sigma
        self.stats.subst_compositions += 1
        return Subst(self.compose_tm(sigma.tm, _TSHIFT1), lift_type_subst(sigma.ty))

    # -- closures -----------------------------------------------------------

    def close(self, t: Term, sigma: Subst) -> Term:
        if sigma is ID_SUBST or (t.max_tm == 0 and t.max_ty == 0):
            return t
        if self.eager:
            return self.push_full(t, sigma)
        self.stats.closures_built += 1
        return Closure(t, sigma)

    def _args(self, args: tuple, sigma: Subst) -> tuple:
        return tuple(
            substitute_type(a, sigma.ty) if isinstance(a, Type) else self.close(a, sigma)
            for a in args
        )

    def push(self, t: Term, sigma: Subst) -> Term:
        """Propagate ``sigma`` one constructor into ``t``."""
        if sigma is ID_SUBST or (t.max_tm == 0 and t.max_ty == 0):
            return t
        if isinstance(t, Root):
            head = t.head
            args = self._args(t.args, sigma)
            if isinstance(head, Constant):
                return Root(head, args)
            front = self.lookup(sigma.tm, head.index)
            if isinstance(front, int):
                return Root(BoundVar(front, substitute_type(head.type, sigma.ty)), args)
            return mk_app(front, args)
        if isinstance(t, TermAbs):
            return TermAbs(substitute_type(t.var_type, sigma.ty), self.close(t.body, self.lift_tm(sigma)))
        if isinstance(t, TypeAbs):
            return TypeAbs(self.close(t.body, self.lift_ty(sigma)))
        if isinstance(t, Redex):
            return mk_app(self.close(t.fun, sigma), self._args(t.args, sigma))
        return self.close(t.body, self.compose(t.subst, sigma))

    def push_full(self, t: Term, sigma: Subst) -> Term:
        """Apply ``sigma`` throughout ``t``; the result has no closures."""
        if t.normal and (sigma is ID_SUBST or (t.max_tm == 0 and t.max_ty == 0)):
            return t
        key = (t, sigma)
        hit = self._full.get(key)
        if hit is not None:
            return hit
        if isinstance(t, Closure):
            result = self.push_full(t.body, self.compose(t.subst, sigma))
        elif isinstance(t, (Root, Redex)):
            args = tuple(
                substitute_type(a, sigma.ty) if isinstance(a, Type) else self.push_full(a, sigma)
                for a in t.args
            )
            if isinstance(t, Redex):
                result = mk_app(self.push_full(t.fun, sigma), args)
            elif isinstance(t.head, Constant):
                result = Root(t.head, args)
            else:
                front = self.lookup(sigma.tm, t.head.index)
                if isinstance(front, int):
                    result = Root(BoundVar(front, substitute_type(t.head.type, sigma.ty)), args)
                else:
                    result = mk_app(self.push_full(front, ID_SUBST), args)
        elif isinstance(t, TermAbs):
            body = self.push_full(t.body, self.lift_tm(sigma))
            result = TermAbs(substitute_type(t.var_type, sigma.ty), body)
        else:
            result = TypeAbs(self.push_full(t.body, self.lift_ty(sigma)))
        self._full[key] = result
        return result

    # -- reduction ----------------------------------------------------------

    def whnf(self, t: Term) -> Term:
        while True:
            if isinstance(t, Closure):
                t = self.push(t.body, t.subst)
                continue
            if isinstance(t, Redex):
                fun = self.whnf(t.fun)
                args = t.args
                if isinstance(fun, Root):
                    return mk_app(fun, args)
                self.meter.step()
                if isinstance(fun, TermAbs):
                    body = self.close(fun.body, Subst(Cons(args[0], Shift(0)), TYPE_ID))
                else:
                    body = self.close(fun.body, Subst(Shift(0), TCons(args[0], TYPE_ID)))
                t = mk_app(body, args[1:])
                continue
            return t

    def nf(self, t: Term) -> Term:
        if t.normal:
            return t
        hit = self._nf.get(t)
        if hit is not None:
            return hit
        if isinstance(t, Root):
            result = Root(t.head, tuple(a if isinstance(a, Type) else self.nf(a) for a in t.args))
        elif isinstance(t, TermAbs):
            result = TermAbs(t.var_type, self.nf(t.body))
        elif isinstance(t, TypeAbs):
            result = TypeAbs(self.nf(t.body))
        else:
            result = self.nf(self.whnf(t))
        self._nf[t] = result
        return result


# ---------------------------------------------------------------------------
# BASE: meta-level substitution with shifting


def _shift_type_above(ty: Type, amount: int, cutoff: int) -> Type:
    if amount == 0 or ty.max_free <= cutoff:
        return ty
    sigma: TypeSubst = TShift(amount)
    for _ in range(cutoff):
        sigma = lift_type_subst(sigma)
    return substitute_type(ty, sigma)


def shift_term(t: Term, d_tm: int = 1, d_ty: int = 0, c_tm: int = 0, c_ty: int = 0) -> Term:
    """Shift loose term indices above ``c_tm`` by ``d_tm`` and loose type
    indices above ``c_ty`` by ``d_ty``.  Closures must be expanded first."""
    memo: dict[tuple, Term] = {}

    def go(node: Term, ctm: int, cty: int) -> Term:
        if node.max_tm <= ctm and node.max_ty <= cty:
            return node
        key = (node, ctm, cty)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Root):
            args = tuple(
                _shift_type_above(a, d_ty, cty) if isinstance(a, Type) else go(a, ctm, cty)
                for a in node.args
            )
            head = node.head
            if isinstance(head, BoundVar):
                index = head.index + d_tm if head.index > ctm else head.index
                head = BoundVar(index, _shift_type_above(head.type, d_ty, cty))
            result = Root(head, args)
        elif isinstance(node, TermAbs):
            result = TermAbs(_shift_type_above(node.var_type, d_ty, cty), go(node.body, ctm + 1, cty))
        elif isinstance(node, TypeAbs):
            result = TypeAbs(go(node.body, ctm, cty + 1))
        elif isinstance(node, Redex):
            args = tuple(
                _shift_type_above(a, d_ty, cty) if isinstance(a, Type) else go(a, ctm, cty)
                for a in node.args
            )
            result = mk_app(go(node.fun, ctm, cty), args)
        else:
            raise ValueError("shift_term does not accept closures")
        memo[key] = result
        return result

    return go(t, c_tm, c_ty)


def instantiate(body: Term, arg: Term) -> Term:
    """``body`` with term index 1 replaced by ``arg``; other indices drop by one."""
    memo: dict[tuple, Term] = {}
    shifted: dict[tuple, Term] = {}

    def arg_at(dtm: int, dty: int) -> Term:
        key = (dtm, dty)
        hit = shifted.get(key)
        if hit is None:
            hit = shifted[key] = shift_term(arg, dtm, dty)
        return hit

    def go(node: Term, dtm: int, dty: int) -> Term:
        if node.max_tm <= dtm:
            return node
        key = (node, dtm, dty)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Root):
            args = tuple(a if isinstance(a, Type) else go(a, dtm, dty) for a in node.args)
            head = node.head
            if isinstance(head, BoundVar) and head.index > dtm:
                if head.index == dtm + 1:
                    result = mk_app(arg_at(dtm, dty), args)
                else:
                    result = Root(BoundVar(head.index - 1, head.type), args)
            else:
                result = Root(head, args)
        elif isinstance(node, TermAbs):
            result = TermAbs(node.var_type, go(node.body, dtm + 1, dty))
        elif isinstance(node, TypeAbs):
            result = TypeAbs(go(node.body, dtm, dty + 1))
        elif isinstance(node, Redex):
            args = tuple(a if isinstance(a, Type) else go(a, dtm, dty) for a in node.args)
            result = mk_app(go(node.fun, dtm, dty), args)
        else:
            raise ValueError("instantiate does not accept closures")
        memo[key] = result
        return result

    return go(body, 0, 0)


def instantiate_type(body: Term, ty: Type) -> Term:
    """``body`` with type index 1 replaced by ``ty``; other type indices drop by one."""
    memo: dict[tuple, Term] = {}

    def sub(x: Type, dty: int) -> Type:
        sigma: TypeSubst = TCons(ty, TYPE_ID)
        for _ in range(dty):
            sigma = lift_type_subst(sigma)
        return substitute_type(x, sigma)

    def go(node: Term, dty: int) -> Term:
        if node.max_ty <= dty:
            return node
        key = (node, dty)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Root):
            args = tuple(sub(a, dty) if isinstance(a, Type) else go(a, dty) for a in node.args)
            head = node.head
            if isinstance(head, BoundVar):
                head = BoundVar(head.index, sub(head.type, dty))
            result = Root(head, args)
        elif isinstance(node, TermAbs):
            result = TermAbs(sub(node.var_type, dty), go(node.body, dty))
        elif isinstance(node, TypeAbs):
            result = TypeAbs(go(node.body, dty + 1))
        elif isinstance(node, Redex):
            args = tuple(sub(a, dty) if isinstance(a, Type) else go(a, dty) for a in node.args)
            result = mk_app(go(node.fun, dty), args)
        else:
            raise ValueError("instantiate_type does not accept closures")
        memo[key] = result
        return result

    return go(body, 0)


def expand_closures(t: Term) -> Term:
    """Replace every closure by the term it denotes (no β-reduction)."""
    if t.normal:
        return t
    return _ClosureMachine(Strategy.SS, DEFAULT_STEP_BUDGET).push_full(t, ID_SUBST)


class _BaseMachine:
    def __init__(self, budget: int) -> None:
        self.stats = NormalizationStats()
        self.meter = _Budget(self.stats, budget)
        self._nf: dict[Term, Term] = {}

    def whnf(self, t: Term) -> Term:
        while isinstance(t, Redex):
            fun = self.whnf(t.fun)
            args = t.args
            if isinstance(fun, Root):
                return mk_app(fun, args)
            self.meter.step()
            if isinstance(fun, TermAbs):
                body = instantiate(fun.body, args[0])
            else:
                body = instantiate_type(fun.body, args[0])
            t = mk_app(body, args[1:])
        return t

    def nf(self, t: Term) -> Term:
        if t.normal:
            return t
        hit = self._nf.get(t)
        if hit is not None:
            return hit
        if isinstance(t, Root):
            result = Root(t.head, tuple(a if isinstance(a, Type) else self.nf(a) for a in t.args))
        elif isinstance(t, TermAbs):
            result = TermAbs(t.var_type, self.nf(t.body))
        elif isinstance(t, TypeAbs):
            result = TypeAbs(self.nf(t.body))
        else:
            result = self.nf(self.whnf(t))
        self._nf[t] = result
        return result


def beta_normalize(
    t: Term, strategy: Strategy = Strategy.BASE, budget: int = DEFAULT_STEP_BUDGET
) -> tuple[Term, NormalizationStats]:
    """β-normal form of ``t`` (term and type redexes) under ``strategy``."""
    start = time.perf_counter_ns()
    if strategy is Strategy.BASE:
        machine = _BaseMachine(budget)
        result = machine.nf(expand_closures(t))
    else:
        machine = _ClosureMachine(strategy, budget)
        if machine.eager:
            t = machine.push_full(t, ID_SUBST)
        result = machine.nf(t)
    machine.stats.wall_time_ns = time.perf_counter_ns() - start
    return result, machine.stats


def type_beta_normalize(
    t: Term, strategy: Strategy = Strategy.BASE, budget: int = DEFAULT_STEP_BUDGET
) -> Term:
    """Contract only type-level redexes ``(Λ s) τ``; term redexes remain.

    Closures are first expanded with ``strategy``'s machinery.
    """
    if strategy is Strategy.BASE:
        t = expand_closures(t)
    else:
        t = _ClosureMachine(strategy, budget).push_full(t, ID_SUBST)
    meter = _Budget(NormalizationStats(), budget)
    memo: dict[Term, Term] = {}

    def go(node: Term) -> Term:
        if node.normal:
            return node
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Root):
            result = Root(node.head, tuple(a if isinstance(a, Type) else go(a) for a in node.args))
        elif isinstance(node, TermAbs):
            result = TermAbs(node.var_type, go(node.body))
        elif isinstance(node, TypeAbs):
            result = TypeAbs(go(node.body))
        else:
            fun = go(node.fun)
            args = tuple(a if isinstance(a, Type) else go(a) for a in node.args)
            while args and isinstance(fun, TypeAbs) and isinstance(args[0], Type):
                meter.step()
                fun = go(instantiate_type(fun.body, args[0]))
                args = args[1:]
            result = mk_app(fun, args)
        memo[node] = result
        return result

    return go(t)


# ---------------------------------------------------------------------------
# η


def _expand(r: Term, memo: dict) -> Term:
    """η-expand ``r`` (whose own subterms are already η-long) by its type."""
    ty = r.type
    if isinstance(ty, Arrow):
        var = _expand(Root(BoundVar(1, ty.domain)), memo)
        return TermAbs(ty.domain, _expand(mk_app(shift_term(r, 1, 0), (var,)), memo))
    if isinstance(ty, Forall):
        return TypeAbs(_expand(mk_app(shift_term(r, 0, 1), (TypeVar(1),)), memo))
    return r


def eta_long(t: Term) -> Term:
    """η-expand every subterm of functional (arrow or ∀) type that is not
    already an abstraction.  Closures are expanded first."""
    t = expand_closures(t)
    memo: dict[Term, Term] = {}

    def go(node: Term, top: bool = True) -> Term:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, TermAbs):
            result = TermAbs(node.var_type, go(node.body))
        elif isinstance(node, TypeAbs):
            result = TypeAbs(go(node.body))
        else:
            args = tuple(a if isinstance(a, Type) else go(a) for a in node.args)
            if isinstance(node, Root):
                inner = Root(node.head, args)
            else:
                inner = mk_app(go(node.fun), args)
            result = _expand(inner, memo)
        memo[node] = result
        return result

    return go(t)


def is_eta_long(t: Term) -> bool:
    """True iff every term-position subterm of arrow or ∀ type is an
    abstraction (function positions of redexes excluded)."""
    seen: set[Term] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, Closure):
            return False
        if isinstance(node, (TermAbs, TypeAbs)):
            stack.append(node.body)
            continue
        if isinstance(node.type, (Arrow, Forall)):
            return False
        stack.extend(a for a in node.args if isinstance(a, Term))
        if isinstance(node, Redex):
            fun = node.fun
            if isinstance(fun, (TermAbs, TypeAbs)):
                stack.append(fun.body)
            else:
                return False
    return True


def is_beta_normal(t: Term) -> bool:
    return t.normal


# ---------------------------------------------------------------------------
# benchmarking


@dataclass
class BenchmarkRow:
    strategy: Strategy
    item: int
    stats: NormalizationStats | None
    error: str | None = None


@dataclass
class BenchmarkTable:
    rows: list[BenchmarkRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def aggregate(self) -> dict[Strategy, NormalizationStats]:
        totals: dict[Strategy, NormalizationStats] = {}
        for row in self.rows:
            if row.stats is None:
                continue
            totals.setdefault(row.strategy, NormalizationStats())
            totals[row.strategy] += row.stats
        return totals

    def to_csv(self, include_time: bool = True) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["strategy", "corpusItem", "steps", "closures", "compositions", "nanoseconds"])
        for row in self.rows:
            if row.stats is None:
                writer.writerow([row.strategy.name, row.item, "", "", "", ""])
                continue
            s = row.stats
            nanos = s.wall_time_ns if include_time else 0
            writer.writerow(
                [row.strategy.name, row.item, s.reduction_steps, s.closures_built, s.subst_compositions, nanos]
            )
        return out.getvalue()


def benchmark_strategies(
    corpus: Sequence[Term],
    strategies: Iterable[Strategy] = tuple(Strategy),
    budget: int = DEFAULT_STEP_BUDGET,
) -> BenchmarkTable:
    """Normalize every corpus item with every strategy.

    Raises :class:`StrategyMismatch` if two strategies produce different
    normal forms for an item.  Budget exhaustion is recorded per row.
    """
    strategies = tuple(strategies)
    table = BenchmarkTable()
    for item, term in enumerate(corpus):
        result: Term | None = None
        for strategy in strategies:
            try:
                nf, stats = beta_normalize(term, strategy, budget)
            except ResourceLimit as exc:
                table.rows.append(BenchmarkRow(strategy, item, None, str(exc)))
                continue
            if result is None:
                result = nf
            elif nf is not result:
                raise StrategyMismatch(f"corpus item {item}: {strategy.name} disagrees")
            table.rows.append(BenchmarkRow(strategy, item, stats))
    return table
