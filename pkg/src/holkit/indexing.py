"""Head-symbol and subterm-occurrence index over shared terms.

Inserted terms are brought into β-normal η-long form first.  Because terms
are perfectly shared, every structural subterm has exactly one key, so the
occurrence map is keyed by term identity.
"""

from __future__ import annotations

import enum
import threading
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator

from .normalization import Strategy, beta_normalize, eta_long, is_eta_long
from .terms import Head, Root, Term, TermAbs, TypeAbs
from .types import Type

__all__ = [
    "StepKind",
    "Step",
    "Position",
    "ROOT",
    "resolve",
    "TermIndex",
    "canonical_form",
    "walk",
]


class StepKind(enum.Enum):
    BODY = "body"
    TYPE_BODY = "type-body"
    ARG = "arg"


@dataclass(frozen=True)
class Step:
    kind: StepKind
    index: int = 0  # 1-based spine position for ARG, counting type arguments too

    def __str__(self) -> str:
        if self.kind is StepKind.ARG:
            return str(self.index)
        return "λ" if self.kind is StepKind.BODY else "Λ"


BODY = Step(StepKind.BODY)
TYPE_BODY = Step(StepKind.TYPE_BODY)


def arg_step(i: int) -> Step:
    return Step(StepKind.ARG, i)


@dataclass(frozen=True)
class Position:
    path: tuple[Step, ...] = ()

    def extend(self, step: Step) -> Position:
        return Position(self.path + (step,))

    def __str__(self) -> str:
        return ".".join(str(s) for s in self.path) or "ε"


ROOT = Position()


def resolve(t: Term, pos: Position) -> Term:
    """Follow ``pos`` from ``t``; raises ``ValueError`` on an invalid path."""
    for step in pos.path:
        if step.kind is StepKind.BODY and isinstance(t, TermAbs):
            t = t.body
        elif step.kind is StepKind.TYPE_BODY and isinstance(t, TypeAbs):
            t = t.body
        elif step.kind is StepKind.ARG and isinstance(t, Root) and 1 <= step.index <= len(t.args):
            arg = t.args[step.index - 1]
            if isinstance(arg, Type):
                raise ValueError(f"position {pos} points at a type argument")
            t = arg
        else:
            raise ValueError(f"position {pos} is not valid for this term")
    return t


def walk(t: Term, pos: Position = ROOT) -> Iterator[tuple[Term, Position]]:
    """Every (subterm, position) of a closure-free, redex-free term."""
    stack = [(t, pos)]
    while stack:
        node, p = stack.pop()
        yield node, p
        if isinstance(node, TermAbs):
            stack.append((node.body, p.extend(BODY)))
        elif isinstance(node, TypeAbs):
            stack.append((node.body, p.extend(TYPE_BODY)))
        elif isinstance(node, Root):
            for i, arg in enumerate(node.args, 1):
                if not isinstance(arg, Type):
                    stack.append((arg, p.extend(arg_step(i))))
        else:
            raise ValueError("only β-normal terms can be walked")


def canonical_form(t: Term, strategy: Strategy = Strategy.LL) -> Term:
    """β-normal η-long form."""
    nf, _ = beta_normalize(t, strategy)
    return eta_long(nf)


class TermIndex:
    """Index of β-normal η-long terms.

    ``by_head`` ranges over every registered term, i.e. inserted terms and
    all their subterms.  ``occurrences`` reports positions relative to the
    inserted (top-level) terms.
    """

    def __init__(self, strategy: Strategy = Strategy.LL) -> None:
        self.strategy = strategy
        self._lock = threading.RLock()
        self._roots: set[Term] = set()
        self._terms: set[Term] = set()
        self._by_head: dict[Head, set[Term]] = defaultdict(set)
        self._occ: dict[Term, set[tuple[Term, Position]]] = defaultdict(set)

    def insert(self, t: Term) -> Term:
        """Register ``t`` in canonical form; returns the stored term."""
        canon = canonical_form(t, self.strategy)
        assert is_eta_long(canon) and canon.normal
        with self._lock:
            if canon in self._roots:
                return canon
            # build the update first so that readers never see half an insert
            new_terms: list[Term] = []
            occ: list[tuple[Term, tuple[Term, Position]]] = []
            for sub, pos in walk(canon):
                occ.append((sub, (canon, pos)))
                if sub not in self._terms:
                    new_terms.append(sub)
            self._roots.add(canon)
            for sub in new_terms:
                self._terms.add(sub)
                if isinstance(sub, Root):
                    self._by_head[sub.head].add(sub)
            for sub, entry in occ:
                self._occ[sub].add(entry)
        return canon

    def __contains__(self, t: Term) -> bool:
        return t in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def roots(self) -> frozenset[Term]:
        with self._lock:
            return frozenset(self._roots)

    @property
    def terms(self) -> frozenset[Term]:
        with self._lock:
            return frozenset(self._terms)

    def by_head(self, head: Head) -> frozenset[Term]:
        with self._lock:
            return frozenset(self._by_head.get(head, ()))

    def occurrences(self, sub: Term) -> frozenset[tuple[Term, Position]]:
        with self._lock:
            return frozenset(self._occ.get(sub, ()))

    def stats(self) -> dict[str, int]:
        with self._lock:
            return {
                "roots": len(self._roots),
                "terms": len(self._terms),
                "heads": sum(1 for v in self._by_head.values() if v),
                "occurrences": sum(len(v) for v in self._occ.values()),
            }
