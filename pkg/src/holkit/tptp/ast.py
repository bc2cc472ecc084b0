"""Dialect-neutral syntax tree for TPTP problems.

One set of node types serves all four dialects; the dialect is a tag on
the annotated formula.  Nodes are frozen dataclasses, so structural
equality is ``==``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union


class Dialect(str, enum.Enum):
    CNF = "cnf"
    FOF = "fof"
    TFF = "tff"
    THF = "thf"


ROLES = frozenset(
    {
        "axiom",
        "hypothesis",
        "definition",
        "assumption",
        "lemma",
        "theorem",
        "corollary",
        "conjecture",
        "negated_conjecture",
        "plain",
        "type",
        "fi_domain",
        "fi_functors",
        "fi_predicates",
        "unknown",
    }
)

# binary connectives of the formula language, plus type operators `>` and `*`
BINARY_OPS = ("<=>", "=>", "<=", "<~>", "~|", "~&", "|", "&", "=", "!=", "@", ">", "*")
QUANTIFIERS = ("!", "?", "^", "!>", "?*")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Func:
    """Constant, functor application or defined symbol (``$true``, ``$i``)."""

    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Number:
    text: str


@dataclass(frozen=True)
class DistinctObject:
    text: str  # including the double quotes


@dataclass(frozen=True)
class Connective:
    """A connective used as a term, e.g. THF ``(&)`` or ``!!``."""

    op: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: Expr


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class TypedVar:
    name: str
    type: Expr | None = None


@dataclass(frozen=True)
class Quantified:
    quantifier: str
    variables: tuple[TypedVar, ...]
    body: Expr


@dataclass(frozen=True)
class TypeDecl:
    """``name : type`` in a formula of role ``type``."""

    name: str
    type: Expr


Expr = Union[Var, Func, Number, DistinctObject, Connective, Unary, Binary, Quantified]


@dataclass(frozen=True)
class AnnotatedFormula:
    dialect: Dialect
    name: str
    role: str
    formula: Expr | TypeDecl
    annotations: str | None = field(default=None, compare=True)

    @property
    def is_type_decl(self) -> bool:
        return isinstance(self.formula, TypeDecl)


@dataclass(frozen=True)
class Include:
    path: str
    names: tuple[str, ...] | None = None


def children(e: Expr | TypeDecl) -> Iterator[Expr]:
    if isinstance(e, Func):
        yield from e.args
    elif isinstance(e, Unary):
        yield e.arg
    elif isinstance(e, Binary):
        yield e.left
        yield e.right
    elif isinstance(e, Quantified):
        for v in e.variables:
            if v.type is not None:
                yield v.type
        yield e.body
    elif isinstance(e, TypeDecl):
        yield e.type


def iter_nodes(e: Expr | TypeDecl) -> Iterator[Expr | TypeDecl]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(children(node))


def free_variables(e: Expr) -> list[str]:
    """Free variable names in order of first occurrence."""
    seen: list[str] = []

    def go(node: Expr, bound: frozenset[str]) -> None:
        if isinstance(node, Var):
            if node.name not in bound and node.name not in seen:
                seen.append(node.name)
        elif isinstance(node, Quantified):
            # each variable is in scope for the types of those after it
            for v in node.variables:
                if v.type is not None:
                    go(v.type, bound)
                bound = bound | {v.name}
            go(node.body, bound)
        else:
            for child in children(node):
                go(child, bound)

    go(e, frozenset())
    return seen
