"""TPTP text output.

Except in CNF, every binary formula below the top is printed in
parentheses, as is a negation under ``=``, ``!=`` or ``@``, so re-parsing
never depends on precedence.  Left-nested chains of ``&``,
``|`` and ``@`` print flat, which the parser reads back left-nested.
"""

from __future__ import annotations

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
    Unary,
    Var,
)

__all__ = ["format_expr", "format_formula", "format_problem"]

_FLAT = frozenset({"&", "|", "@"})
# operators binding tighter than the operand of a negation
_TIGHT = frozenset({"=", "!=", "@"})


def _left_chain(e: Binary) -> list[Expr]:
    op = e.op
    parts: list[Expr] = []
    node: Expr = e
    while isinstance(node, Binary) and node.op == op:
        parts.append(node.right)
        node = node.left
    parts.append(node)
    parts.reverse()
    return parts


def format_expr(e: Expr | TypeDecl, dialect: Dialect = Dialect.THF, top: bool = True) -> str:
    if dialect is Dialect.CNF:
        return _cnf(e)
    return _fmt(e, top)


def _fmt(e: Expr | TypeDecl, top: bool = False) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        if not e.args:
            return e.name
        return f"{e.name}({','.join(_fmt(a, True) for a in e.args)})"
    if isinstance(e, (Number, DistinctObject)):
        return e.text
    if isinstance(e, Connective):
        return e.op if e.op in ("!!", "??") else f"({e.op})"
    if isinstance(e, Unary):
        return f"{e.op} {_fmt(e.arg)}"
    if isinstance(e, Binary):
        parts = _left_chain(e) if e.op in _FLAT else [e.left, e.right]
        inner = f" {e.op} ".join(_operand(p, e.op) for p in parts)
        return inner if top else f"({inner})"
    if isinstance(e, Quantified):
        vs = ",".join(v.name if v.type is None else f"{v.name}: {_fmt(v.type)}" for v in e.variables)
        return f"({e.quantifier} [{vs}] : {_fmt(e.body)})"
    if isinstance(e, TypeDecl):
        return f"{e.name}: {_fmt(e.type, True)}"
    raise TypeError(f"cannot print {e!r}")


def _operand(e: Expr, op: str) -> str:
    text = _fmt(e)
    return f"({text})" if isinstance(e, Unary) and op in _TIGHT else text


def _cnf(e: Expr | TypeDecl) -> str:
    if isinstance(e, Binary) and e.op == "|":
        return "(" + " | ".join(_literal(p) for p in _left_chain(e)) + ")"
    return _literal(e)


def _literal(e: Expr) -> str:
    if isinstance(e, Unary):
        return f"~ {_literal(e.arg)}"
    if isinstance(e, Binary) and e.op in ("=", "!="):
        return f"{_fmt(e.left, True)} {e.op} {_fmt(e.right, True)}"
    return _fmt(e, True)


def format_formula(f: AnnotatedFormula) -> str:
    body = _cnf(f.formula) if f.dialect is Dialect.CNF else _fmt(f.formula)
    tail = f", {f.annotations}" if f.annotations is not None else ""
    return f"{f.dialect.value}({f.name}, {f.role}, {body}{tail})."


def format_problem(formulas) -> str:
    return "".join(format_formula(f) + "\n" for f in formulas)
