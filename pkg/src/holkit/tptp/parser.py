"""Tokenizer and precedence-climbing parser for CNF, FOF, TFF and THF.

The grammar accepted is a lenient superset of the four core dialects:
every binary connective gets a fixed precedence, so formulas that TPTP
requires to be parenthesized are also accepted unparenthesized.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .ast import (
    ROLES,
    AnnotatedFormula,
    Binary,
    Connective,
    Dialect,
    DistinctObject,
    Expr,
    Func,
    Include,
    Number,
    Quantified,
    TypeDecl,
    TypedVar,
    Unary,
    Var,
)

__all__ = ["TPTPSyntaxError", "IncludeNotFound", "parse", "parse_file", "parse_expression", "tokenize"]


class TPTPSyntaxError(ValueError):
    def __init__(self, line: int, col: int, expected: str, found: str = "") -> None:
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        where = f" but found {found!r}" if found else ""
        super().__init__(f"line {line}, column {col}: expected {expected}{where}")


class IncludeNotFound(FileNotFoundError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"included file not found: {path}")


@dataclass(frozen=True)
class Token:
    kind: str  # word, var, dollar, single, distinct, number, op, eof
    text: str
    start: int
    end: int


_OPERATORS = [
    "<=>", "<~>", "=>", "<=", "~|", "~&", "!=", "!>", "?*", "!!", "??", ":=",
    "|", "&", "~", "=", "!", "?", "^", "@", ">", "*", "+", ":",
    "(", ")", "[", "]", ",", ".",
]  # fmt: skip

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>%[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<number>[+-]?[0-9]+(?:/[0-9]+|(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?))
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<word>[a-z][A-Za-z0-9_]*)
  | (?P<dollar>\$\$?[a-z][A-Za-z0-9_]*)
  | (?P<single>'(?:[^'\\]|\\.)+')
  | (?P<distinct>"(?:[^"\\]|\\.)*")
  | (?P<op>"""
    + "|".join(re.escape(op) for op in _OPERATORS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = _line_col(text, pos)
            raise TPTPSyntaxError(line, col, "a token", text[pos : pos + 10])
        kind = m.lastgroup
        if kind not in ("ws", "line_comment", "block_comment"):
            tokens.append(Token(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", n, n))
    return tokens


# loosest binds first; `>` is right-associative
PRECEDENCE = {
    "<=>": 1, "=>": 1, "<=": 1, "<~>": 1, "~|": 1, "~&": 1,
    "|": 2,
    "&": 3,
    ">": 4,
    "=": 5, "!=": 5,
    "@": 6,
    "*": 7,
}  # fmt: skip
RIGHT_ASSOC = frozenset({">"})
# operand strength of prefix operators: the unit formula level
UNIT_PREC = 5


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, expected: str) -> TPTPSyntaxError:
        line, col = _line_col(self.text, self.tok.start)
        return TPTPSyntaxError(line, col, expected, self.tok.text or "end of input")

    def is_op(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.is_op(text):
            raise self.error(repr(text))
        return self.advance()

    # -- top level ----------------------------------------------------------

    def parse_file(self) -> list[AnnotatedFormula | Include]:
        items: list[AnnotatedFormula | Include] = []
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind == "word" and tok.text == "include":
                items.append(self.parse_include())
            elif tok.kind == "word" and tok.text in ("cnf", "fof", "tff", "thf"):
                items.append(self.parse_annotated())
            else:
                raise self.error("cnf, fof, tff, thf or include")
        return items

    def parse_include(self) -> Include:
        self.advance()
        self.expect("(")
        if self.tok.kind != "single":
            raise self.error("a quoted file name")
        path = _unquote(self.advance().text)
        names = None
        if self.is_op(","):
            self.advance()
            self.expect("[")
            collected = []
            while not self.is_op("]"):
                collected.append(self.parse_name())
                if not self.is_op("]"):
                    self.expect(",")
            self.advance()
            names = tuple(collected)
        self.expect(")")
        self.expect(".")
        return Include(path, names)

    def parse_name(self) -> str:
        tok = self.tok
        if tok.kind in ("word", "single", "number"):
            self.advance()
            return tok.text
        raise self.error("a formula name")

    def parse_annotated(self) -> AnnotatedFormula:
        dialect = Dialect(self.advance().text)
        self.expect("(")
        name = self.parse_name()
        self.expect(",")
        if self.tok.kind != "word":
            raise self.error("a formula role")
        role = self.advance().text
        if role not in ROLES:
            self.i -= 1
            raise self.error("a TPTP formula role")
        self.expect(",")
        if role == "type":
            formula: Expr | TypeDecl = self.parse_type_decl()
        else:
            formula = self.parse_expr(0)
        annotations = None
        if self.is_op(","):
            self.advance()
            annotations = self.raw_until_close()
        self.expect(")")
        self.expect(".")
        return AnnotatedFormula(dialect, name, role, formula, annotations)

    def parse_type_decl(self) -> TypeDecl | Expr:
        start = self.i
        depth = 0
        while self.is_op("("):
            self.advance()
            depth += 1
        if self.tok.kind in ("word", "single", "dollar") and self.peek().kind == "op" and self.peek().text == ":":
            name = self.advance().text
            self.advance()
            ty = self.parse_expr(0)
            for _ in range(depth):
                self.expect(")")
            return TypeDecl(name, ty)
        # not a declaration after all (e.g. a subtype axiom); parse as a formula
        self.i = start
        return self.parse_expr(0)

    def raw_until_close(self) -> str:
        """Source text of the annotations, up to the formula's closing paren."""
        start = self.tok.start
        depth = 0
        while True:
            tok = self.tok
            if tok.kind == "eof":
                raise self.error("')'")
            if tok.kind == "op" and tok.text in ("(", "["):
                depth += 1
            elif tok.kind == "op" and tok.text in (")", "]"):
                if depth == 0:
                    return self.text[start : tok.start].strip()
                depth -= 1
            self.advance()

    # -- formulas -----------------------------------------------------------

    def parse_expr(self, min_prec: int) -> Expr:
        left = self.parse_unary()
        while True:
            tok = self.tok
            if tok.kind != "op":
                return left
            prec = PRECEDENCE.get(tok.text)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if tok.text in RIGHT_ASSOC else prec + 1
            right = self.parse_expr(next_min)
            left = Binary(tok.text, left, right)

    def parse_unary(self) -> Expr:
        tok = self.tok
        if tok.kind == "op":
            if tok.text == "~":
                self.advance()
                return Unary("~", self.parse_expr(UNIT_PREC))
            if tok.text in ("!", "?", "^", "!>", "?*") and self.peek().kind == "op" and self.peek().text == "[":
                self.advance()
                variables = self.parse_variables()
                self.expect(":")
                body_prec = PRECEDENCE[">"] if tok.text in ("!>", "?*") else UNIT_PREC
                return Quantified(tok.text, variables, self.parse_expr(body_prec))
            if tok.text in ("!!", "??"):
                self.advance()
                return Connective(tok.text)
        return self.parse_primary()

    def parse_variables(self) -> tuple[TypedVar, ...]:
        self.expect("[")
        out = []
        while True:
            if self.tok.kind != "var":
                raise self.error("a variable")
            name = self.advance().text
            ty = None
            if self.is_op(":"):
                self.advance()
                ty = self.parse_expr(PRECEDENCE[">"])
            out.append(TypedVar(name, ty))
            if self.is_op(","):
                self.advance()
                continue
            self.expect("]")
            return tuple(out)

    def parse_primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "op" and tok.text == "(":
            nxt, after = self.peek(), self.peek(2)
            if nxt.kind == "op" and after.kind == "op" and after.text == ")" and (
                nxt.text in PRECEDENCE or nxt.text == "~"
            ):
                self.advance()
                self.advance()
                self.advance()
                return Connective(nxt.text)
            self.advance()
            inner = self.parse_expr(0)
            self.expect(")")
            return inner
        if tok.kind == "var":
            self.advance()
            return Var(tok.text)
        if tok.kind in ("word", "single", "dollar"):
            self.advance()
            args: tuple[Expr, ...] = ()
            if self.is_op("("):
                self.advance()
                collected = [self.parse_expr(0)]
                while self.is_op(","):
                    self.advance()
                    collected.append(self.parse_expr(0))
                self.expect(")")
                args = tuple(collected)
            return Func(tok.text, args)
        if tok.kind == "number":
            self.advance()
            return Number(tok.text)
        if tok.kind == "distinct":
            self.advance()
            return DistinctObject(tok.text)
        raise self.error("a term or formula")


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def parse_expression(text: str) -> Expr:
    """Parse a single formula or term (no surrounding annotation)."""
    p = _Parser(text)
    expr = p.parse_expr(0)
    if p.tok.kind != "eof":
        raise p.error("end of input")
    return expr


def parse(
    text: str,
    include_path: Sequence[str | os.PathLike] = (),
    base_dir: str | os.PathLike | None = None,
    _seen: frozenset[Path] = frozenset(),
) -> list[AnnotatedFormula]:
    """Parse a problem, resolving ``include`` directives.

    Includes are looked up relative to ``base_dir`` first, then in each
    directory of ``include_path`` in order.
    """
    result: list[AnnotatedFormula] = []
    for item in _Parser(text).parse_file():
        if isinstance(item, AnnotatedFormula):
            result.append(item)
            continue
        path = _resolve_include(item.path, base_dir, include_path)
        if path in _seen:
            raise TPTPSyntaxError(0, 0, f"a non-cyclic include of {item.path}")
        included = parse(path.read_text(encoding="utf-8"), include_path, path.parent, _seen | {path})
        if item.names is not None:
            wanted = set(item.names)
            included = [f for f in included if f.name in wanted]
        result.extend(included)
    return result


def _resolve_include(name: str, base_dir, include_path) -> Path:
    candidates = []
    if base_dir is not None:
        candidates.append(Path(base_dir) / name)
    candidates.extend(Path(d) / name for d in include_path)
    if not candidates:
        candidates.append(Path(name))
    for candidate in candidates:
        if candidate.is_file():
            return candidate.resolve()
    raise IncludeNotFound(name)


def parse_file(path: str | os.PathLike, include_path: Sequence[str | os.PathLike] = ()) -> list[AnnotatedFormula]:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), include_path, path.parent, frozenset({path.resolve()}))
