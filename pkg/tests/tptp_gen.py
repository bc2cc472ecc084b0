"""Random TPTP ASTs in the shape the parser produces, one generator per dialect."""

from __future__ import annotations

import random
from dataclasses import dataclass

from holkit.tptp import (
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
)

CONNECTIVES = ("<=>", "=>", "<=", "<~>", "~|", "~&", "|", "&")
ROLES = ("axiom", "hypothesis", "definition", "lemma", "conjecture", "negated_conjecture", "plain")
FUNCTORS = ("a", "b", "f", "g", "'weird name'", "$true", "$false")


@dataclass
class AstGenerator:
    rng: random.Random
    dialect: Dialect
    max_depth: int = 4

    # -- pieces -------------------------------------------------------------

    def var_name(self) -> str:
        return self.rng.choice(["X", "Y", "Z", "X1", "Var_2"])

    def functor(self) -> str:
        return self.rng.choice(["a", "b", "f", "g", "p", "q", "'weird name'"])

    def base_type(self) -> Expr:
        return Func(self.rng.choice(["$i", "$o", "t1", "'a type'"]))

    def type_expr(self, depth: int) -> Expr:
        rng = self.rng
        if self.dialect is Dialect.TFF:
            return Func(rng.choice(["$i", "t1"]))
        if depth <= 0 or rng.random() < 0.5:
            return self.base_type()
        if rng.random() < 0.15:
            return Quantified("!>", (TypedVar("A", Func("$tType")),), self.type_expr(depth - 1))
        # right-nested arrows print and parse without parentheses on the right
        return Binary(">", self.type_expr(depth - 1), self.type_expr(depth - 1))

    def typed_vars(self) -> tuple[TypedVar, ...]:
        names = self.rng.sample(["X", "Y", "Z", "W"], self.rng.randint(1, 2))
        if self.dialect in (Dialect.FOF, Dialect.CNF):
            return tuple(TypedVar(n) for n in names)
        if self.dialect is Dialect.THF and self.rng.random() < 0.2:
            return tuple(TypedVar(n, Func("$tType")) for n in names)
        return tuple(TypedVar(n, self.type_expr(2)) for n in names)

    # -- terms --------------------------------------------------------------

    def term(self, depth: int) -> Expr:
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.4:
            choice = rng.random()
            if choice < 0.4:
                return Var(self.var_name())
            if choice < 0.5:
                return Number(rng.choice(["0", "42", "3.5", "1/2"]))
            if choice < 0.55:
                return DistinctObject('"distinct obj"')
            return Func(self.functor())
        return Func(self.functor(), tuple(self.term(depth - 1) for _ in range(rng.randint(1, 3))))

    # -- formulas -----------------------------------------------------------

    def atom(self, depth: int) -> Expr:
        rng = self.rng
        r = rng.random()
        if r < 0.15:
            return Func(rng.choice(["$true", "$false"]))
        if r < 0.45:
            return Binary(rng.choice(["=", "!="]), self.term(depth), self.term(depth))
        return Func(self.functor(), tuple(self.term(depth - 1) for _ in range(rng.randint(0, 2))))

    def formula(self, depth: int) -> Expr:
        if self.dialect is Dialect.THF:
            return self.thf(depth)
        rng = self.rng
        if depth <= 0:
            return self.atom(1)
        r = rng.random()
        if r < 0.2:
            return self.atom(2)
        if r < 0.35:
            return Unary("~", self.formula(depth - 1))
        if r < 0.55:
            q = rng.choice(["!", "?"])
            return Quantified(q, self.typed_vars(), self.formula(depth - 1))
        op = rng.choice(CONNECTIVES)
        return Binary(op, self.formula(depth - 1), self.formula(depth - 1))

    def thf(self, depth: int) -> Expr:
        rng = self.rng
        if depth <= 0:
            r = rng.random()
            if r < 0.1:
                return Connective(rng.choice(["&", "|", "=>", "~", "=", "!!", "??"]))
            if r < 0.5:
                return Var(self.var_name())
            return Func(rng.choice(FUNCTORS))
        r = rng.random()
        if r < 0.15:
            return self.thf(0)
        if r < 0.35:
            # application chains are left-nested
            fun = self.thf(0) if rng.random() < 0.7 else self.thf(depth - 1)
            return Binary("@", fun, self.thf(depth - 1))
        if r < 0.45:
            return Unary("~", self.thf(depth - 1))
        if r < 0.65:
            q = rng.choice(["!", "?", "^"])
            return Quantified(q, self.typed_vars(), self.thf(depth - 1))
        op = rng.choice(CONNECTIVES + ("=", "!="))
        return Binary(op, self.thf(depth - 1), self.thf(depth - 1))

    # -- CNF ----------------------------------------------------------------

    def literal(self) -> Expr:
        rng = self.rng
        if rng.random() < 0.3:
            return Binary(rng.choice(["=", "!="]), self.term(2), self.term(2))
        atom = Func(self.functor(), tuple(self.term(2) for _ in range(rng.randint(0, 2))))
        return Unary("~", atom) if rng.random() < 0.4 else atom

    def clause(self) -> Expr:
        lits = [self.literal() for _ in range(self.rng.randint(1, 4))]
        out = lits[0]
        for lit in lits[1:]:
            out = Binary("|", out, lit)
        return out

    # -- annotated formulas -------------------------------------------------

    def declaration(self) -> TypeDecl:
        rng = self.rng
        name = self.functor()
        if rng.random() < 0.3:
            return TypeDecl(name, Func("$tType"))
        if self.dialect is Dialect.TFF:
            doms = [self.type_expr(0) for _ in range(rng.randint(1, 3))]
            left = doms[0]
            for d in doms[1:]:
                left = Binary("*", left, d)
            return TypeDecl(name, Binary(">", left, Func(rng.choice(["$i", "$o"]))))
        return TypeDecl(name, self.type_expr(3))

    def annotated(self, index: int) -> AnnotatedFormula:
        rng = self.rng
        name = rng.choice([f"f{index}", f"'name {index}'", str(index)])
        annotations = rng.choice([None, None, "file('x.p',f)", "inference(rule,[status(thm)],[a,b])"])
        if self.dialect is Dialect.CNF:
            return AnnotatedFormula(self.dialect, name, rng.choice(ROLES), self.clause(), annotations)
        if self.dialect in (Dialect.TFF, Dialect.THF) and rng.random() < 0.25:
            return AnnotatedFormula(self.dialect, name, "type", self.declaration(), annotations)
        return AnnotatedFormula(self.dialect, name, rng.choice(ROLES), self.formula(self.max_depth), annotations)

    def problem(self, size: int) -> list[AnnotatedFormula]:
        return [self.annotated(i) for i in range(size)]
