"""Formula transformations on β-normal kernel terms of type ``o``.

The logical skeleton is built from the signature constants ¬ ∧ ∨ ⇒ = ⊤ ⊥
and the quantifiers Π/Σ applied to a type and an abstraction.  Anything
else of type ``o`` is an atom; the transformations do not look inside
atoms.
"""

from __future__ import annotations

from ..indexing import Position, StepKind, resolve
from ..normalization import instantiate, shift_term
from ..terms import (
    LOGIC,
    BoundVar,
    Constant,
    KernelTypeError,
    Root,
    Signature,
    Term,
    TermAbs,
    TypeAbs,
    mk_app,
)
from ..types import O, Type, arrows

__all__ = [
    "NotInNNF",
    "PositionMismatch",
    "simplify",
    "nnf",
    "is_nnf",
    "prenex",
    "is_prenex",
    "skolemize",
    "paramodulate",
    "replace_at",
    "is_quantifier_free",
    "contains_existential",
]

NOT, AND, OR, IMP, EQ = (LOGIC[k] for k in ("~", "&", "|", "=>", "="))
PI, SIGMA, TOP, BOT = LOGIC["!!"], LOGIC["??"], LOGIC["$true"], LOGIC["$false"]
TRUE, FALSE = Root(TOP), Root(BOT)


class NotInNNF(ValueError):
    pass


class PositionMismatch(ValueError):
    pass


def _require_formula(f: Term) -> None:
    if f.type is not O:
        raise KernelTypeError(f"expected a formula of type o, got {f.type}")


def _is(t: Term, const: Constant, arity: int) -> bool:
    return isinstance(t, Root) and t.head is const and len(t.args) == arity


def neg(a: Term) -> Term:
    return Root(NOT, (a,))


def conj(a: Term, b: Term) -> Term:
    return Root(AND, (a, b))


def disj(a: Term, b: Term) -> Term:
    return Root(OR, (a, b))


def quant(q: Constant, ty: Type, body: Term) -> Term:
    return Root(q, (ty, TermAbs(ty, body)))


def _binder(t: Root) -> tuple[Type, Term]:
    """Type and body of a quantifier application, η-expanding a bare predicate."""
    ty, pred = t.args
    if isinstance(pred, TermAbs):
        return ty, pred.body
    return ty, mk_app(shift_term(pred, 1, 0), (Root(BoundVar(1, ty)),))


def _is_quant(t: Term) -> bool:
    return isinstance(t, Root) and t.head in (PI, SIGMA) and len(t.args) == 2


# ---------------------------------------------------------------------------
# simplification


def _simp_node(t: Term) -> Term:
    """One rewrite at the root, or ``t`` itself."""
    if not isinstance(t, Root):
        return t
    args = t.args
    if _is(t, NOT, 1):
        a = args[0]
        if _is(a, NOT, 1):
            return a.args[0]
        if a is TRUE:
            return FALSE
        if a is FALSE:
            return TRUE
    elif _is(t, AND, 2):
        a, b = args
        if b is TRUE:
            return a
        if a is TRUE:
            return b
        if a is FALSE or b is FALSE:
            return FALSE
        if a is b:
            return a
    elif _is(t, OR, 2):
        a, b = args
        if a is TRUE or b is TRUE:
            return TRUE
        if b is FALSE:
            return a
        if a is FALSE:
            return b
        if a is b:
            return a
    elif _is(t, IMP, 2):
        if args[0] is args[1]:
            return TRUE
    elif _is(t, EQ, 3):
        if args[1] is args[2]:
            return TRUE
    return t


def simplify(f: Term) -> Term:
    """Exhaustively apply ¬¬A→A, unit/zero laws for ∧ and ∨, idempotence,
    A⇒A→⊤, ¬⊤→⊥, ¬⊥→⊤ and t=t→⊤, everywhere in ``f``."""
    _require_formula(f)
    memo: dict[Term, Term] = {}

    def go(t: Term) -> Term:
        hit = memo.get(t)
        if hit is not None:
            return hit
        if isinstance(t, TermAbs):
            result = TermAbs(t.var_type, go(t.body))
        elif isinstance(t, TypeAbs):
            result = TypeAbs(go(t.body))
        elif isinstance(t, Root):
            rebuilt = Root(t.head, tuple(a if isinstance(a, Type) else go(a) for a in t.args))
            # every rule yields a constant or an already simplified subterm,
            # so one root step reaches the fixpoint
            result = _simp_node(rebuilt)
        else:
            raise ValueError("simplify expects a β-normal term")
        memo[t] = result
        return result

    return go(f)


# ---------------------------------------------------------------------------
# negation normal form


def nnf(f: Term) -> Term:
    """Negation normal form: ⇒ eliminated, ¬ only directly above atoms."""
    _require_formula(f)
    memo: dict[tuple[Term, bool], Term] = {}

    def go(t: Term, positive: bool) -> Term:
        key = (t, positive)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if _is(t, NOT, 1):
            result = go(t.args[0], not positive)
        elif _is(t, AND, 2) or _is(t, OR, 2):
            a, b = go(t.args[0], positive), go(t.args[1], positive)
            is_and = t.head is AND
            result = conj(a, b) if is_and == positive else disj(a, b)
        elif _is(t, IMP, 2):
            a, b = go(t.args[0], not positive), go(t.args[1], positive)
            result = disj(a, b) if positive else conj(a, b)
        elif _is_quant(t):
            ty, body = _binder(t)
            q = t.head if positive else (SIGMA if t.head is PI else PI)
            result = quant(q, ty, go(body, positive))
        elif t is TRUE or t is FALSE:
            result = t if positive else (FALSE if t is TRUE else TRUE)
        else:
            result = t if positive else neg(t)
        memo[key] = result
        return result

    return go(f, True)


def _is_atom(t: Term) -> bool:
    return not (
        _is(t, NOT, 1) or _is(t, AND, 2) or _is(t, OR, 2) or _is(t, IMP, 2) or _is_quant(t)
    )


def is_nnf(f: Term) -> bool:
    """No ⇒ in the skeleton and every ¬ sits directly above an atom."""
    stack = [f]
    while stack:
        t = stack.pop()
        if _is(t, NOT, 1):
            a = t.args[0]
            if not _is_atom(a) or a is TRUE or a is FALSE:
                return False
        elif _is(t, IMP, 2):
            return False
        elif _is(t, AND, 2) or _is(t, OR, 2):
            stack.extend(t.args)
        elif _is_quant(t):
            stack.append(_binder(t)[1])
    return True


# ---------------------------------------------------------------------------
# prenex form


def _prenex(t: Term) -> tuple[list[tuple[Constant, Type]], Term]:
    """Quantifier prefix (outermost first) and matrix of an NNF formula."""
    if _is_quant(t):
        ty, body = _binder(t)
        prefix, matrix = _prenex(body)
        return [(t.head, ty)] + prefix, matrix
    if _is(t, AND, 2) or _is(t, OR, 2):
        pa, ma = _prenex(t.args[0])
        pb, mb = _prenex(t.args[1])
        n, m = len(pa), len(pb)
        # left prefix goes outermost, so the left matrix skips the m new binders
        # and the right matrix's outer references skip the n left binders
        ma = shift_term(ma, m, 0) if m else ma
        mb = shift_term(mb, n, 0, m) if n else mb
        return pa + pb, Root(t.head, (ma, mb))
    return [], t


def prenex(f: Term) -> Term:
    """Hoist all quantifiers of an NNF formula into an outermost prefix,
    left operands first."""
    _require_formula(f)
    if not is_nnf(f):
        raise NotInNNF("prenex expects a formula in negation normal form")
    prefix, matrix = _prenex(f)
    result = matrix
    for q, ty in reversed(prefix):
        result = quant(q, ty, result)
    return result


def is_quantifier_free(f: Term) -> bool:
    stack = [f]
    while stack:
        t = stack.pop()
        if _is_quant(t):
            return False
        if _is(t, NOT, 1) or _is(t, AND, 2) or _is(t, OR, 2) or _is(t, IMP, 2):
            stack.extend(t.args)
    return True


def is_prenex(f: Term) -> bool:
    while _is_quant(f):
        f = _binder(f)[1]
    return is_quantifier_free(f)


# ---------------------------------------------------------------------------
# Skolemization


def contains_existential(f: Term) -> bool:
    stack = [f]
    while stack:
        t = stack.pop()
        if _is_quant(t):
            if t.head is SIGMA:
                return True
            stack.append(_binder(t)[1])
        elif _is(t, NOT, 1) or _is(t, AND, 2) or _is(t, OR, 2) or _is(t, IMP, 2):
            stack.extend(t.args)
    return False


def skolemize(f: Term, sig: Signature) -> tuple[Term, Signature]:
    """Replace each existential by a fresh ``sk<N>`` applied to the
    universals in scope.  Fresh symbols are declared in ``sig``, which is
    returned.  ``f`` must be closed and in NNF."""
    _require_formula(f)
    if not is_nnf(f):
        raise NotInNNF("skolemize expects a formula in negation normal form")
    if f.max_tm:
        raise ValueError("skolemize expects a closed formula")

    def go(t: Term, universals: tuple[Type, ...]) -> Term:
        if _is_quant(t):
            ty, body = _binder(t)
            if t.head is PI:
                return quant(PI, ty, go(body, universals + (ty,)))
            sk = sig.fresh(arrows(*universals, ty))
            k = len(universals)
            witness = Root(sk, tuple(Root(BoundVar(k - i, u)) for i, u in enumerate(universals)))
            return go(instantiate(body, witness), universals)
        if _is(t, AND, 2) or _is(t, OR, 2):
            return Root(t.head, (go(t.args[0], universals), go(t.args[1], universals)))
        return t

    return go(f, ()), sig


# ---------------------------------------------------------------------------
# paramodulation


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    """``t`` with the subterm at ``pos`` replaced by ``new``."""

    def go(node: Term, i: int) -> Term:
        if i == len(pos.path):
            return new
        step = pos.path[i]
        if step.kind is StepKind.BODY and isinstance(node, TermAbs):
            return TermAbs(node.var_type, go(node.body, i + 1))
        if step.kind is StepKind.TYPE_BODY and isinstance(node, TypeAbs):
            return TypeAbs(go(node.body, i + 1))
        if step.kind is StepKind.ARG and isinstance(node, Root) and 1 <= step.index <= len(node.args):
            arg = node.args[step.index - 1]
            if isinstance(arg, Type):
                raise PositionMismatch(f"position {pos} addresses a type argument")
            args = list(node.args)
            args[step.index - 1] = go(arg, i + 1)
            return Root(node.head, tuple(args))
        raise PositionMismatch(f"position {pos} is not valid")

    return go(t, 0)


def paramodulate(eq: Term, target: Term, pos: Position) -> Term:
    """Rewrite the occurrence of ``l`` at ``pos`` in ``target`` to ``r``,
    where ``eq`` is ``l = r``."""
    if not _is(eq, EQ, 3):
        raise KernelTypeError("paramodulation needs an equation l = r")
    _, lhs, rhs = eq.args
    try:
        found = resolve(target, pos)
    except ValueError as exc:
        raise PositionMismatch(str(exc)) from None
    if found is not lhs:
        raise PositionMismatch(f"subterm at {pos} is not the left-hand side")
    if lhs.max_tm or rhs.max_tm:
        raise PositionMismatch("equations with loose bound variables cannot be applied")
    return replace_at(target, pos, rhs)
