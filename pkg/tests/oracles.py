"""Independent reference implementations used as test oracles.

Nothing here touches the kernel's substitution or normalization code: the
named normalizer works on plain tuples with explicit names and
capture-avoiding renaming, and the semantic evaluator interprets formulas
directly over a finite domain.
"""

from __future__ import annotations

import itertools

from holkit import terms as K
from holkit import types as T

# ---------------------------------------------------------------------------
# named syntax
#   types: ("base", name) | ("tvar", name) | ("arrow", a, b) | ("forall", name, body)
#   terms: ("var", name) | ("const", constant) | ("lam", name, type, body)
#          | ("tlam", name, body) | ("app", f, a) | ("tapp", f, type)

_fresh = itertools.count()


def fresh(prefix: str) -> str:
    return f"{prefix}{next(_fresh)}"


def _push(env, value):
    return lambda i: value if i == 1 else env(i - 1)


def _empty(i):
    raise IndexError(f"loose index {i} in a term expected to be closed")


def type_to_named(ty: T.Type, env=_empty) -> tuple:
    """``env(i)`` is the named type for kernel type index ``i``."""
    if isinstance(ty, T.BaseType):
        return ("base", ty.name)
    if isinstance(ty, T.TypeVar):
        return env(ty.index)
    if isinstance(ty, T.Arrow):
        return ("arrow", type_to_named(ty.domain, env), type_to_named(ty.codomain, env))
    name = fresh("A")
    return ("forall", name, type_to_named(ty.body, _push(env, ("tvar", name))))


def _type_env(sub: T.TypeSubst, ty_env):
    def look(i):
        s = sub
        while isinstance(s, T.TCons):
            if i == 1:
                return type_to_named(s.head, ty_env)
            i -= 1
            s = s.rest
        return ty_env(i + s.n)

    return look


def _term_env(sub: K.TermSubst, tm_env, ty_env):
    def look(i):
        s = sub
        while True:
            if isinstance(s, K.Cons):
                if i == 1:
                    if isinstance(s.front, int):
                        return tm_env(s.front)
                    return term_to_named(s.front, tm_env, ty_env)
                i -= 1
                s = s.rest
            elif isinstance(s, K.Shift):
                return tm_env(i + s.n)
            else:
                # `first`, then the full substitution `then`
                inner_tm, inner_ty = subst_env(s.then, tm_env, ty_env)
                return _term_env(s.first, inner_tm, inner_ty)(i)

    return look


def subst_env(sub: K.Subst, tm_env, ty_env):
    """Environments seen by a closure body under ``sub``."""
    return _term_env(sub.tm, tm_env, ty_env), _type_env(sub.ty, ty_env)


def term_to_named(t: K.Term, tm_env=_empty, ty_env=_empty) -> tuple:
    if isinstance(t, (K.Root, K.Redex)):
        if isinstance(t, K.Redex):
            result = term_to_named(t.fun, tm_env, ty_env)
        elif isinstance(t.head, K.Constant):
            result = ("const", t.head)
        else:
            result = tm_env(t.head.index)
        for arg in t.args:
            if isinstance(arg, T.Type):
                result = ("tapp", result, type_to_named(arg, ty_env))
            else:
                result = ("app", result, term_to_named(arg, tm_env, ty_env))
        return result
    if isinstance(t, K.TermAbs):
        name = fresh("x")
        return (
            "lam",
            name,
            type_to_named(t.var_type, ty_env),
            term_to_named(t.body, _push(tm_env, ("var", name)), ty_env),
        )
    if isinstance(t, K.TypeAbs):
        name = fresh("A")
        return ("tlam", name, term_to_named(t.body, tm_env, _push(ty_env, ("tvar", name))))
    new_tm, new_ty = subst_env(t.subst, tm_env, ty_env)
    return term_to_named(t.body, new_tm, new_ty)


# -- capture-avoiding substitution ----------------------------------------


def ftv(ty) -> set:
    tag = ty[0]
    if tag == "base":
        return set()
    if tag == "tvar":
        return {ty[1]}
    if tag == "arrow":
        return ftv(ty[1]) | ftv(ty[2])
    return ftv(ty[2]) - {ty[1]}


def tsubst_type(ty, name, value):
    tag = ty[0]
    if tag == "base":
        return ty
    if tag == "tvar":
        return value if ty[1] == name else ty
    if tag == "arrow":
        return ("arrow", tsubst_type(ty[1], name, value), tsubst_type(ty[2], name, value))
    bound, body = ty[1], ty[2]
    if bound == name:
        return ty
    if bound in ftv(value):
        new = fresh("A")
        body = tsubst_type(body, bound, ("tvar", new))
        bound = new
    return ("forall", bound, tsubst_type(body, name, value))


def fv(t) -> set:
    tag = t[0]
    if tag == "var":
        return {t[1]}
    if tag == "const":
        return set()
    if tag == "lam":
        return fv(t[3]) - {t[1]}
    if tag == "tlam":
        return fv(t[2])
    if tag == "app":
        return fv(t[1]) | fv(t[2])
    return fv(t[1])


def ftv_term(t) -> set:
    tag = t[0]
    if tag in ("var", "const"):
        return set()
    if tag == "lam":
        return ftv(t[2]) | ftv_term(t[3])
    if tag == "tlam":
        return ftv_term(t[2]) - {t[1]}
    if tag == "app":
        return ftv_term(t[1]) | ftv_term(t[2])
    return ftv_term(t[1]) | ftv(t[2])


def subst(t, name, value):
    tag = t[0]
    if tag == "var":
        return value if t[1] == name else t
    if tag == "const":
        return t
    if tag == "lam":
        bound, ty, body = t[1], t[2], t[3]
        if bound == name:
            return t
        if bound in fv(value):
            new = fresh("x")
            body = subst(body, bound, ("var", new))
            bound = new
        return ("lam", bound, ty, subst(body, name, value))
    if tag == "tlam":
        bound, body = t[1], t[2]
        if bound in ftv_term(value):
            new = fresh("A")
            body = tsubst(body, bound, ("tvar", new))
            bound = new
        return ("tlam", bound, subst(body, name, value))
    if tag == "app":
        return ("app", subst(t[1], name, value), subst(t[2], name, value))
    return ("tapp", subst(t[1], name, value), t[2])


def tsubst(t, name, value):
    tag = t[0]
    if tag in ("var", "const"):
        return t
    if tag == "lam":
        return ("lam", t[1], tsubst_type(t[2], name, value), tsubst(t[3], name, value))
    if tag == "tlam":
        bound, body = t[1], t[2]
        if bound == name:
            return t
        if bound in ftv(value):
            new = fresh("A")
            body = tsubst(body, bound, ("tvar", new))
            bound = new
        return ("tlam", bound, tsubst(body, name, value))
    if tag == "app":
        return ("app", tsubst(t[1], name, value), tsubst(t[2], name, value))
    return ("tapp", tsubst(t[1], name, value), tsubst_type(t[2], name, value))


def whnf(t):
    tag = t[0]
    if tag == "app":
        head = whnf(t[1])
        if head[0] == "lam":
            return whnf(subst(head[3], head[1], t[2]))
        return ("app", head, t[2])
    if tag == "tapp":
        head = whnf(t[1])
        if head[0] == "tlam":
            return whnf(tsubst(head[2], head[1], t[2]))
        return ("tapp", head, t[2])
    return t


def named_normalize(t):
    """Normal-order normalization with capture-avoiding substitution."""
    tag = t[0]
    if tag in ("var", "const"):
        return t
    if tag == "lam":
        return ("lam", t[1], t[2], named_normalize(t[3]))
    if tag == "tlam":
        return ("tlam", t[1], named_normalize(t[2]))
    head = whnf(t)
    if head[0] in ("app", "tapp"):
        if head[0] == "app":
            return ("app", named_normalize(head[1]), named_normalize(head[2]))
        return ("tapp", named_normalize(head[1]), head[2])
    return named_normalize(head)


# -- back to the kernel -----------------------------------------------------


def type_from_named(ty, ty_env: list[str]) -> T.Type:
    tag = ty[0]
    if tag == "base":
        return T.BaseType(ty[1])
    if tag == "tvar":
        return T.TypeVar(ty_env.index(ty[1]) + 1)
    if tag == "arrow":
        return T.Arrow(type_from_named(ty[1], ty_env), type_from_named(ty[2], ty_env))
    return T.Forall(type_from_named(ty[2], [ty[1]] + ty_env))


def term_from_named(t, tm_env=None, ty_env=None) -> K.Term:
    """``tm_env``: list of (name, type_depth_at_binder, kernel_type), innermost first."""
    tm_env = [] if tm_env is None else tm_env
    ty_env = [] if ty_env is None else ty_env
    tag = t[0]
    if tag == "lam":
        ty = type_from_named(t[2], ty_env)
        return K.TermAbs(ty, term_from_named(t[3], [(t[1], len(ty_env), ty)] + tm_env, ty_env))
    if tag == "tlam":
        return K.TypeAbs(term_from_named(t[2], tm_env, [t[1]] + ty_env))
    spine = []
    while t[0] in ("app", "tapp"):
        if t[0] == "app":
            spine.append(term_from_named(t[2], tm_env, ty_env))
        else:
            spine.append(type_from_named(t[2], ty_env))
        t = t[1]
    spine.reverse()
    if t[0] == "const":
        return K.mk_app(K.Root(t[1]), spine)
    if t[0] == "var":
        for i, (name, depth, ty) in enumerate(tm_env, 1):
            if name == t[1]:
                shifted = T.shift_type(ty, len(ty_env) - depth)
                return K.mk_app(K.Root(K.BoundVar(i, shifted)), spine)
        raise KeyError(t[1])
    return K.mk_app(term_from_named(t, tm_env, ty_env), spine)


def oracle_normal_form(t: K.Term) -> K.Term:
    return term_from_named(named_normalize(term_to_named(t)))


# ---------------------------------------------------------------------------
# semantics of first-order-style formulas over a finite domain


def evaluate(t: K.Term, interp: dict, env: tuple = (), domain=(0, 1)):
    """Truth value (or domain element) of a β-normal kernel term.

    ``interp`` maps constant names to Python values: elements for
    individuals, callables for functions/predicates.  ``env`` holds bound
    values, innermost first.
    """
    if isinstance(t, K.TermAbs):
        return lambda v: evaluate(t.body, interp, (v,) + env, domain)
    head = t.head
    args = [a for a in t.args if not isinstance(a, T.Type)]
    if isinstance(head, K.BoundVar):
        value = env[head.index - 1]
    else:
        name = head.name
        if name == "$true":
            return True
        if name == "$false":
            return False
        if name == "~":
            return not evaluate(args[0], interp, env, domain)
        if name == "&":
            return evaluate(args[0], interp, env, domain) and evaluate(args[1], interp, env, domain)
        if name == "|":
            return evaluate(args[0], interp, env, domain) or evaluate(args[1], interp, env, domain)
        if name == "=>":
            return (not evaluate(args[0], interp, env, domain)) or evaluate(args[1], interp, env, domain)
        if name == "=":
            return evaluate(args[0], interp, env, domain) == evaluate(args[1], interp, env, domain)
        if name == "!!":
            pred = evaluate(args[0], interp, env, domain)
            return all(pred(d) for d in domain)
        if name == "??":
            pred = evaluate(args[0], interp, env, domain)
            return any(pred(d) for d in domain)
        value = interp[name]
    for arg in args:
        value = value(evaluate(arg, interp, env, domain))
    return value


def all_functions(arity: int, domain=(0, 1), codomain=(0, 1)):
    """Every total function domain^arity → codomain, curried."""
    points = list(itertools.product(domain, repeat=arity))
    for values in itertools.product(codomain, repeat=len(points)):
        table = dict(zip(points, values))
        yield _curry(table, arity)


def _curry(table, arity, prefix=()):
    if arity == 0:
        return table[prefix]
    return lambda v: _curry(table, arity - 1, prefix + (v,))


def interpretations(symbols: dict[str, tuple[int, str]], domain=(0, 1)):
    """All interpretations of ``symbols``: name → (arity, 'pred' | 'func')."""
    names = sorted(symbols)
    spaces = []
    for name in names:
        arity, kind = symbols[name]
        codomain = (False, True) if kind == "pred" else domain
        spaces.append(list(all_functions(arity, domain, codomain)))
    for combo in itertools.product(*spaces):
        yield dict(zip(names, combo))
