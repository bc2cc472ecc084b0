from __future__ import annotations

import random

import pytest
from hypothesis import given, settings

from holkit.generators import TermGenerator, church_corpus, church_exp, church_numeral
from holkit.normalization import (
    ResourceLimit,
    Strategy,
    benchmark_strategies,
    beta_normalize,
    eta_long,
    instantiate,
    is_beta_normal,
    is_eta_long,
    shift_term,
    type_beta_normalize,
)
from holkit.terms import LOGIC, BoundVar, Closure, Cons, Redex, Root, Shift, Signature, Subst, TermAbs, TypeAbs, mk_app
from holkit.types import O, Arrow, Forall, I, TypeVar
from oracles import oracle_normal_form
from strategies import terms


@pytest.fixture()
def sig():
    s = Signature()
    s.declare("c", I)
    s.declare("f", Arrow(I, I))
    s.declare("g", Arrow(Arrow(I, I), I))
    return s


def test_single_redex(sig):
    ident = TermAbs(I, Root(BoundVar(1, I)))
    t = Redex(ident, (Root(sig["c"]),))
    for strategy in Strategy:
        nf, stats = beta_normalize(t, strategy)
        assert nf is Root(sig["c"])
        assert stats.reduction_steps == 1


def test_type_redex(sig):
    poly_id = TypeAbs(TermAbs(TypeVar(1), Root(BoundVar(1, TypeVar(1)))))
    t = mk_app(poly_id, (I, Root(sig["c"])))
    for strategy in Strategy:
        assert beta_normalize(t, strategy)[0] is Root(sig["c"])


def test_church_exponentiation_agrees_with_arithmetic():
    expected = church_numeral(9)
    for strategy in Strategy:
        nf, _ = beta_normalize(church_exp(3, 2), strategy)
        assert nf is expected


def test_budget_exhaustion():
    with pytest.raises(ResourceLimit):
        beta_normalize(church_exp(2, 3), Strategy.BASE, budget=2)


def test_benchmark_table():
    table = benchmark_strategies(church_corpus())
    assert len(table) == 15
    totals = table.aggregate()
    assert set(totals) == set(Strategy)
    csv_text = table.to_csv(include_time=False)
    assert csv_text.splitlines()[0] == "strategy,corpusItem,steps,closures,compositions,nanoseconds"
    assert csv_text == benchmark_strategies(church_corpus()).to_csv(include_time=False)


def test_strategy_names():
    assert Strategy.from_name("ll") is Strategy.LL
    with pytest.raises(ValueError):
        Strategy.from_name("XX")


def test_closures_are_evaluated(sig):
    body = Root(sig["f"], (Root(BoundVar(1, I)),))
    c = Closure(body, Subst(Cons(Root(sig["c"]), Shift(0))))
    for strategy in Strategy:
        assert beta_normalize(c, strategy)[0] is Root(sig["f"], (Root(sig["c"]),))


def test_instantiate_and_shift(sig):
    body = TermAbs(I, Root(BoundVar(2, I)))
    assert instantiate(body, Root(sig["c"])) is TermAbs(I, Root(sig["c"]))
    assert shift_term(Root(BoundVar(1, I)), 2) is Root(BoundVar(3, I))
    assert shift_term(TermAbs(I, Root(BoundVar(1, I))), 5) is TermAbs(I, Root(BoundVar(1, I)))


def test_type_beta_normalize_only_touches_type_redexes(sig):
    poly_id = TypeAbs(TermAbs(TypeVar(1), Root(BoundVar(1, TypeVar(1)))))
    t = mk_app(poly_id, (I,))
    result = type_beta_normalize(t)
    assert result.type is Arrow(I, I)


def test_eta_long(sig):
    g = Root(sig["g"], (Root(sig["f"]),))
    long = eta_long(g)
    assert long is Root(sig["g"], (TermAbs(I, Root(sig["f"], (Root(BoundVar(1, I)),))),))
    assert is_eta_long(long) and not is_eta_long(g)
    assert eta_long(long) is long


def test_eta_long_expands_polymorphic_terms():
    sig = Signature()
    pid = sig.declare("pid", Forall(Arrow(TypeVar(1), TypeVar(1))))
    long = eta_long(Root(pid))
    assert isinstance(long, TypeAbs) and isinstance(long.body, TermAbs)
    assert is_eta_long(long)


def test_eta_invariance_needs_base_type_instances():
    # instantiating α := ι→ι turns the η-long bound x:α into an unexpanded
    # function variable
    k = Signature().declare("k", Forall(Arrow(TypeVar(1), O)))
    a = TypeVar(1)
    body = Root(LOGIC["??"], (a, TermAbs(a, Root(k, (a, Root(BoundVar(1, a)))))))
    t = mk_app(TypeAbs(body), (Arrow(I, I),))
    assert t.type is O
    assert is_eta_long(t)
    assert not is_eta_long(beta_normalize(t)[0])
    assert is_eta_long(mk_app(TypeAbs(body), (I,)))


@settings(max_examples=150, deadline=None)
@given(terms())
def test_strategies_agree_with_oracle(t):
    expected = oracle_normal_form(t)
    for strategy in Strategy:
        nf, _ = beta_normalize(t, strategy)
        assert nf is expected
        assert is_beta_normal(nf)


@settings(max_examples=100, deadline=None)
@given(terms(base_only_type_args=True))
def test_eta_long_is_preserved(t):
    long = eta_long(t)
    assert is_eta_long(long)
    assert is_eta_long(beta_normalize(long, Strategy.LL)[0])


@settings(max_examples=100, deadline=None)
@given(terms())
def test_normal_forms_are_fixpoints(t):
    nf, _ = beta_normalize(t, Strategy.SL)
    again, stats = beta_normalize(nf, Strategy.SL)
    assert again is nf and stats.reduction_steps == 0
    assert nf.type is t.type


def test_generator_respects_size_bound():
    gen = TermGenerator(random.Random(1))
    sizes = [gen.term().size for _ in range(300)]
    assert max(sizes) <= 40
