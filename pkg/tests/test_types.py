from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holkit.types import (
    O,
    TTYPE,
    Arrow,
    BaseType,
    Forall,
    I,
    TCons,
    TShift,
    TypeVar,
    arrows,
    compose_type_subst,
    instantiate_forall,
    lift_type_subst,
    occurs_type_var,
    pretty_type,
    shift_type,
    split_arrows,
    substitute_type,
    type_size,
)
from holkit.types import TYPE_ID
from strategies import types


def test_interning_gives_identical_objects():
    assert BaseType("nat") is BaseType("nat")
    assert Arrow(I, O) is Arrow(BaseType("$i"), BaseType("$o"))
    assert Forall(Arrow(TypeVar(1), O)) is Forall(Arrow(TypeVar(1), O))
    assert Arrow(I, O) is not Arrow(O, I)


def test_type_variables_start_at_one():
    with pytest.raises(ValueError):
        TypeVar(0)


def test_arrows_are_right_nested():
    ty = arrows(I, I, O)
    assert ty is Arrow(I, Arrow(I, O))
    assert split_arrows(ty) == ([I, I], O)
    assert arrows(O) is O


def test_instantiate_forall():
    poly = Forall(Arrow(Arrow(TypeVar(1), O), O))
    assert instantiate_forall(poly, I) is Arrow(Arrow(I, O), O)
    # free variables of the argument are not captured by inner binders
    nested = Forall(Forall(Arrow(TypeVar(2), TypeVar(1))))
    assert instantiate_forall(nested, TypeVar(1)) is Forall(Arrow(TypeVar(2), TypeVar(1)))


def test_occurs_and_size():
    ty = Forall(Arrow(TypeVar(1), TypeVar(2)))
    assert occurs_type_var(ty, 1)
    assert not occurs_type_var(ty, 2)
    assert ty.max_free == 1
    assert type_size(arrows(I, I, O)) == 5


def test_pretty_printing():
    poly = Forall(Arrow(Arrow(TypeVar(1), O), Arrow(O, O)))
    assert pretty_type(poly, compact=True) == "∀(1̲→o)→o→o"
    assert pretty_type(poly, compact=True, ascii=True) == "!(1_->o)->o->o"
    assert pretty_type(Arrow(I, O)) in ("ι → o", "ι→o")
    assert pretty_type(TTYPE) != ""


@given(types())
def test_identity_substitution(ty):
    assert substitute_type(ty, TYPE_ID) is ty


@given(types(), st.integers(0, 3), st.integers(0, 3))
def test_shifts_compose(ty, a, b):
    assert shift_type(shift_type(ty, a), b) is shift_type(ty, a + b)


@given(types(), types(), types())
def test_composition_law(ty, x, y):
    first = TCons(x, TShift(1))
    then = TCons(y, TShift(0))
    composed = compose_type_subst(first, then)
    assert substitute_type(ty, composed) is substitute_type(substitute_type(ty, first), then)


@given(types(), types())
def test_lift_leaves_index_one(ty, x):
    lifted = lift_type_subst(TCons(x, TYPE_ID))
    assert substitute_type(TypeVar(1), lifted) is TypeVar(1)
    assert substitute_type(Forall(ty), TCons(x, TYPE_ID)) is Forall(substitute_type(ty, lifted))


@given(types())
def test_instantiate_then_max_free_bound(ty):
    poly = Forall(ty)
    result = instantiate_forall(poly, I)
    assert result.max_free <= max(ty.max_free - 1, 0)
