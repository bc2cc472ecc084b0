"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from holkit.generators import TermGenerator
from holkit.types import Arrow, BaseType, Forall, I, O, TypeVar


def types(max_index: int = 3):
    leaves = st.one_of(
        st.sampled_from([O, I, BaseType("nat")]),
        st.integers(1, max_index).map(TypeVar),
    )
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Arrow, inner, inner),
            inner.map(Forall),
        ),
        max_leaves=8,
    )


def closed_types():
    return types().filter(lambda t: t.max_free == 0)


def terms(**options):
    """Random closed well-typed terms from the kernel's own generator, seeded
    by hypothesis so that failures shrink to a seed."""
    return st.integers(0, 2**32 - 1).map(lambda seed: TermGenerator(random.Random(seed), **options).term())
