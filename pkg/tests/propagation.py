"""Status propagation oracle and and-or tree enumeration."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from holkit.blackboard import ROOT, Blackboard, SplitKind
from holkit.tptp import SZSStatus as S

LEAF_STATUSES = (S.THEOREM, S.COUNTER_SATISFIABLE, S.TIMEOUT, S.UNKNOWN, S.OPEN)

# failures, reported first to last
_ORDER = [
    S.COUNTER_SATISFIABLE,
    S.SATISFIABLE,
    S.CONTRADICTORY_AXIOMS,
    S.UNKNOWN,
    S.INAPPROPRIATE,
    S.TIMEOUT,
    S.RESOURCE_OUT,
    S.MEMORY_OUT,
    S.GAVE_UP,
    S.ERROR,
]


def combine_oracle(kind: str, children: list[S]) -> S:
    """The documented table, written out independently of the library."""
    proved = [c for c in children if c in (S.THEOREM, S.UNSATISFIABLE)]
    failures = [c for c in children if c in _ORDER]
    if kind == "OR":
        if S.THEOREM in children:
            return S.THEOREM
        if S.UNSATISFIABLE in children:
            return S.UNSATISFIABLE
        if S.OPEN in children:
            return S.OPEN
        return failures[0] if len(failures) == 1 else sorted(failures, key=_ORDER.index)[0]
    if len(proved) == len(children):
        return S.UNSATISFIABLE if all(c is S.UNSATISFIABLE for c in children) else S.THEOREM
    if S.COUNTER_SATISFIABLE in children:
        return S.COUNTER_SATISFIABLE
    if S.SATISFIABLE in children:
        return S.SATISFIABLE
    if S.OPEN in children:
        return S.OPEN
    return sorted(failures, key=_ORDER.index)[0]


# a shape is None for a leaf or (kind, (child shapes...))
Shape = "tuple | None"


def shapes(levels: int, max_leaves: int, branching: int = 3):
    """Every ordered tree shape with at most ``levels`` levels and
    ``max_leaves`` leaves, yielded with its leaf count."""
    if max_leaves < 1:
        return
    yield None, 1
    if levels <= 1:
        return
    for kind in ("AND", "OR"):
        for k in range(1, branching + 1):
            yield from _children(levels - 1, max_leaves, k, kind, (), 0)


def _children(levels, budget, k, kind, acc, used):
    if len(acc) == k:
        yield (kind, acc), used
        return
    remaining = k - len(acc) - 1
    for child, n in shapes(levels, budget - used - remaining):
        yield from _children(levels, budget, k, kind, acc + (child,), used + n)


@dataclass
class Built:
    bb: Blackboard
    leaves: list[int]


def build(shape) -> Built:
    bb = Blackboard()
    leaves: list[int] = []

    def go(cid: int, node) -> None:
        if node is None:
            leaves.append(cid)
            return
        kind, kids = node
        for child, sub in zip(bb.split(cid, kind, len(kids)), kids):
            go(child, sub)

    go(ROOT, shape)
    return Built(bb, leaves)


def oracle_status(bb: Blackboard, cid: int = ROOT) -> S:
    ctx = bb.context(cid)
    if ctx.kind is SplitKind.LEAF:
        return ctx.status
    return combine_oracle(ctx.kind.value, [oracle_status(bb, c) for c in ctx.children])


def check_all_labelings(shape, statuses=LEAF_STATUSES) -> int:
    """Walk every leaf labeling through one blackboard by incremental
    updates; after each labeling the maintained statuses must equal a
    from-scratch recomputation and the oracle.  Returns the number of
    labelings checked."""
    built = build(shape)
    bb = built.bb
    count = 0
    for labels in itertools.product(statuses, repeat=len(built.leaves)):
        for leaf, status in zip(built.leaves, labels):
            bb.set_status(leaf, status)
        maintained = bb.statuses()
        if maintained != bb.recompute():
            raise AssertionError(f"recompute mismatch for {shape} {labels}")
        if maintained[ROOT] is not oracle_status(bb):
            raise AssertionError(f"oracle mismatch for {shape} {labels}")
        count += 1
    return count


def random_shape(rng: random.Random, levels: int, branching: int = 3, p_leaf: float = 0.3):
    if levels <= 1 or rng.random() < p_leaf:
        return None
    kind = rng.choice(("AND", "OR"))
    return (kind, tuple(random_shape(rng, levels - 1, branching, p_leaf) for _ in range(rng.randint(1, branching))))
