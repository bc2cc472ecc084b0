from __future__ import annotations

import itertools
import random
import threading

import pytest

from holkit.blackboard import (
    FAILURE_ORDER,
    ROOT,
    AlreadySplit,
    Blackboard,
    ClosedContext,
    Delta,
    DuplicateStore,
    EventKind,
    Insert,
    NotALeaf,
    Remove,
    SetStatus,
    SplitKind,
    UnknownContext,
    UnknownStore,
    combine,
)
from holkit.tptp import SZSStatus as S

from propagation import LEAF_STATUSES, build, check_all_labelings, combine_oracle, random_shape, shapes


def board(*stores: str) -> Blackboard:
    bb = Blackboard()
    for s in stores:
        bb.register_store(s)
    return bb


# -- stores -----------------------------------------------------------------


def test_register_and_query_empty():
    assert board("clauses").query("clauses") == []


def test_register_twice():
    bb = board("clauses")
    with pytest.raises(DuplicateStore):
        bb.register_store("clauses")


def test_stores_are_independent():
    bb = Blackboard()
    bb.register_store("ints", int)
    bb.register_store("strs", str)
    bb.insert("ints", 1)
    bb.insert("strs", "a")
    assert bb.query("ints") == [1] and bb.query("strs") == ["a"]
    with pytest.raises(TypeError):
        bb.insert("ints", "not an int")


def test_unknown_store_and_context():
    bb = board("s")
    with pytest.raises(UnknownStore):
        bb.insert("nope", 1)
    with pytest.raises(UnknownContext):
        bb.insert("s", 1, 99)


def test_insert_root_visible():
    bb = board("s")
    event = bb.insert("s", "d")
    assert bb.query("s", ROOT) == ["d"]
    assert event.kind is EventKind.INSERTED and event.datum == "d"
    # a second insert of the same datum changes nothing
    assert bb.insert("s", "d") is None


def test_sibling_isolation_and_ancestor_visibility():
    bb = board("s")
    c1, c2 = bb.split(ROOT, "OR", 2)
    bb.insert("s", "root")
    bb.insert("s", "d", c1)
    assert set(bb.query("s", c1)) == {"root", "d"}
    assert bb.query("s", c2) == ["root"]
    assert bb.query("s", ROOT) == ["root"]


def _random_tree(rng: random.Random, bb: Blackboard, nodes: int) -> None:
    for _ in range(nodes):
        leaf = rng.choice(bb.leaves())
        bb.split(leaf, rng.choice(["AND", "OR"]), rng.randint(1, 3))


def test_lineage_visibility_exhaustive_small_trees():
    # every shape up to 3 levels and 4 leaves, a datum inserted at every node
    for shape, _ in shapes(3, 4):
        bb = build(shape).bb
        bb.register_store("s")
        for cid in bb.contexts():
            bb.insert("s", cid, cid)
        for cid in bb.contexts():
            expected = set(bb.lineage(cid))
            # brute force: the datum named after context d is visible at c iff d is an ancestor-or-self
            brute = set()
            for d in bb.contexts():
                node = cid
                while node is not None:
                    if node == d:
                        brute.add(d)
                    node = bb.context(node).parent
            assert set(bb.query("s", cid)) == brute == expected


def test_remove():
    bb = board("s")
    bb.insert("s", 1)
    event = bb.remove("s", 1)
    assert event.kind is EventKind.REMOVED and bb.query("s") == []
    assert bb.remove("s", 1) is None


# -- contexts ---------------------------------------------------------------


def test_split_or():
    bb = Blackboard()
    kids = bb.split(ROOT, "OR", 2)
    assert len(kids) == 2 and bb.status() is S.OPEN
    assert bb.context(ROOT).kind is SplitKind.OR
    assert all(bb.context(k).kind is SplitKind.LEAF for k in kids)


def test_split_errors():
    bb = Blackboard()
    bb.split(ROOT, "AND", 1)
    with pytest.raises(AlreadySplit):
        bb.split(ROOT, "OR", 2)
    leaf = bb.leaves()[0]
    bb.set_status(leaf, S.TIMEOUT)
    with pytest.raises(ClosedContext):
        bb.split(leaf, "OR", 2)
    with pytest.raises(ValueError):
        Blackboard().split(ROOT, "OR", 0)
    with pytest.raises(ValueError):
        Blackboard().split(ROOT, "LEAF", 1)


def test_and_three_theorems():
    bb = Blackboard()
    kids = bb.split(ROOT, "AND", 3)
    for k in kids[:2]:
        bb.set_status(k, S.THEOREM)
    assert bb.status() is S.OPEN
    bb.set_status(kids[2], S.THEOREM)
    assert bb.status() is S.THEOREM


def test_inner_status_not_settable():
    bb = Blackboard()
    bb.split(ROOT, "OR", 2)
    with pytest.raises(NotALeaf):
        bb.set_status(ROOT, S.THEOREM)


@pytest.mark.parametrize(
    "kind, children, expected",
    [
        ("OR", [S.THEOREM, S.OPEN], S.THEOREM),
        ("AND", [S.THEOREM, S.THEOREM], S.THEOREM),
        ("AND", [S.THEOREM, S.COUNTER_SATISFIABLE], S.COUNTER_SATISFIABLE),
        ("OR", [S.TIMEOUT, S.UNKNOWN], S.UNKNOWN),
        ("OR", [S.ERROR, S.GAVE_UP, S.TIMEOUT], S.TIMEOUT),
        ("AND", [S.OPEN, S.COUNTER_SATISFIABLE], S.COUNTER_SATISFIABLE),
        ("AND", [S.OPEN, S.TIMEOUT], S.OPEN),
        ("AND", [S.THEOREM, S.TIMEOUT], S.TIMEOUT),
    ],
)
def test_combine_examples(kind, children, expected):
    assert combine(SplitKind(kind), children) is expected


def test_combine_matches_oracle_on_all_pairs_and_triples():
    statuses = list(S)
    for kind in ("AND", "OR"):
        for k in (1, 2, 3):
            for children in itertools.product(statuses, repeat=k):
                assert combine(SplitKind(kind), list(children)) is combine_oracle(kind, list(children)), (kind, children)


def test_combine_depends_only_on_multiset():
    for kind in (SplitKind.AND, SplitKind.OR):
        for children in itertools.product(LEAF_STATUSES, repeat=3):
            results = {combine(kind, list(p)) for p in itertools.permutations(children)}
            assert len(results) == 1


def test_failure_order_is_total_over_non_success():
    assert set(FAILURE_ORDER) == set(S) - {S.THEOREM, S.UNSATISFIABLE, S.OPEN}


def test_local_update_exhaustive():
    """Every node kind, children tuple and single-child change: the
    maintained parent status equals recombination.  Derived statuses stay
    inside the leaf status set, so this covers trees of any depth."""
    for kind in ("AND", "OR"):
        for k in (1, 2, 3):
            for before in itertools.product(LEAF_STATUSES, repeat=k):
                for pos in range(k):
                    for new in LEAF_STATUSES:
                        bb = Blackboard()
                        kids = bb.split(ROOT, kind, k)
                        for c, s in zip(kids, before):
                            bb.set_status(c, s)
                        bb.set_status(kids[pos], new)
                        after = list(before)
                        after[pos] = new
                        assert bb.status() is combine_oracle(kind, after)


def test_derived_statuses_stay_in_leaf_set():
    for kind in ("AND", "OR"):
        for k in (1, 2, 3):
            for children in itertools.product(LEAF_STATUSES, repeat=k):
                assert combine_oracle(kind, list(children)) in LEAF_STATUSES


def test_small_shapes_all_labelings():
    checked = sum(check_all_labelings(shape) for shape, _ in shapes(3, 2))
    assert checked > 0


def test_random_large_trees_incremental():
    rng = random.Random(7)
    for _ in range(200):
        shape = random_shape(rng, 4, p_leaf=0.2)
        built = build(shape)
        bb = built.bb
        for _ in range(3 * len(built.leaves)):
            bb.set_status(rng.choice(built.leaves), rng.choice(list(S)))
            assert bb.statuses() == bb.recompute()


def test_status_events_one_per_changed_context():
    bb = Blackboard()
    (mid,) = bb.split(ROOT, "AND", 1)
    a, b = bb.split(mid, "OR", 2)
    listener = bb.subscribe("t")
    events = bb.set_status(a, S.THEOREM)
    assert [e.context_id for e in events] == [a, mid, ROOT]
    assert all(e.kind is EventKind.STATUS_CHANGED for e in events)
    assert [e.context_id for e in listener.drain()] == [a, mid, ROOT]
    # b changes, but the OR parent is already proved
    assert [e.context_id for e in bb.set_status(b, S.TIMEOUT)] == [b]
    assert bb.set_status(b, S.TIMEOUT) == []


# -- deltas, views, replay --------------------------------------------------


def test_delta_is_atomic():
    bb = board("s")
    bb.split(ROOT, "OR", 1)
    listener = bb.subscribe("t")
    bad = Delta.of(Insert("s", 1), Insert("s", 2), SetStatus(ROOT, S.THEOREM))
    with pytest.raises(NotALeaf):
        bb.apply(bad)
    assert bb.query("s") == [] and listener.drain() == []
    events = bb.apply(Delta.of(Insert("s", 1), Insert("s", 2), Remove("s", 1)))
    assert [e.kind for e in events] == [EventKind.INSERTED, EventKind.INSERTED, EventKind.REMOVED]
    assert bb.query("s") == [2]


def test_view_is_read_only():
    bb = board("s")
    bb.insert("s", 1)
    view = bb.view()
    assert view.query("s") == [1] and view.contains("s", 1)
    assert not hasattr(view, "insert") and not hasattr(view, "apply")
    with pytest.raises(AttributeError):
        view.extra = 1
    # contexts handed out are copies
    view.context(ROOT).children.append(42)
    assert bb.context(ROOT).children == []


def test_replay_in_insertion_order():
    bb = board("s", "t")
    c1, c2 = bb.split(ROOT, "OR", 2)
    bb.insert("s", "a", c2)
    bb.insert("t", "x")
    bb.insert("s", "b")
    bb.insert("s", "c", c1)
    bb.remove("s", "b")
    assert [(e.datum, e.context_id) for e in bb.replay(["s"])] == [("a", c2), ("c", c1)]
    assert [e.datum for e in bb.replay()] == ["a", "x", "c"]


def test_store_filtered_listener():
    bb = board("s", "t")
    listener = bb.subscribe("only-s", ["s"])
    bb.insert("t", 1)
    bb.insert("s", 2)
    assert [e.datum for e in listener.drain()] == [2]


def test_dump_tree():
    bb = board("s")
    c1, c2 = bb.split(ROOT, "OR", 2)
    bb.insert("s", "d", c1)
    bb.set_status(c2, S.THEOREM)
    assert bb.dump_tree(["s"]).splitlines() == [
        "[0] OR Theorem",
        f"  [{c1}] LEAF Open",
        "      s: d",
        f"  [{c2}] LEAF Theorem",
    ]


# -- concurrency ------------------------------------------------------------


def test_exactly_once_under_16_writers():
    bb = board("s")
    listeners = [bb.subscribe(f"l{i}") for i in range(4)]
    per_writer = 300
    barrier = threading.Barrier(16)

    def writer(w: int) -> None:
        barrier.wait()
        for i in range(per_writer):
            bb.insert("s", (w, i))
            if i % 3 == 0:
                bb.remove("s", (w, i))

    threads = [threading.Thread(target=writer, args=(w,)) for w in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    mutations = 16 * (per_writer + len(range(0, per_writer, 3)))
    for listener in listeners:
        events = listener.drain()
        assert len(events) == mutations
        assert len({e.seq for e in events}) == mutations
        # delivery order per listener follows the global sequence
        assert [e.seq for e in events] == sorted(e.seq for e in events)
    assert len(bb.query("s")) == 16 * (per_writer - len(range(0, per_writer, 3)))


def test_event_delivered_after_mutation_visible():
    bb = board("s")
    listener = bb.subscribe("reader")
    seen_missing = []

    def reader() -> None:
        for _ in range(500):
            event = listener.get(timeout=5)
            if event is None or not bb.contains("s", event.datum):
                seen_missing.append(event)

    t = threading.Thread(target=reader)
    t.start()
    for i in range(500):
        bb.insert("s", i)
    t.join()
    assert seen_missing == []


def test_linearizable_inserts_and_queries():
    """Model check for an insert-only set: each query returns a superset of
    the inserts completed before it began and a subset of those begun
    before it ended, and a thread's successive queries never shrink."""
    bb = board("s")
    lock = threading.Lock()
    log: list[tuple] = []
    clock = itertools.count()

    def tick() -> int:
        with lock:
            return next(clock)

    def inserter(w: int) -> None:
        for i in range(200):
            start = tick()
            bb.insert("s", (w, i))
            log.append(("ins", (w, i), start, tick()))

    def querier() -> None:
        previous: set = set()
        for _ in range(200):
            start = tick()
            result = set(bb.query("s"))
            end = tick()
            log.append(("q", result, start, end))
            assert previous <= result
            previous = result

    threads = [threading.Thread(target=inserter, args=(w,)) for w in range(8)]
    threads += [threading.Thread(target=querier) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    inserts = [entry for entry in log if entry[0] == "ins"]
    for kind, result, start, end in (e for e in log if e[0] == "q"):
        done_before = {d for _, d, _, e_end in inserts if e_end < start}
        begun_before = {d for _, d, e_start, _ in inserts if e_start < end}
        assert done_before <= result <= begun_before
