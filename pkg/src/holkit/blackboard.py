"""Shared blackboard: typed data stores, change events and an and-or
context tree whose inner statuses are derived from their leaves.

All operations take one re-entrant lock, so each call (and each applied
:class:`Delta`) is atomic.  Events are queued to every listener while the
lock is still held, which keeps per-listener order equal to mutation order.
"""

from __future__ import annotations

import enum
import itertools
import queue
import threading
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence, Union

from .tptp.szs import SZSStatus

__all__ = [
    "BlackboardError",
    "DuplicateStore",
    "UnknownStore",
    "UnknownContext",
    "AlreadySplit",
    "ClosedContext",
    "NotALeaf",
    "SplitKind",
    "EventKind",
    "Event",
    "Context",
    "DataStore",
    "Insert",
    "Remove",
    "SetStatus",
    "Delta",
    "Listener",
    "Blackboard",
    "BlackboardView",
    "combine",
    "PROVED",
    "DISPROVED",
    "FAILURE_ORDER",
    "ROOT",
]

S = SZSStatus
ROOT = 0


class BlackboardError(Exception):
    pass


class DuplicateStore(BlackboardError):
    pass


class UnknownStore(BlackboardError, KeyError):
    pass


class UnknownContext(BlackboardError, KeyError):
    pass


class AlreadySplit(BlackboardError):
    pass


class ClosedContext(BlackboardError):
    pass


class NotALeaf(BlackboardError):
    pass


class SplitKind(enum.Enum):
    LEAF = "LEAF"
    AND = "AND"
    OR = "OR"


# ---------------------------------------------------------------------------
# status algebra

PROVED = (S.THEOREM, S.UNSATISFIABLE)
DISPROVED = (S.COUNTER_SATISFIABLE, S.SATISFIABLE)
# earlier = reported first when no child succeeded
FAILURE_ORDER = (
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
)
_RANK = {s: i for i, s in enumerate(FAILURE_ORDER)}


def _first_failure(statuses: Iterable[SZSStatus]) -> SZSStatus:
    return min(statuses, key=_RANK.__getitem__)


def combine(kind: SplitKind, statuses: Sequence[SZSStatus]) -> SZSStatus:
    """Status of an inner node from its children's statuses.

    OR: proved if some child is proved; otherwise Open while any child is
    Open; otherwise the first failure in :data:`FAILURE_ORDER`.
    AND: proved if every child is; disproved if some child is; otherwise
    Open while any child is Open; otherwise the first failure.
    """
    if not statuses:
        raise ValueError("inner contexts have at least one child")
    if kind is SplitKind.OR:
        if S.THEOREM in statuses:
            return S.THEOREM
        if S.UNSATISFIABLE in statuses:
            return S.UNSATISFIABLE
        if S.OPEN in statuses:
            return S.OPEN
        return _first_failure(statuses)
    if kind is SplitKind.AND:
        if all(s in PROVED for s in statuses):
            return S.UNSATISFIABLE if all(s is S.UNSATISFIABLE for s in statuses) else S.THEOREM
        for s in DISPROVED:
            if s in statuses:
                return s
        if S.OPEN in statuses:
            return S.OPEN
        return _first_failure([s for s in statuses if s not in PROVED])
    raise ValueError("leaves have no derived status")


# ---------------------------------------------------------------------------
# data


class EventKind(enum.Enum):
    INSERTED = "Inserted"
    REMOVED = "Removed"
    STATUS_CHANGED = "StatusChanged"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    seq: int
    context_id: int
    store_id: str | None = None
    datum: Any = None
    status: SZSStatus | None = None
    previous: SZSStatus | None = None


@dataclass
class Context:
    id: int
    parent: int | None
    kind: SplitKind = SplitKind.LEAF
    children: list[int] = field(default_factory=list)
    status: SZSStatus = S.OPEN
    depth: int = 0


@dataclass
class DataStore:
    store_id: str
    element_kind: Any
    # context id -> datum -> sequence number of its Inserted event
    contents: dict[int, dict[Hashable, int]] = field(default_factory=dict)

    def size(self) -> int:
        return sum(len(v) for v in self.contents.values())


@dataclass(frozen=True)
class Insert:
    store_id: str
    datum: Hashable
    context_id: int = ROOT


@dataclass(frozen=True)
class Remove:
    store_id: str
    datum: Hashable
    context_id: int = ROOT


@dataclass(frozen=True)
class SetStatus:
    context_id: int
    status: SZSStatus


Operation = Union[Insert, Remove, SetStatus]


@dataclass(frozen=True)
class Delta:
    """Mutations applied all-or-nothing by :meth:`Blackboard.apply`."""

    operations: tuple[Operation, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.operations)

    @classmethod
    def of(cls, *ops: Operation) -> Delta:
        return cls(tuple(ops))


class Listener:
    """Per-subscriber ordered event queue."""

    def __init__(self, name: str, stores: frozenset[str] | None = None) -> None:
        self.name = name
        self.stores = stores
        self._queue: queue.SimpleQueue[Event] = queue.SimpleQueue()
        self.received = 0

    def wants(self, event: Event) -> bool:
        if self.stores is None or event.store_id is None:
            return True
        return event.store_id in self.stores

    def _push(self, event: Event) -> None:
        self.received += 1
        self._queue.put(event)

    def get(self, timeout: float | None = None) -> Event | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def drain(self) -> list[Event]:
        events = []
        while True:
            try:
                events.append(self._queue.get_nowait())
            except queue.Empty:
                return events


class Blackboard:
    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._stores: dict[str, DataStore] = {}
        self._contexts: dict[int, Context] = {ROOT: Context(ROOT, None)}
        self._ids = itertools.count(1)
        self._seq = itertools.count(1)
        self._listeners: list[Listener] = []

    # -- listeners ----------------------------------------------------------

    def subscribe(self, name: str, stores: Iterable[str] | None = None) -> Listener:
        listener = Listener(name, frozenset(stores) if stores is not None else None)
        with self._lock:
            self._listeners.append(listener)
        return listener

    def unsubscribe(self, listener: Listener) -> None:
        with self._lock:
            self._listeners.remove(listener)

    def _emit(self, event: Event) -> Event:
        for listener in self._listeners:
            if listener.wants(event):
                listener._push(event)
        return event

    # -- stores -------------------------------------------------------------

    def register_store(self, store_id: str, element_kind: Any = object) -> None:
        with self._lock:
            if store_id in self._stores:
                raise DuplicateStore(store_id)
            self._stores[store_id] = DataStore(store_id, element_kind)

    def stores(self) -> list[str]:
        with self._lock:
            return list(self._stores)

    def store_info(self) -> list[tuple[str, Any, int]]:
        with self._lock:
            return [(s.store_id, s.element_kind, s.size()) for s in self._stores.values()]

    def _store(self, store_id: str) -> DataStore:
        try:
            return self._stores[store_id]
        except KeyError:
            raise UnknownStore(store_id) from None

    def _context(self, context_id: int) -> Context:
        try:
            return self._contexts[context_id]
        except KeyError:
            raise UnknownContext(context_id) from None

    def _check_kind(self, store: DataStore, datum: Any) -> None:
        kind = store.element_kind
        if isinstance(kind, type) and not isinstance(datum, kind):
            raise TypeError(f"store {store.store_id} holds {kind.__name__}, got {type(datum).__name__}")

    def insert(self, store_id: str, datum: Hashable, context_id: int = ROOT) -> Event | None:
        """Add ``datum``; returns the Inserted event, or ``None`` if it was
        already present in that context."""
        with self._lock:
            events = self._apply([Insert(store_id, datum, context_id)])
            return events[0] if events else None

    def remove(self, store_id: str, datum: Hashable, context_id: int = ROOT) -> Event | None:
        with self._lock:
            events = self._apply([Remove(store_id, datum, context_id)])
            return events[0] if events else None

    def query(self, store_id: str, context_id: int = ROOT) -> list[Any]:
        """Data visible in ``context_id``: its own and its ancestors'."""
        with self._lock:
            store = self._store(store_id)
            lineage = self.lineage(context_id)
            out: dict[Hashable, int] = {}
            for cid in reversed(lineage):
                out.update(store.contents.get(cid, {}))
            return list(out)

    def replay(self, store_ids: Iterable[str] | None = None) -> list[Event]:
        """Inserted events for the current contents, in original order."""
        with self._lock:
            wanted = self._stores if store_ids is None else [self._store(s).store_id for s in store_ids]
            events = [
                Event(EventKind.INSERTED, seq, cid, sid, datum)
                for sid in wanted
                for cid, bucket in self._stores[sid].contents.items()
                for datum, seq in bucket.items()
            ]
            return sorted(events, key=lambda e: e.seq)

    def contains(self, store_id: str, datum: Hashable, context_id: int = ROOT) -> bool:
        with self._lock:
            store = self._store(store_id)
            return any(datum in store.contents.get(c, ()) for c in self.lineage(context_id))

    # -- contexts -----------------------------------------------------------

    def lineage(self, context_id: int) -> list[int]:
        """``context_id`` followed by its ancestors up to the root."""
        with self._lock:
            out = []
            ctx: Context | None = self._context(context_id)
            while ctx is not None:
                out.append(ctx.id)
                ctx = self._contexts[ctx.parent] if ctx.parent is not None else None
            return out

    def context(self, context_id: int) -> Context:
        with self._lock:
            ctx = self._context(context_id)
            return Context(ctx.id, ctx.parent, ctx.kind, list(ctx.children), ctx.status, ctx.depth)

    def contexts(self) -> list[int]:
        with self._lock:
            return list(self._contexts)

    def leaves(self) -> list[int]:
        with self._lock:
            return [c.id for c in self._contexts.values() if c.kind is SplitKind.LEAF]

    def status(self, context_id: int = ROOT) -> SZSStatus:
        with self._lock:
            return self._context(context_id).status

    def split(self, context_id: int, kind: SplitKind | str, n: int) -> list[int]:
        kind = SplitKind(kind) if isinstance(kind, str) else kind
        if kind is SplitKind.LEAF:
            raise ValueError("split kind must be AND or OR")
        if n < 1:
            raise ValueError("a split needs at least one child")
        with self._lock:
            ctx = self._context(context_id)
            if ctx.kind is not SplitKind.LEAF:
                raise AlreadySplit(context_id)
            if ctx.status is not S.OPEN:
                raise ClosedContext(context_id)
            ctx.kind = kind
            for _ in range(n):
                child = Context(next(self._ids), ctx.id, depth=ctx.depth + 1)
                self._contexts[child.id] = child
                ctx.children.append(child.id)
            return list(ctx.children)

    def set_status(self, context_id: int, status: SZSStatus) -> list[Event]:
        """Set a leaf status and re-derive its ancestors; one event per
        context whose status changed."""
        with self._lock:
            return self._apply([SetStatus(context_id, status)])

    # -- deltas -------------------------------------------------------------

    def apply(self, delta: Delta) -> list[Event]:
        """Apply all operations of ``delta`` or none of them."""
        with self._lock:
            return self._apply(delta.operations)

    def _validate(self, ops: Sequence[Operation]) -> None:
        for op in ops:
            if isinstance(op, (Insert, Remove)):
                store = self._store(op.store_id)
                self._context(op.context_id)
                if isinstance(op, Insert):
                    self._check_kind(store, op.datum)
            elif isinstance(op, SetStatus):
                if self._context(op.context_id).kind is not SplitKind.LEAF:
                    raise NotALeaf(op.context_id)
                if not isinstance(op.status, SZSStatus):
                    raise TypeError(f"not an SZS status: {op.status!r}")
            else:
                raise TypeError(f"unknown operation {op!r}")

    def _apply(self, ops: Sequence[Operation]) -> list[Event]:
        self._validate(ops)
        events: list[Event] = []
        for op in ops:
            if isinstance(op, Insert):
                bucket = self._stores[op.store_id].contents.setdefault(op.context_id, {})
                if op.datum in bucket:
                    continue
                seq = next(self._seq)
                bucket[op.datum] = seq
                events.append(self._emit(Event(EventKind.INSERTED, seq, op.context_id, op.store_id, op.datum)))
            elif isinstance(op, Remove):
                bucket = self._stores[op.store_id].contents.get(op.context_id, {})
                if op.datum not in bucket:
                    continue
                del bucket[op.datum]
                events.append(
                    self._emit(Event(EventKind.REMOVED, next(self._seq), op.context_id, op.store_id, op.datum))
                )
            else:
                events.extend(self._set_leaf(op.context_id, op.status))
        return events

    def _set_leaf(self, context_id: int, status: SZSStatus) -> list[Event]:
        events = []
        ctx = self._contexts[context_id]
        while True:
            if ctx.status is status:
                break
            previous, ctx.status = ctx.status, status
            events.append(
                self._emit(
                    Event(EventKind.STATUS_CHANGED, next(self._seq), ctx.id, status=status, previous=previous)
                )
            )
            if ctx.parent is None:
                break
            ctx = self._contexts[ctx.parent]
            status = combine(ctx.kind, [self._contexts[c].status for c in ctx.children])
        return events

    # -- verification & display ---------------------------------------------

    def recompute(self) -> dict[int, SZSStatus]:
        """Statuses derived from scratch, bottom-up from the leaves."""
        with self._lock:
            memo: dict[int, SZSStatus] = {}

            def go(cid: int) -> SZSStatus:
                ctx = self._contexts[cid]
                if ctx.kind is SplitKind.LEAF:
                    result = ctx.status
                else:
                    result = combine(ctx.kind, [go(c) for c in ctx.children])
                memo[cid] = result
                return result

            go(ROOT)
            return memo

    def statuses(self) -> dict[int, SZSStatus]:
        with self._lock:
            return {cid: c.status for cid, c in self._contexts.items()}

    def dump_tree(self, store_ids: Sequence[str] = ()) -> str:
        """Indented text rendering of the context tree."""
        with self._lock:
            lines: list[str] = []

            def go(cid: int, indent: int) -> None:
                ctx = self._contexts[cid]
                lines.append(f"{'  ' * indent}[{cid}] {ctx.kind.value} {ctx.status.label}")
                for sid in store_ids:
                    for datum in self._stores[sid].contents.get(cid, {}):
                        lines.append(f"{'  ' * (indent + 2)}{sid}: {datum}")
                for child in ctx.children:
                    go(child, indent + 1)

            go(ROOT, 0)
            return "\n".join(lines)

    def view(self) -> BlackboardView:
        return BlackboardView(self)


class BlackboardView:
    """Read-only facade handed to agent filters."""

    __slots__ = ("_bb",)

    def __init__(self, bb: Blackboard) -> None:
        object.__setattr__(self, "_bb", bb)

    def __setattr__(self, name, value):
        raise AttributeError("blackboard view is read-only")

    def query(self, store_id: str, context_id: int = ROOT) -> list[Any]:
        return self._bb.query(store_id, context_id)

    def contains(self, store_id: str, datum: Hashable, context_id: int = ROOT) -> bool:
        return self._bb.contains(store_id, datum, context_id)

    def status(self, context_id: int = ROOT) -> SZSStatus:
        return self._bb.status(context_id)

    def context(self, context_id: int) -> Context:
        return self._bb.context(context_id)

    def lineage(self, context_id: int) -> list[int]:
        return self._bb.lineage(context_id)

    def leaves(self) -> list[int]:
        return self._bb.leaves()

    def stores(self) -> list[str]:
        return self._bb.stores()
