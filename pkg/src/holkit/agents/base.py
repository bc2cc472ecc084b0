"""Agent contract: a pure filter turns events into bidding tasks, and
running a task yields a :class:`~holkit.blackboard.Delta`."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Hashable

from ..blackboard import BlackboardView, Event
from ..terms import Term, pretty

__all__ = ["FORMULAS", "FormulaDatum", "Task", "Agent", "formula_resource", "status_resource"]

# store holding FormulaDatum entries
FORMULAS = "formulas"


@dataclass(frozen=True)
class FormulaDatum:
    name: str
    role: str
    term: Term

    def __str__(self) -> str:
        return f"{self.name} ({self.role}): {pretty(self.term, 'named')}"


def formula_resource(context_id: int, datum: FormulaDatum) -> tuple:
    return ("formula", context_id, datum)


def status_resource(context_id: int) -> tuple:
    return ("status", context_id)


@dataclass(frozen=True)
class Task:
    """A proposed action with its bid and the data it reads and writes."""

    agent: str
    context_id: int
    read_set: frozenset[Hashable]
    write_set: frozenset[Hashable]
    bid: float
    description: str = ""
    payload: Any = field(default=None, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.bid < 0:
            raise ValueError("bids are non-negative")

    def conflicts_with(self, other: Task) -> bool:
        return bool(
            self.write_set & other.write_set
            or self.write_set & other.read_set
            or self.read_set & other.write_set
        )


class Agent(abc.ABC):
    """Subclasses implement :meth:`filter` (pure, read-only view) and
    :meth:`run` (returns the Delta to apply)."""

    name: str = "agent"
    interested_stores: frozenset[str] = frozenset({FORMULAS})

    @abc.abstractmethod
    def filter(self, event: Event, view: BlackboardView) -> list[Task]: ...

    @abc.abstractmethod
    def run(self, task: Task): ...

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"
