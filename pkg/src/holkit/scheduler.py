"""Auction-based scheduler.

Each round collects the tasks agents bid on in response to new blackboard
events, picks a conflict-free set of winners by density greedy, runs them
in a thread pool and applies their deltas in winner order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .agents.base import Agent, Task
from .blackboard import ROOT, Blackboard, BlackboardError, Delta, Event
from .tptp.szs import SZSStatus

__all__ = [
    "SchedulerConfig",
    "Scheduler",
    "select_winners",
    "auction_value",
    "is_conflict_free",
    "density",
    "run_loop",
    "DEFAULT_TERMINATION",
]

# every verdict other than Open ends the loop
DEFAULT_TERMINATION = frozenset(s for s in SZSStatus if s is not SZSStatus.OPEN)


def density(task: Task) -> float:
    return task.bid / math.sqrt(max(1, len(task.write_set)))


def select_winners(tasks: Sequence[Task]) -> list[Task]:
    """Density-greedy winner determination.

    Tasks are visited by ``bid / sqrt(|write set|)`` descending, ties in
    input order, and admitted when they conflict with no admitted task.
    Winners are returned in visiting order.
    """
    order = sorted(range(len(tasks)), key=lambda i: -density(tasks[i]))
    winners: list[Task] = []
    for i in order:
        task = tasks[i]
        if not any(task.conflicts_with(w) for w in winners):
            winners.append(task)
    return winners


def auction_value(tasks: Iterable[Task]) -> float:
    return sum(t.bid for t in tasks)


def is_conflict_free(tasks: Sequence[Task]) -> bool:
    return all(not a.conflicts_with(b) for i, a in enumerate(tasks) for b in tasks[i + 1 :])


@dataclass(frozen=True)
class SchedulerConfig:
    max_parallel_tasks: int = 4
    round_timeout: float | None = 60.0
    timeout: float | None = 300.0
    termination_statuses: frozenset[SZSStatus] = DEFAULT_TERMINATION
    max_rounds: int | None = None

    def __post_init__(self) -> None:
        if self.max_parallel_tasks < 1:
            raise ValueError("max_parallel_tasks must be at least 1")
        for name in ("round_timeout", "timeout"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "termination_statuses", frozenset(self.termination_statuses))


def _fmt_bid(x: float) -> str:
    return f"{x:.3f}"


@dataclass
class Scheduler:
    """Drives rounds until the root status is final, no task is offered,
    or a deadline passes.  ``trace`` collects one line per fact and never
    includes timings."""

    blackboard: Blackboard
    agents: Sequence[Agent]
    config: SchedulerConfig = field(default_factory=SchedulerConfig)
    trace: list[str] = field(default_factory=list)
    rounds: int = 0

    def _log(self, line: str) -> None:
        self.trace.append(line)

    def _collect(self, events: list[Event]) -> list[Task]:
        view = self.blackboard.view()
        tasks: list[Task] = []
        seen: set[Task] = set()
        for agent in self.agents:
            stores = agent.interested_stores
            for event in events:
                if event.store_id is not None and event.store_id not in stores:
                    continue
                for task in agent.filter(event, view):
                    # the same task may be proposed once per triggering event
                    if task not in seen:
                        seen.add(task)
                        tasks.append(task)
        return tasks

    def _finish(self, status: SZSStatus, reason: str) -> SZSStatus:
        self._log(f"end {reason}: {status.label}")
        return status

    def run(self) -> SZSStatus:
        bb, cfg = self.blackboard, self.config
        deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout
        stores = set().union(*(a.interested_stores for a in self.agents)) if self.agents else set()
        by_name = {a.name: a for a in self.agents}
        if len(by_name) != len(self.agents):
            raise ValueError("agent names must be unique")
        listener = bb.subscribe("scheduler")
        # shut down without waiting so that a hung task cannot block the caller
        pool = ThreadPoolExecutor(max_workers=cfg.max_parallel_tasks, thread_name_prefix="holkit-task")
        try:
            pending = bb.replay(sorted(s for s in stores if s in bb.stores()))
            listener.drain()
            while True:
                root = bb.status(ROOT)
                if root in cfg.termination_statuses:
                    return self._finish(root, "final status")
                if deadline is not None and time.monotonic() > deadline:
                    return self._finish(SZSStatus.TIMEOUT, "deadline")
                if cfg.max_rounds is not None and self.rounds >= cfg.max_rounds:
                    return self._finish(SZSStatus.GAVE_UP if root is SZSStatus.OPEN else root, "round limit")
                tasks = self._collect(pending)
                if not tasks:
                    return self._finish(SZSStatus.GAVE_UP if root is SZSStatus.OPEN else root, "quiescent")
                self.rounds += 1
                winners = select_winners(tasks)
                self._log(
                    f"round {self.rounds}: offered {len(tasks)} winners {len(winners)}"
                    f" value {_fmt_bid(auction_value(winners))}"
                )
                won = set(winners)
                for task in winners:
                    self._log(f"  win  [{task.context_id}] {task.agent}: {task.description} bid {_fmt_bid(task.bid)}")
                for task in tasks:
                    if task not in won:
                        self._log(f"  lose [{task.context_id}] {task.agent}: {task.description} bid {_fmt_bid(task.bid)}")
                futures = [pool.submit(by_name[t.agent].run, t) for t in winners]
                limit = cfg.round_timeout
                if deadline is not None:
                    remaining = max(0.0, deadline - time.monotonic())
                    limit = remaining if limit is None else min(limit, remaining)
                _, not_done = wait(futures, timeout=limit)
                if not_done:
                    return self._finish(SZSStatus.TIMEOUT, "round deadline")
                for task, future in zip(winners, futures):
                    exc = future.exception()
                    if exc is not None:
                        self._log(f"  error {task.agent}: {type(exc).__name__}: {exc}")
                        return self._finish(SZSStatus.ERROR, "task failed")
                    delta = future.result()
                    if delta is None:
                        continue
                    if not isinstance(delta, Delta):
                        self._log(f"  error {task.agent}: run returned {type(delta).__name__}")
                        return self._finish(SZSStatus.ERROR, "task failed")
                    try:
                        bb.apply(delta)
                    except (BlackboardError, TypeError, KeyError) as exc:
                        self._log(f"  error {task.agent}: {type(exc).__name__}: {exc}")
                        return self._finish(SZSStatus.ERROR, "delta rejected")
                pending = listener.drain()
                self._log(f"  root {bb.status(ROOT).label}")
        finally:
            pool.shutdown(wait=False, cancel_futures=True)
            bb.unsubscribe(listener)


def run_loop(
    blackboard: Blackboard,
    agents: Sequence[Agent],
    config: SchedulerConfig | None = None,
    trace: list[str] | None = None,
) -> SZSStatus:
    """Run the scheduler; an Open root at quiescence is reported as GaveUp.
    Trace lines are appended to ``trace`` when given."""
    scheduler = Scheduler(blackboard, agents, config or SchedulerConfig())
    try:
        return scheduler.run()
    finally:
        if trace is not None:
            trace.extend(scheduler.trace)
