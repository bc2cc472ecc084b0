"""Random auctions and exhaustive winner determination."""

from __future__ import annotations

import itertools
import math
import random

from holkit.agents import Task
from holkit.blackboard import ROOT


def random_auction(rng: random.Random, max_tasks: int = 12, resources: int = 6, reads: bool = False) -> list[Task]:
    names = [f"r{i}" for i in range(resources)]
    tasks = []
    for i in range(rng.randint(1, max_tasks)):
        writes = frozenset(rng.sample(names, rng.randint(1, resources)))
        read = frozenset(rng.sample(names, rng.randint(0, 2))) - writes if reads else frozenset()
        bid = round(rng.uniform(0.0, 10.0), 3)
        tasks.append(Task(f"t{i}", ROOT, read, writes, bid, f"task {i}"))
    return tasks


def optimum(tasks: list[Task]) -> float:
    """Best total bid over all conflict-free subsets (exhaustive)."""
    best = 0.0
    n = len(tasks)
    conflict = [[tasks[i].conflicts_with(tasks[j]) for j in range(n)] for i in range(n)]
    for mask in range(1 << n):
        chosen = [i for i in range(n) if mask >> i & 1]
        if any(conflict[a][b] for a, b in itertools.combinations(chosen, 2)):
            continue
        best = max(best, sum(tasks[i].bid for i in chosen))
    return best


def written_resources(tasks: list[Task]) -> int:
    return len(frozenset().union(*(t.write_set for t in tasks)))


def sqrt_bound(tasks: list[Task]) -> float:
    return optimum(tasks) / math.sqrt(max(1, written_resources(tasks)))
