"""Seeded random graphs shared by the differential and acceptance tests."""

from __future__ import annotations

import random

from parcycles.generators import random_temporal


def corpus(count: int, seed: int = 0, max_n: int = 10, max_p: float = 0.3, max_parallel: int = 2):
    """Yield ``(index, graph)`` pairs; every graph is reproducible from ``seed``."""
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(3, max_n)
        p = rng.uniform(0.1, max_p)
        par = rng.choice([1] * 3 + [max_parallel])
        yield i, random_temporal(n, p, ts_max=20, seed=rng.randrange(2**31), max_parallel=par)


def cyclic_corpus(count: int, seed: int = 0, max_n: int = 8, max_p: float = 0.3):
    """Like :func:`corpus` but keeps only graphs with at least two simple cycles."""
    from parcycles import Constraints, tiernan_enumerate

    found = 0
    for i, g in corpus(10 * count + 100, seed, max_n, max_p):
        cnt = tiernan_enumerate(g, Constraints(), lambda b: None)
        if cnt.cycles_reported >= 2:
            yield i, g
            found += 1
            if found == count:
                return


def task_ids(run):
    """Ids of every task started by its creator during ``run(injector)``."""
    from parcycles import StealInjector

    seen = []

    def record(task):
        seen.append(task.tid)
        return False

    run(StealInjector(predicate=record))
    return seen


def steal_sweep(run):
    """Yield ``(tid, result)`` for a run forcing exactly task ``tid`` to be stolen."""
    from parcycles import StealInjector

    for tid in task_ids(run):
        yield tid, run(StealInjector(ids={tid}))
