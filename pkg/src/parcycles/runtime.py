"""Work-stealing task runtime.

Each worker owns a LIFO deque of tasks and a lock guarding the search
states it created. Idle or waiting workers steal the oldest task of a
random victim. A task carries a reference to the search state (``slot``) it
runs against; stealing replaces that reference with a private copy made by
the task's ``cos`` hook while the creator's lock is held.

``wait`` only pops local tasks newer than a watermark (a task id) taken
before the children were spawned, so a waiting task never runs work that belongs to one of its
ancestors against a state that has moved on.

Two backends share this contract:

* ``threads``: one OS thread per worker.
* ``simulated``: all workers multiplexed on the calling thread. Steals happen
  at task-start points, chosen by a seeded RNG or forced by a
  ``StealInjector``. Runs are reproducible for a given seed.
* ``virtual``: one OS thread per worker, but only the holder of a baton runs.
  Each worker keeps a virtual clock advanced by the time it held the baton,
  and at every task start the baton passes to the worker whose clock lags
  furthest. Steals and joins respect spawn and completion times. This emulates
  ``p`` cores on any machine: ``busy_ns`` is per-worker execution time and
  ``wall_ns`` is the virtual makespan.
"""

from __future__ import annotations

import itertools
import random
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from ._deep import run_deep, start_big_thread
from .metrics import MetricsSnapshot, VisitCounters


class Task:
    __slots__ = (
        "fn",
        "args",
        "slot",
        "depth",
        "creator",
        "executor",
        "cos",
        "done",
        "result",
        "tid",
        "stolen",
        "vt",
    )

    def __init__(self, fn, args, slot, depth, creator, cos, tid):
        self.fn = fn
        self.args = args
        self.slot = slot
        self.depth = depth
        self.creator = creator
        self.executor = None
        self.cos = cos
        self.done = False
        self.result = None
        self.tid = tid
        self.stolen = False
        self.vt = 0

    def __repr__(self) -> str:
        return f"Task(tid={self.tid}, depth={self.depth}, args={self.args!r})"


class Worker:
    """Per-worker queue, lock and result shards."""

    def __init__(self, wid: int, seed: int | None, trace: bool):
        self.wid = wid
        self.deque: deque[Task] = deque()
        self.qlock = threading.Lock()
        self.lock = threading.Lock()
        self.counters = VisitCounters()
        self.tasks_spawned = 0
        self.tasks_stolen = 0
        self.busy_ns = 0
        self.out: list = []
        self.trace: list | None = [] if trace else None
        self.rng = random.Random(None if seed is None else seed * 1_000_003 + wid)
        self.rep = None
        self.vclock = 0
        self.idle = False
        self.go = threading.Event()

    def __repr__(self) -> str:
        return f"Worker({self.wid})"


BACKENDS = ("threads", "simulated", "virtual")


@dataclass
class StealInjector:
    """Force steals at chosen points of a simulated run.

    A task is selected when its id is in ``ids`` or ``predicate(task)`` is
    true; a selected task is stolen when its creator is about to run it.
    Independently, when the creator is about to run a task for which
    ``before(task)`` is true, the thief first steals the creator's oldest
    queued task, as an idle worker would. The thief is ``thief`` if given,
    else the next worker id.
    """

    ids: frozenset[int] | set[int] | None = None
    predicate: Callable[[Task], bool] | None = None
    thief: int | None = None
    before: Callable[[Task], bool] | None = None

    def select(self, task: Task, p: int) -> int | None:
        hit = (self.ids is not None and task.tid in self.ids) or (
            self.predicate is not None and self.predicate(task)
        )
        if not hit:
            return None
        return self.thief_for(task.creator, p)

    def thief_for(self, victim: Worker, p: int) -> int | None:
        t = self.thief if self.thief is not None else (victim.wid + 1) % p
        return None if t == victim.wid else t


class Runtime:
    """Task scheduler for ``p`` workers.

    ``steal_prob`` is the chance, at each simulated task start, that some
    other worker steals the oldest queued task; ``max_nesting`` caps how many
    simulated steals may be in progress at once. ``quantum_ns`` is the clock
    skew the virtual backend tolerates before handing the baton over.
    """

    def __init__(
        self,
        p: int = 1,
        backend: str = "threads",
        seed: int | None = 0,
        steal_prob: float = 0.0,
        injector: StealInjector | None = None,
        trace: bool = False,
        max_nesting: int = 64,
        quantum_ns: int = 100_000,
    ):
        if p < 1:
            raise ValueError("need at least one worker")
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}")
        if injector is not None and backend != "simulated":
            raise ValueError("steal injection requires the simulated backend")
        self.p = p
        self.backend = backend
        self.seed = seed
        self.steal_prob = steal_prob
        self.injector = injector
        self.max_nesting = max_nesting
        self.quantum_ns = quantum_ns
        self._virtual = backend == "virtual"
        self._live: list[Worker] = []
        self._errors: list[BaseException] = []
        self.workers = [Worker(i, seed, trace) for i in range(p)]
        self._ids = itertools.count()
        self._rng = random.Random(seed)
        self._nesting = 0
        self._roots: deque[Task] = deque()
        self._rlock = threading.Lock()
        self._pending = 0
        self._cur: Worker | None = None
        self._t_last = 0
        self.wall_ns = 0

    @property
    def simulated(self) -> bool:
        return self.backend == "simulated"

    # ------------------------------------------------------------ tasks

    def task(self, fn, args, slot=None, depth: int = 1, creator: Worker | None = None, cos=None) -> Task:
        return Task(fn, args, slot, depth, creator, cos, next(self._ids))

    def spawn(self, w: Worker, fn, args, slot, depth: int, cos=None) -> Task:
        """Queue a child task on ``w``'s deque."""
        t = Task(fn, args, slot, depth, w, cos, next(self._ids))
        w.tasks_spawned += 1
        if self._virtual:
            self._tick(w)
            t.vt = w.vclock
        with w.qlock:
            w.deque.append(t)
        return t

    def mark(self, w: Worker | None = None) -> int:
        """Watermark: every task spawned afterwards has a larger id."""
        return next(self._ids)

    def wait(self, w: Worker, tasks: list[Task], watermark: int) -> None:
        """Return once every task in ``tasks`` is done, helping meanwhile."""
        if self.simulated:
            self._wait_sim(w, tasks, watermark)
        elif self._virtual:
            self._wait_virtual(w, tasks, watermark)
        else:
            self._wait_threads(w, tasks, watermark)

    def _execute(self, w: Worker, t: Task) -> None:
        t.executor = w
        t.result = t.fn(t, w)
        if self._virtual:
            self._tick(w)
            t.vt = w.vclock
        t.done = True

    def _claim(self, thief: Worker, t: Task) -> Task:
        t.stolen = True
        thief.tasks_stolen += 1
        if t.cos is not None:
            t.slot = t.cos(t, thief)
        return t

    # ------------------------------------------------------------ driver

    def run(self, roots: Iterable[Task]) -> MetricsSnapshot:
        """Execute root tasks to completion and return merged metrics."""
        roots = list(roots)
        self.workers[0].tasks_spawned += len(roots)
        t0 = time.perf_counter_ns()
        if self.simulated:
            run_deep(self._run_sim, roots)
        elif self._virtual:
            self._run_virtual(roots)
        else:
            self._run_threads(roots)
        self.wall_ns = time.perf_counter_ns() - t0
        if self._virtual:
            self.wall_ns = max(w.vclock for w in self.workers)
        return self.snapshot()

    def snapshot(self) -> MetricsSnapshot:
        total = VisitCounters()
        for w in self.workers:
            total.add(w.counters)
        return MetricsSnapshot.from_counters(
            total,
            busy_ns=[w.busy_ns for w in self.workers],
            tasks_spawned=sum(w.tasks_spawned for w in self.workers),
            tasks_stolen=sum(w.tasks_stolen for w in self.workers),
            wall_ns=self.wall_ns,
        )

    def results(self) -> list:
        """Concatenated result shards in worker order."""
        out = []
        for w in self.workers:
            out.extend(w.out)
        return out

    # ------------------------------------------------------------ threads

    def _run_threads(self, roots: list[Task]) -> None:
        self._roots = deque(roots)
        self._pending = len(roots)
        errors: list[BaseException] = []
        threads = [
            start_big_thread(lambda w=w: self._worker_main(w, errors), f"parcycles-w{w.wid}") for w in self.workers
        ]
        for th in threads:
            th.join()
        if errors:
            raise errors[0]

    def _worker_main(self, w: Worker, errors: list) -> None:
        start = time.thread_time_ns()
        nap = 1e-5
        try:
            while not errors:
                t = self._take_local(w, -1) or self._take_root(w) or self._steal(w)
                if t is not None:
                    nap = 1e-5
                    self._execute(w, t)
                    if t.depth == 1 and t.creator is None:
                        with self._rlock:
                            self._pending -= 1
                    continue
                with self._rlock:
                    if self._pending == 0:
                        break
                time.sleep(nap)
                nap = min(nap * 2, 1e-3)
        except BaseException as e:
            errors.append(e)
        finally:
            w.busy_ns += time.thread_time_ns() - start

    def _take_local(self, w: Worker, watermark: int) -> Task | None:
        dq = w.deque
        if not dq or dq[-1].tid <= watermark:
            return None
        with w.qlock:
            if dq and dq[-1].tid > watermark:
                return dq.pop()
        return None

    @staticmethod
    def _has_local(w: Worker, watermark: int) -> bool:
        dq = w.deque
        return bool(dq) and dq[-1].tid > watermark

    def _take_root(self, w: Worker) -> Task | None:
        if not self._roots:
            return None
        with self._rlock:
            return self._roots.popleft() if self._roots else None

    def _steal(self, w: Worker) -> Task | None:
        p = self.p
        if p == 1:
            return None
        start = w.rng.randrange(p)
        for k in range(p):
            v = self.workers[(start + k) % p]
            if v is w or not v.deque:
                continue
            with v.qlock:
                if not v.deque:
                    continue
                t = v.deque.popleft()
            if self._virtual:
                self._tick(w)
                w.vclock = max(w.vclock, t.vt)
            return self._claim(w, t)
        return None

    def _wait_threads(self, w: Worker, tasks: list[Task], watermark: int) -> None:
        i = 0
        nap = 1e-5
        while i < len(tasks):
            if tasks[i].done:
                i += 1
                continue
            t = self._take_local(w, watermark) or self._steal(w)
            if t is not None:
                nap = 1e-5
                self._execute(w, t)
                continue
            time.sleep(nap)
            nap = min(nap * 2, 1e-3)

    # ------------------------------------------------------------ virtual

    def _tick(self, w: Worker, busy: bool = True) -> None:
        now = time.perf_counter_ns()
        d = now - self._t_last
        self._t_last = now
        w.vclock += d
        if busy:
            w.busy_ns += d

    def _laggard(self) -> Worker:
        return min(self._live, key=lambda x: (x.vclock, x.wid))

    def _handoff(self, w: Worker, nxt: Worker) -> None:
        w.go.clear()
        nxt.go.set()
        w.go.wait()
        self._t_last = time.perf_counter_ns()

    def _yield(self, w: Worker) -> None:
        """Pass the baton if another worker trails ``w`` by more than a quantum."""
        self._tick(w)
        nxt = self._laggard()
        if nxt is not w and nxt.vclock + self.quantum_ns < w.vclock:
            self._handoff(w, nxt)

    def _idle(self, w: Worker) -> None:
        """No work found: let time pass until some busy worker catches up."""
        self._tick(w, busy=False)
        w.idle = True
        busy = [x.vclock for x in self._live if x is not w and not x.idle]
        if busy:
            w.vclock = max(w.vclock, min(busy)) + 1
        else:
            others = [x.vclock for x in self._live if x is not w]
            if not others:
                return
            w.vclock = max(w.vclock, min(others)) + 1
        nxt = self._laggard()
        if nxt is not w:
            self._handoff(w, nxt)

    def _run_virtual(self, roots: list[Task]) -> None:
        self._roots = deque(roots)
        self._pending = len(roots)
        self._errors = []
        self._live = list(self.workers)
        for w in self.workers:
            w.go.clear()
        self.workers[0].go.set()
        self._t_last = time.perf_counter_ns()
        threads = [start_big_thread(lambda w=w: self._vworker_main(w), f"parcycles-v{w.wid}") for w in self.workers]
        for th in threads:
            th.join()
        if self._errors:
            raise self._errors[0]

    def _vworker_main(self, w: Worker) -> None:
        w.go.wait()
        self._t_last = time.perf_counter_ns()
        try:
            while not self._errors:
                t = self._take_local(w, -1) or self._take_root(w) or self._steal(w)
                if t is not None:
                    w.idle = False
                    self._execute(w, t)
                    if t.depth == 1 and t.creator is None:
                        self._pending -= 1
                    self._yield(w)
                    continue
                if self._pending == 0:
                    break
                self._idle(w)
        except BaseException as e:
            self._errors.append(e)
        finally:
            self._tick(w, busy=False)
            self._live.remove(w)
            if self._live:
                self._laggard().go.set()

    def _wait_virtual(self, w: Worker, tasks: list[Task], watermark: int) -> None:
        i = 0
        while i < len(tasks):
            t = tasks[i]
            if t.done:
                w.vclock = max(w.vclock, t.vt)
                i += 1
                continue
            if self._errors:
                raise RuntimeError("another worker failed")
            t = self._take_local(w, watermark) or self._steal(w)
            if t is not None:
                w.idle = False
                self._execute(w, t)
                self._yield(w)
                continue
            self._idle(w)
        w.idle = False

    # ---------------------------------------------------------- simulated

    def _switch(self, w: Worker | None) -> Worker | None:
        now = time.perf_counter_ns()
        prev = self._cur
        if prev is not None:
            prev.busy_ns += now - self._t_last
        self._t_last = now
        self._cur = w
        return prev

    def _run_sim(self, roots: list[Task]) -> None:
        self._t_last = time.perf_counter_ns()
        for i, t in enumerate(roots):
            w = self.workers[i % self.p]
            self._switch(w)
            self._execute(w, t)
            self._drain_sim(w, -1)
        self._switch(None)

    def _drain_sim(self, w: Worker, watermark: int) -> None:
        while self._has_local(w, watermark):
            self._start_next_sim(w, watermark)

    def _start_next_sim(self, w: Worker, watermark: int) -> None:
        """One task-start event on ``w``: maybe a random steal, then run or hand off."""
        if self.steal_prob and self.p > 1 and self._nesting < self.max_nesting:
            if self._rng.random() < self.steal_prob:
                busy = [x for x in self.workers if x.deque]
                if busy:
                    victim = self._rng.choice(busy)
                    thief = self._rng.choice([x for x in self.workers if x is not victim])
                    t = victim.deque.popleft()
                    self._run_stolen_sim(thief, t)
                    return
        if not self._has_local(w, watermark):
            return
        t = w.deque.pop()
        inj = self.injector
        if inj is not None and self._nesting < self.max_nesting:
            tid = inj.select(t, self.p)
            if tid is not None:
                self._run_stolen_sim(self.workers[tid], t)
                return
            if inj.before is not None and w.deque and inj.before(t):
                tid = inj.thief_for(w, self.p)
                if tid is not None:
                    self._run_stolen_sim(self.workers[tid], w.deque.popleft())
        self._execute(w, t)

    def _run_stolen_sim(self, thief: Worker, t: Task) -> None:
        self._nesting += 1
        prev = self._switch(thief)
        try:
            mark = self.mark()
            self._claim(thief, t)
            self._execute(thief, t)
            self._drain_sim(thief, mark)
        finally:
            self._switch(prev)
            self._nesting -= 1

    def _wait_sim(self, w: Worker, tasks: list[Task], watermark: int) -> None:
        i = 0
        while i < len(tasks):
            if tasks[i].done:
                i += 1
                continue
            if not self._has_local(w, watermark):
                raise RuntimeError("simulated wait found no runnable work for an unfinished child")
            self._start_next_sim(w, watermark)


def parallel_for(rt: Runtime, items: Iterable[Any], body: Callable[[Any, Worker], Any]) -> MetricsSnapshot:
    """Run ``body(item, worker)`` once per item with dynamic load balancing."""

    def fn(task, w):
        return body(task.args, w)

    return rt.run(rt.task(fn, item) for item in items)


def run_inline(rt: Runtime, w: Worker, fn, args, cos=None, slot=None) -> Any:
    """Execute a fresh depth-1 task on ``w`` without queueing it."""
    t = Task(fn, args, slot, 1, w, cos, next(rt._ids))
    rt._execute(w, t)
    return t.result


def parallel_for_units(rt: Runtime, g, cons, grain: str, run_unit: Callable[[Any, Worker], Any]) -> MetricsSnapshot:
    """Run ``run_unit(ctx, worker)`` for every start unit of ``g``.

    With ``grain="vertex"`` all start edges of one start vertex form a single
    scheduling item. Pruning masks are built inside the workers; units whose
    mask is empty are skipped.
    """
    from .pruning import build_context, group_units, start_units

    units = start_units(g, cons, grain)
    items = group_units(units) if grain == "vertex" and not cons.vertex_ordered else [[u] for u in units]

    def body(group, w):
        for unit in group:
            ctx = build_context(g, cons, unit)
            if ctx is not None:
                run_unit(ctx, w)

    return parallel_for(rt, items, body)


def parallel_for_edges(g, cons, body: Callable[[Any, Worker], Any], rt: Runtime | None = None) -> MetricsSnapshot:
    """Invoke ``body(ctx, worker)`` once per admissible start edge."""
    return parallel_for_units(rt or Runtime(), g, cons, "edge", body)
