"""Fine-grained parallel Johnson: one task per recursive call.

A task that runs on the worker that created it shares that worker's search
state with its parent. A stolen task gets a private copy, rolled back to the
path prefix it was created under:

* recursive unblocking (default): pop every vertex at or beyond the task's
  depth and recursively unblock it;
* complete unblocking: drop every block tagged with a depth at or beyond
  the task's depth.

The temporal and hop-limited variants roll back by restoring each popped
vertex's pre-push closing time or barrier and unblocking from there. Their
complete variant carries no depth tags, so it keeps only the path prefix and
drops every closing time and barrier off that prefix.
"""

from __future__ import annotations

from .constrained import (
    HopState,
    TemporalState,
    barrier_unblock,
    closing_time_unblock,
    departed,
    hop_finish,
    hop_scan,
    temporal_finish,
    temporal_scan,
)
from .graph import TemporalGraph
from .metrics import MetricsSnapshot, Reporter, Sink
from .pruning import INF, Constraints
from .runtime import Runtime, StealInjector, parallel_for_units, run_inline
from .sequential import JohnsonState, johnson_finish, johnson_scan, recursive_unblock


# ------------------------------------------------------------ copy-on-steal


def fgj_copy_on_steal(d: int, victim: JohnsonState, lock=None, cnt=None) -> JohnsonState:
    """Copy ``victim`` under its lock, then pop and unblock while ``|path| >= d``."""
    with victim.lock:
        st = victim.copy(lock)
    while len(st.path) >= d:
        u = st.pop()
        recursive_unblock(u, st, cnt)
    return st


def fgj_copy_on_steal_complete(d: int, victim: JohnsonState, lock=None) -> JohnsonState:
    """Copy ``victim`` and drop every block made at depth ``d`` or deeper."""
    with victim.lock:
        st = victim.copy(lock)
    del st.path[d - 1 :]
    st.onpath = set(st.path)
    st.blk = {v: tag for v, tag in st.blk.items() if tag < d}
    return st


def cfgj_copy_on_steal(d: int, victim, ctx=None, lock=None, cnt=None):
    """Constrained copy-on-steal for temporal or hop-limited states.

    Pops while ``|path| >= d`` and unblocks each popped vertex to the
    closing time or barrier it had before it was pushed.
    """
    with victim.lock:
        st = victim.copy(lock)
    if isinstance(st, TemporalState):
        while len(st.path) >= d:
            u, prev = st.pop()
            closing_time_unblock(u, prev, st, cnt)
    else:
        while len(st.path) >= d:
            u, prev = st.pop()
            barrier_unblock(u, prev, st, ctx, cnt)
    return st


def cfgj_copy_on_steal_complete(d: int, victim, lock=None):
    """Constrained copy that keeps the first ``d - 1`` path vertices and nothing else."""
    with victim.lock:
        st = victim.copy(lock)
    del st.path[d - 1 :]
    del st.prev[d - 1 :]
    st.onpath = set(st.path)
    if isinstance(st, TemporalState):
        st.ct = {v: st.ct[v] for v in st.path if v in st.ct}
        st.waits = {}
    else:
        st.bar = {v: st.bar[v] for v in st.path}
    return st


# -------------------------------------------------------------------- tasks


def _make_fgj(rt: Runtime, cos: str):
    def steal(task, thief):
        if cos == "complete":
            return fgj_copy_on_steal_complete(task.depth, task.slot, thief.lock)
        return fgj_copy_on_steal(task.depth, task.slot, thief.lock, thief.counters)

    def fgj_task(task, w):
        ctx, v = task.args
        d = task.depth
        st = task.slot
        if st is None:
            st = task.slot = JohnsonState(w.lock)
        elif v in st.blk:
            return False
        cnt = w.counters
        with st.lock:
            st.push(v, d)
        if w.trace is not None:
            w.trace.append(("push", v))
        cnt.vertex_visits += 1
        found, cands = johnson_scan(ctx, st, v, w.rep, cnt)
        if cands:
            mark = rt.mark(w)
            kids = [rt.spawn(w, fgj_task, (ctx, u), st, d + 1, steal) for u in reversed(cands)]
            rt.wait(w, kids, mark)
            found = found or any(k.result for k in kids)
        if w.trace is not None:
            w.trace.append(("pop", v, found))
        with st.lock:
            johnson_finish(ctx, st, v, found, cnt, settle=True)
        return found

    return fgj_task, steal


def _make_temporal(rt: Runtime, strict: bool, cos: str = "recursive"):
    def steal(task, thief):
        if cos == "complete":
            return cfgj_copy_on_steal_complete(task.depth, task.slot, thief.lock)
        return cfgj_copy_on_steal(task.depth, task.slot, None, thief.lock, thief.counters)

    def task_fn(task, w):
        ctx, v, arrival = task.args
        d = task.depth
        st = task.slot
        if st is None:
            st = task.slot = TemporalState(strict, w.lock)
        elif v in st.onpath or arrival >= st.ct.get(v, INF):
            return -INF
        cnt = w.counters
        with st.lock:
            st.push(v, arrival)
        if w.trace is not None:
            w.trace.append(("push", v))
        cnt.vertex_visits += 1
        lastp, cands = temporal_scan(ctx, st, v, arrival, w.rep, cnt)
        if cands:
            mark = rt.mark(w)
            kids = [rt.spawn(w, task_fn, (ctx, u, t), st, d + 1, steal) for u, t, _ in reversed(cands)]
            rt.wait(w, kids, mark)
            for k, (_, _, ts) in zip(reversed(kids), cands):
                if k.result > -INF:
                    dep = departed(ts, k.result, strict)
                    if dep > lastp:
                        lastp = dep
        if w.trace is not None:
            w.trace.append(("pop", v, lastp > -INF))
        with st.lock:
            temporal_finish(ctx, st, v, lastp, cnt, settle=True)
        return lastp

    return task_fn, steal


def _make_hop(rt: Runtime, hops: int, cos: str = "recursive"):
    def steal(task, thief):
        if cos == "complete":
            return cfgj_copy_on_steal_complete(task.depth, task.slot, thief.lock)
        return cfgj_copy_on_steal(task.depth, task.slot, task.args[0], thief.lock, thief.counters)

    def task_fn(task, w):
        ctx, v = task.args
        d = task.depth
        depth = d - 1
        st = task.slot
        if st is None:
            st = task.slot = HopState(hops, w.lock)
        elif v in st.onpath or depth + st.bar.get(v, 0) >= hops:
            return INF
        cnt = w.counters
        with st.lock:
            st.push(v)
        if w.trace is not None:
            w.trace.append(("push", v))
        cnt.vertex_visits += 1
        dist, cands = hop_scan(ctx, st, v, depth, w.rep, cnt)
        if cands:
            mark = rt.mark(w)
            kids = [rt.spawn(w, task_fn, (ctx, u), st, d + 1, steal) for u in reversed(cands)]
            rt.wait(w, kids, mark)
            for k in kids:
                if k.result + 1 < dist:
                    dist = k.result + 1
        if w.trace is not None:
            w.trace.append(("pop", v, dist < INF))
        with st.lock:
            hop_finish(ctx, st, v, depth, dist, cnt, settle=True)
        return dist

    return task_fn, steal


# ------------------------------------------------------------------ drivers


def make_runtime(
    threads: int = 1,
    backend: str = "threads",
    seed: int | None = 0,
    steal_prob: float = 0.0,
    injector: StealInjector | None = None,
    trace: bool = False,
) -> Runtime:
    return Runtime(threads, backend, seed, steal_prob, injector, trace)


def attach_reporters(rt: Runtime, cons: Constraints, bundles: bool) -> None:
    for w in rt.workers:
        w.rep = Reporter(w.out.append, w.counters, cons.mode, cons.strict, bundles, w.trace)


def finish_run(rt: Runtime, snap: MetricsSnapshot, sink: Sink | None) -> MetricsSnapshot:
    if sink is not None:
        for b in rt.results():
            sink(b)
    return snap


def fgj_enumerate(
    g: TemporalGraph,
    constraints: Constraints,
    sink: Sink | None,
    cos: str = "recursive",
    runtime: Runtime | None = None,
    grain: str = "edge",
    bundles: bool = True,
    **rt_kw,
) -> MetricsSnapshot:
    """Fine-grained Johnson over every start unit; picks the variant by mode."""
    if cos not in ("recursive", "complete"):
        raise ValueError(f"unknown copy-on-steal variant {cos!r}")
    rt = runtime or make_runtime(**rt_kw)
    attach_reporters(rt, constraints, bundles)
    mode = constraints.mode
    if mode == "simple":
        fn, steal = _make_fgj(rt, cos)

        def run_unit(ctx, w):
            run_inline(rt, w, fn, (ctx, ctx.v0), steal)

    elif mode == "temporal":
        fn, steal = _make_temporal(rt, constraints.strict, cos)

        def run_unit(ctx, w):
            run_inline(rt, w, fn, (ctx, ctx.v0, -INF), steal)

    else:
        fn, steal = _make_hop(rt, constraints.hops, cos)

        def run_unit(ctx, w):
            run_inline(rt, w, fn, (ctx, ctx.v0), steal)

    snap = parallel_for_units(rt, g, constraints, grain, run_unit)
    return finish_run(rt, snap, sink)


def fg_temporal_enumerate(g: TemporalGraph, window: int | None, sink: Sink | None, strict: bool = True, prune: str = "cycle-union", **kw) -> MetricsSnapshot:
    return fgj_enumerate(g, Constraints("temporal", window, prune=prune, strict=strict), sink, **kw)


def fg_hop_enumerate(g: TemporalGraph, hops: int, window: int | None, sink: Sink | None, prune: str = "none", **kw) -> MetricsSnapshot:
    if hops is None or hops < 2:
        raise ValueError("hop limit must be >= 2")
    return fgj_enumerate(g, Constraints("hop", window, hops=hops, prune=prune), sink, **kw)
