"""Fine-grained parallel Read-Tarjan.

Every path extension becomes a task. Children are spawned so that the
continuation of the parent's extension runs first on the owning worker.
A stolen task copies its creator's state; the task body then rewinds the
copy to its own anchor and depth, so no separate unwind step is needed.
"""

from __future__ import annotations

from .constrained import TemporalRTState, temporal_rt_root, trt_task_body
from .fg_johnson import attach_reporters, finish_run, make_runtime
from .graph import TemporalGraph
from .metrics import MetricsSnapshot, Sink
from .pruning import Constraints
from .runtime import Runtime, parallel_for_units, run_inline
from .sequential import RTOptions, RTState, rt_dfs, rt_task_body


def fgrt_copy_on_steal(task, thief):
    """Snapshot the creator's state under its lock."""
    victim = task.slot
    with victim.lock:
        return victim.copy(thief.lock)


def _make_fgrt(rt: Runtime, opts: RTOptions, body):
    def fgrt_task(task, w):
        ctx, anchor, ext = task.args
        d = task.depth
        kids = body(ctx, task.slot, anchor, ext, d, opts, w.rep, w.counters, w.trace)
        if kids:
            mark = rt.mark(w)
            spawned = [rt.spawn(w, fgrt_task, (ctx, a, e), task.slot, d + 1, fgrt_copy_on_steal) for a, e in kids]
            rt.wait(w, spawned, mark)

    return fgrt_task


def fgrt_enumerate(
    g: TemporalGraph,
    constraints: Constraints,
    sink: Sink | None,
    opts: RTOptions = RTOptions(),
    runtime: Runtime | None = None,
    grain: str = "edge",
    bundles: bool = True,
    **rt_kw,
) -> MetricsSnapshot:
    """Fine-grained Read-Tarjan in simple or temporal mode."""
    mode = constraints.mode
    if mode not in ("simple", "temporal"):
        raise ValueError("Read-Tarjan supports simple and temporal modes only")
    rt = runtime or make_runtime(**rt_kw)
    attach_reporters(rt, constraints, bundles)

    if mode == "simple":
        fn = _make_fgrt(rt, opts, rt_task_body)

        def run_unit(ctx, w):
            v0 = ctx.v0
            for first, _ in ctx.adj(v0):
                st = RTState(w.lock)
                st.path.append(v0)
                w.counters.edge_visits += 1
                bd = (lambda x, st=st: st.block(x, 0)) if opts.blk_on_success else None
                ext = rt_dfs(ctx, first, st.blk, set(), w.counters, bd)
                if ext is not None:
                    run_inline(rt, w, fn, (ctx, 1, ext), fgrt_copy_on_steal, st)

    else:
        fn = _make_fgrt(rt, opts, trt_task_body)

        def run_unit(ctx, w):
            st = TemporalRTState(w.lock)
            ext = temporal_rt_root(ctx, st, opts, w.counters)
            if ext is not None:
                run_inline(rt, w, fn, (ctx, 1, ext), fgrt_copy_on_steal, st)

    snap = parallel_for_units(rt, g, constraints, grain, run_unit)
    return finish_run(rt, snap, sink)
