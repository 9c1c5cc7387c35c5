"""Constrained sequential enumerators.

Temporal Johnson replaces the blocked set with per-vertex closing times:
entering ``w`` over an edge with timestamp ``t`` is allowed only while
``t < ct[w]``, so one value per vertex blocks a suffix of its incoming
timestamps. Hop-limited Johnson uses barriers: ``bar[w]`` says the start
vertex cannot be reached from ``w`` within ``bar[w]`` hops, so ``w`` is
only entered at edge depth ``k`` when ``k + bar[w] < L``.

Both keep ``prev`` (the value each path vertex had before it was pushed)
so a stolen task can restore the state of its path prefix.
"""

from __future__ import annotations

import threading
from bisect import bisect_left, bisect_right
from collections import deque

from .graph import TemporalGraph
from .metrics import Reporter, Sink, VisitCounters
from .pruning import INF, Constraints, SearchContext
from .sequential import RTOptions, drive, next_ts

# ----------------------------------------------------------- closing times


class TemporalState:
    """Path, closing times and unblock registrations of a temporal search.

    ``ct`` holds only finite closing times (missing means +inf). ``waits[w]``
    lists ``(v, t)``: ``v`` failed to depart to ``w`` at time ``t`` because
    ``w`` was closed; raising ``ct[w]`` above ``t`` reopens ``v``.
    """

    __slots__ = ("path", "onpath", "ct", "prev", "waits", "strict", "lock")

    def __init__(self, strict: bool = True, lock=None):
        self.path: list[int] = []
        self.onpath: set[int] = set()
        self.ct: dict[int, float] = {}
        self.prev: list[float] = []
        self.waits: dict[int, list[tuple[int, int]]] = {}
        self.strict = strict
        self.lock = lock if lock is not None else threading.Lock()

    def push(self, v: int, arrival: float) -> None:
        self.prev.append(self.ct.get(v, INF))
        self.path.append(v)
        self.onpath.add(v)
        self.ct[v] = arrival

    def pop(self) -> tuple[int, float]:
        v = self.path.pop()
        self.onpath.discard(v)
        return v, self.prev.pop()

    def closing(self, t: float) -> float:
        """Closing time that still admits a departure at ``t``."""
        return t if self.strict else t + 1

    def copy(self, lock=None) -> "TemporalState":
        out = TemporalState(self.strict, lock)
        out.path = list(self.path)
        out.onpath = set(self.onpath)
        out.ct = dict(self.ct)
        out.prev = list(self.prev)
        out.waits = {k: list(v) for k, v in self.waits.items() if v}
        return out


def closing_time_unblock(v: int, new_ct: float, st: TemporalState, cnt=None) -> None:
    """Raise ``ct[v]`` to ``new_ct`` and reopen everything waiting on it.

    A registration ``(u, t)`` on ``x`` fires once ``ct[x]`` exceeds ``t``,
    raising ``ct[u]`` so that ``u`` may again depart at ``t``. Lowering is
    never done here and path vertices are left untouched.
    """
    ct, waits, onpath = st.ct, st.waits, st.onpath
    todo = [(v, new_ct)]
    while todo:
        x, T = todo.pop()
        if T <= ct.get(x, INF) or x in onpath:
            continue
        if T == INF:
            del ct[x]
        else:
            ct[x] = T
        if cnt is not None:
            cnt.unblock_calls += 1
        regs = waits.get(x)
        if not regs:
            continue
        best: dict[int, int] = {}
        keep = []
        for u, t in regs:
            if t < T:
                if t > best.get(u, -INF):
                    best[u] = t
            else:
                keep.append((u, t))
        if keep:
            waits[x] = keep
        else:
            del waits[x]
        for u, t in best.items():
            todo.append((u, st.closing(t)))


def temporal_scan(ctx: SearchContext, st: TemporalState, v: int, arrival: float, rep: Reporter, cnt):
    """Report closing edges of ``v`` and collect enterable neighbors.

    Returns ``(lastp, cands)`` where ``lastp`` is the latest successful
    departure so far and ``cands`` holds ``(w, t, ts)`` with ``t`` the
    earliest usable departure to ``w``.
    """
    v0 = ctx.v0
    strict = st.strict
    ct = st.ct
    lastp = -INF
    cands = []
    for w, ts in ctx.adj(v):
        cnt.edge_visits += 1
        last = ts[-1]
        if w == v0:
            if last > arrival or (not strict and last >= arrival):
                rep.report(ctx, st.path)
                if last > lastp:
                    lastp = last
            continue
        if w in st.onpath:
            continue
        t = next_ts(ts, arrival, strict)
        if t is not None and t < ct.get(w, INF):
            cands.append((w, t, ts))
    return lastp, cands


def departed(ts: tuple[int, ...], child_lastp: float, strict: bool) -> int:
    """Latest departure in ``ts`` that can still use the child's departure."""
    i = bisect_left(ts, child_lastp) if strict else bisect_right(ts, child_lastp)
    return ts[i - 1]


def temporal_finish(ctx: SearchContext, st: TemporalState, v: int, lastp: float, cnt, settle: bool = False) -> None:
    """Pop ``v``, raise its closing time on success and register blocked departures.

    With ``settle``, the closing time is also raised past every departure to
    a neighbor that is still open here, whose closing was decided in another
    worker's state and so can never reopen ``v``.
    """
    st.pop()
    if lastp > -INF:
        closing_time_unblock(v, st.closing(lastp), st, cnt)
    ct = st.ct
    v0 = ctx.v0
    if settle:
        hi = -INF
        for w, ts in ctx.adj(v):
            if w == v0 or w in st.onpath:
                continue
            i = bisect_left(ts, ct.get(w, INF))
            if i:
                hi = max(hi, st.closing(ts[i - 1]))
        if hi > ct.get(v, INF):
            closing_time_unblock(v, hi, st, cnt)
    cv = ct.get(v, INF)
    if cv == INF:
        return
    waits = st.waits
    for w, ts in ctx.adj(v):
        if w == v0:
            continue
        cw = ct.get(w, INF)
        if cw == INF:
            continue
        # departures closed by w that would let v accept later arrivals
        i = bisect_left(ts, cw)
        if i < len(ts):
            regs = waits.setdefault(w, [])
            for t in ts[i:]:
                if st.closing(t) > cv:
                    regs.append((v, t))


def temporal_johnson_unit(ctx: SearchContext, rep: Reporter, cnt, trace=None, state: TemporalState | None = None):
    """Temporal Johnson for one start edge."""
    st = state if state is not None else TemporalState(ctx.cons.strict)
    strict = st.strict

    def visit(v, arrival):
        st.push(v, arrival)
        if trace is not None:
            trace.append(("push", v))
        cnt.vertex_visits += 1
        lastp, cands = temporal_scan(ctx, st, v, arrival, rep, cnt)
        for w, t, ts in cands:
            if w in st.onpath or t >= st.ct.get(w, INF):
                continue
            lp = visit(w, t)
            if lp > -INF:
                dep = departed(ts, lp, strict)
                if dep > lastp:
                    lastp = dep
        if trace is not None:
            trace.append(("pop", v, lastp > -INF))
        temporal_finish(ctx, st, v, lastp, cnt)
        return lastp

    visit(ctx.v0, -INF)
    return st


# ---------------------------------------------------------------- barriers


class HopState:
    """Path and barriers of a hop-limited search (missing barrier = 0).

    A path vertex has its barrier raised to ``L`` while on the path; ``prev``
    keeps the value it had before.
    """

    __slots__ = ("path", "onpath", "bar", "prev", "hops", "lock")

    def __init__(self, hops: int, lock=None):
        self.path: list[int] = []
        self.onpath: set[int] = set()
        self.bar: dict[int, int] = {}
        self.prev: list[int] = []
        self.hops = hops
        self.lock = lock if lock is not None else threading.Lock()

    def push(self, v: int) -> None:
        self.prev.append(self.bar.get(v, 0))
        self.path.append(v)
        self.onpath.add(v)
        self.bar[v] = self.hops

    def pop(self) -> tuple[int, int]:
        v = self.path.pop()
        self.onpath.discard(v)
        return v, self.prev.pop()

    def copy(self, lock=None) -> "HopState":
        out = HopState(self.hops, lock)
        out.path = list(self.path)
        out.onpath = set(self.onpath)
        out.bar = dict(self.bar)
        out.prev = list(self.prev)
        return out


def barrier_unblock(v: int, new_bar: int, st: HopState, ctx: SearchContext, cnt=None) -> None:
    """Lower ``bar[v]`` to ``new_bar`` and relax every vertex that reaches ``v``.

    A vertex ``u`` reaching ``v`` in ``k`` hops ends with
    ``bar[u] <= bar[v] + k``; the reverse BFS stops where nothing improves.
    Path vertices are not lowered.
    """
    bar, onpath = st.bar, st.onpath
    cur = bar.get(v, 0)
    if new_bar >= cur:
        return
    if new_bar:
        bar[v] = new_bar
    else:
        bar.pop(v, None)
    q = deque([v])
    while q:
        x = q.popleft()
        if cnt is not None:
            cnt.unblock_calls += 1
        nb = bar.get(x, 0) + 1
        for u in ctx.radj(x):
            if u in onpath:
                continue
            if nb < bar.get(u, 0):
                bar[u] = nb
                q.append(u)


def hop_scan(ctx: SearchContext, st: HopState, v: int, depth: int, rep: Reporter, cnt):
    """Report closing edges of ``v`` (at edge depth ``depth``) and collect enterable neighbors."""
    v0 = ctx.v0
    lim = st.hops - depth - 1
    bar = st.bar
    dist = INF
    cands = []
    for w, _ in ctx.adj(v):
        cnt.edge_visits += 1
        if w == v0:
            rep.report(ctx, st.path)
            dist = 1
        elif w not in st.onpath and bar.get(w, 0) < lim:
            cands.append(w)
    return dist, cands


def hop_finish(ctx: SearchContext, st: HopState, v: int, depth: int, dist: float, cnt, settle: bool = False) -> None:
    """Pop ``v``; on success relax barriers, otherwise raise its own.

    With ``settle``, the barrier is then capped at one more than the lowest
    barrier among neighbors off the path, since a neighbor explored in
    another worker's state keeps a stale low barrier here and would never
    relax ``v``.
    """
    _, prev = st.pop()
    if dist < INF:
        barrier_unblock(v, int(dist) - 1, st, ctx, cnt)
    else:
        st.bar[v] = max(prev, st.hops - depth)
    if settle:
        bar, v0 = st.bar, ctx.v0
        lo = min((bar.get(w, 0) + 1 for w, _ in ctx.adj(v) if w != v0 and w not in st.onpath), default=INF)
        if lo < bar.get(v, 0):
            barrier_unblock(v, lo, st, ctx, cnt)


def hop_johnson_unit(ctx: SearchContext, rep: Reporter, cnt, trace=None, state: HopState | None = None):
    """Hop-limited Johnson for one start unit."""
    st = state if state is not None else HopState(ctx.cons.hops)
    L = st.hops

    def visit(v, depth):
        st.push(v)
        if trace is not None:
            trace.append(("push", v))
        cnt.vertex_visits += 1
        dist, cands = hop_scan(ctx, st, v, depth, rep, cnt)
        lim = L - depth - 1
        for w in cands:
            if w in st.onpath or st.bar.get(w, 0) >= lim:
                continue
            f = visit(w, depth + 1)
            if f + 1 < dist:
                dist = f + 1
        if trace is not None:
            trace.append(("pop", v, dist < INF))
        hop_finish(ctx, st, v, depth, dist, cnt)
        return dist

    visit(ctx.v0, 0)
    return st


# ------------------------------------------------------ temporal Read-Tarjan


class TemporalRTState:
    """Path with arrival times and depth-tagged closing times.

    ``log`` keeps ``(v, previous ct, depth)`` so closing times set at or
    below a depth can be rolled back.
    """

    __slots__ = ("path", "arr", "ct", "log", "lock")

    def __init__(self, lock=None):
        self.path: list[int] = []
        self.arr: list[float] = []
        self.ct: dict[int, float] = {}
        self.log: list[tuple[int, float, int]] = []
        self.lock = lock if lock is not None else threading.Lock()

    def block(self, v: int, t: float, depth: int) -> None:
        old = self.ct.get(v, INF)
        if t < old:
            self.log.append((v, old, depth))
            self.ct[v] = t

    def push(self, v: int, arrival: float, depth: int) -> None:
        self.path.append(v)
        self.arr.append(arrival)
        self.block(v, -INF, depth)

    def rewind(self, anchor: int, depth: int) -> None:
        del self.path[anchor:]
        del self.arr[anchor:]
        log, ct = self.log, self.ct
        while log and log[-1][2] >= depth:
            v, old, _ = log.pop()
            if old == INF:
                del ct[v]
            else:
                ct[v] = old

    def reset_to_path(self) -> None:
        self.ct = {v: -INF for v in self.path[1:]}
        self.log = [(v, INF, 0) for v in self.path[1:]]

    def copy(self, lock=None) -> "TemporalRTState":
        out = TemporalRTState(lock)
        out.path = list(self.path)
        out.arr = list(self.arr)
        out.ct = dict(self.ct)
        out.log = list(self.log)
        return out


def trt_dfs(ctx: SearchContext, u: int, arrival: float, ct, vis: dict, cnt, strict: bool = True, block_dead=None):
    """Time-respecting DFS for a path extension from ``u`` entered at ``arrival``.

    ``vis`` keeps the earliest arrival per visited vertex; a vertex is
    revisited only with a strictly earlier arrival. ``block_dead(x, t)`` is
    called for vertices with no open departure after arriving at ``t``.
    """
    cnt.dfs_calls += 1
    v0 = ctx.v0
    if u == v0:
        return [v0]
    adj = ctx.adj
    vis[u] = arrival
    cnt.vertex_visits += 1
    xs = [u]
    at = [arrival]
    nbs = [adj(u)]
    idx = [0]
    dead = [True]
    while xs:
        i = idx[-1]
        nb = nbs[-1]
        if i < len(nb):
            idx[-1] = i + 1
            w, ts = nb[i]
            cnt.edge_visits += 1
            t = next_ts(ts, at[-1], strict)
            if t is None:
                continue
            if w == v0:
                xs.append(v0)
                return xs
            if t < ct.get(w, INF):
                if t < vis.get(w, INF):
                    vis[w] = t
                    cnt.vertex_visits += 1
                    xs.append(w)
                    at.append(t)
                    nbs.append(adj(w))
                    idx.append(0)
                    dead.append(True)
                    continue
                dead[-1] = False
        else:
            x = xs.pop()
            a = at.pop()
            nbs.pop()
            idx.pop()
            if dead.pop() and block_dead is not None:
                block_dead(x, a)
            if xs and a < ct.get(x, INF):
                dead[-1] = False
    return None


def trt_task_body(ctx, st: TemporalRTState, anchor: int, ext: list, d: int, opts: RTOptions, rep, cnt, trace=None):
    """Temporal path-extension exploration; mirrors ``rt_task_body``."""
    strict = ctx.cons.strict
    lock = st.lock
    with lock:
        st.rewind(anchor, d)
        if not opts.fwd_blk:
            st.reset_to_path()
    if trace is not None:
        trace.append(("task", d, anchor, ext[0]))
    v0 = ctx.v0
    block_dead = None
    if opts.blk_on_success:

        def block_dead(x, t):
            with lock:
                st.block(x, t, d)

    def block_all(vis):
        with lock:
            for y, t in vis.items():
                st.block(y, t, d)

    def arrival_at(x):
        ts = ctx.hop_ts(st.path[-1], x)
        return next_ts(ts, st.arr[-1], strict)

    if ext[-1] != v0:
        vis: dict[int, float] = {}
        ext = trt_dfs(ctx, ext[0], arrival_at(ext[0]), st.ct, vis, cnt, strict, block_dead)
        if ext is None:
            block_all(vis)
            return []
    children = []
    last = len(ext) - 1
    i = 0
    while i < last:
        x = ext[i]
        nxt = ext[i + 1]
        a = arrival_at(x)
        with lock:
            st.push(x, a, d)
        if trace is not None:
            trace.append(("push", x))
        cnt.vertex_visits += 1
        for u, ts in ctx.adj(x):
            cnt.edge_visits += 1
            if u == nxt:
                continue
            t = next_ts(ts, a, strict)
            if t is None or t >= st.ct.get(u, INF):
                continue
            vis = {}
            alt = trt_dfs(ctx, u, t, st.ct, vis, cnt, strict, block_dead)
            if alt is not None:
                children.append(alt)
            else:
                block_all(vis)
        i += 1
        if children:
            break
    if i == last:
        rep.report(ctx, st.path)
    anchor = len(st.path)
    out = [(anchor, alt if opts.fwd_ext else alt[:1]) for alt in children]
    if i < last:
        rest = ext[i:]
        out.append((anchor, rest if opts.fwd_ext else rest[:1]))
    return out


def temporal_rt_root(ctx: SearchContext, st: TemporalRTState, opts: RTOptions, cnt):
    """Initial extension search from the start edge; ``None`` if there is none."""
    v0 = ctx.v0
    first = ctx.unit.first
    st.path.append(v0)
    st.arr.append(-INF)
    cnt.edge_visits += 1
    bd = (lambda x, t: st.block(x, t, 0)) if opts.blk_on_success else None
    return trt_dfs(ctx, first, ctx.t0, st.ct, {}, cnt, ctx.cons.strict, bd)


def temporal_read_tarjan_unit(ctx: SearchContext, rep: Reporter, cnt, opts: RTOptions = RTOptions(), trace=None):
    """Temporal Read-Tarjan for one start edge."""
    st = TemporalRTState()
    ext = temporal_rt_root(ctx, st, opts, cnt)
    if ext is None:
        return

    def run(anchor, e, d):
        kids = trt_task_body(ctx, st, anchor, e, d, opts, rep, cnt, trace)
        for a, e2 in reversed(kids):
            run(a, e2, d + 1)

    run(1, ext, 1)


# ---------------------------------------------------------------- drivers


def temporal_johnson_enumerate(g: TemporalGraph, window: int | None, sink: Sink, strict: bool = True, prune: str = "cycle-union", **kw) -> VisitCounters:
    cons = Constraints("temporal", window, prune=prune, strict=strict)
    return drive(g, cons, sink, lambda c, r, n, t: temporal_johnson_unit(c, r, n, t), **kw)


def hop_johnson_enumerate(g: TemporalGraph, hops: int, window: int | None, sink: Sink, prune: str = "none", **kw) -> VisitCounters:
    if hops is None or hops < 2:
        raise ValueError("hop limit must be >= 2")
    cons = Constraints("hop", window, hops=hops, prune=prune)
    return drive(g, cons, sink, lambda c, r, n, t: hop_johnson_unit(c, r, n, t), **kw)


def temporal_read_tarjan_enumerate(
    g: TemporalGraph, window: int | None, sink: Sink, opts: RTOptions = RTOptions(), strict: bool = True, prune: str = "none", **kw
) -> VisitCounters:
    cons = Constraints("temporal", window, prune=prune, strict=strict)
    return drive(g, cons, sink, lambda c, r, n, t: temporal_read_tarjan_unit(c, r, n, opts, t), **kw)
