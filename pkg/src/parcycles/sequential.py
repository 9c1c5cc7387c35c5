"""Sequential cycle enumerators: Tiernan, Johnson and Read-Tarjan.

All enumerators run one search per start unit (see ``pruning.start_units``)
and report bundles through a ``Reporter``. Tiernan handles every mode and is
the reference the other enumerators are tested against.
"""

from __future__ import annotations

import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Callable

from ._deep import run_deep
from .graph import TemporalGraph
from .metrics import Reporter, Sink, VisitCounters
from .pruning import INF, Constraints, SearchContext, build_context, start_units

# Vertex sequence from a frontier neighbor back to the start vertex; the
# last element is always the start vertex.
PathExtension = list


@dataclass(frozen=True)
class RTOptions:
    """Read-Tarjan pruning switches.

    ``fwd_blk`` hands the blocked set to child explorations, ``fwd_ext``
    hands over the already-found path extension, and ``blk_on_success``
    blocks dead-end vertices met during a DFS that still succeeds.
    """

    fwd_blk: bool = True
    fwd_ext: bool = True
    blk_on_success: bool = True

    @classmethod
    def all_combinations(cls) -> list["RTOptions"]:
        return [cls(a, b, c) for a in (False, True) for b in (False, True) for c in (False, True)]


def next_ts(ts: tuple[int, ...], after: float, strict: bool = True):
    """Earliest timestamp usable after arriving at time ``after``."""
    i = bisect_right(ts, after) if strict else bisect_left(ts, after)
    return ts[i] if i < len(ts) else None


# ---------------------------------------------------------------- Tiernan


def tiernan_unit(ctx: SearchContext, rep: Reporter, cnt, trace=None) -> None:
    """Brute-force search over every admissible simple path from the unit."""
    cons = ctx.cons
    v0 = ctx.v0
    temporal = cons.mode == "temporal"
    strict = cons.strict
    hops = cons.hops if cons.mode == "hop" else None
    path = [v0]
    onpath = {v0}

    def rec(v, arrival):
        cnt.vertex_visits += 1
        if trace is not None:
            trace.append(("push", v))
        depth = len(path) - 1
        for w, ts in ctx.adj(v):
            cnt.edge_visits += 1
            t = None
            if temporal:
                t = next_ts(ts, arrival, strict)
                if t is None:
                    continue
            if w == v0:
                if hops is None or depth + 1 <= hops:
                    rep.report(ctx, path)
                continue
            if w in onpath or (hops is not None and depth + 2 > hops):
                continue
            path.append(w)
            onpath.add(w)
            rec(w, t)
            path.pop()
            onpath.discard(w)

    rec(v0, -INF)


# ---------------------------------------------------------------- Johnson


class JohnsonState:
    """Current path, blocked set and unblock lists of one Johnson search.

    ``blk`` maps each blocked vertex to the depth of the task that blocked
    it; ``blist[w]`` holds the vertices to unblock together with ``w``.
    """

    __slots__ = ("path", "onpath", "blk", "blist", "lock")

    def __init__(self, lock=None):
        self.path: list[int] = []
        self.onpath: set[int] = set()
        self.blk: dict[int, int] = {}
        self.blist: dict[int, set[int]] = {}
        self.lock = lock if lock is not None else threading.Lock()

    def push(self, v: int, depth: int) -> None:
        self.path.append(v)
        self.onpath.add(v)
        self.blk[v] = depth

    def pop(self) -> int:
        v = self.path.pop()
        self.onpath.discard(v)
        return v

    def copy(self, lock=None) -> "JohnsonState":
        out = JohnsonState(lock)
        out.path = list(self.path)
        out.onpath = set(self.onpath)
        out.blk = dict(self.blk)
        out.blist = {k: set(s) for k, s in self.blist.items() if s}
        return out

    def check(self) -> None:
        """Assert that every path vertex is blocked."""
        missing = [v for v in self.path if v not in self.blk]
        assert not missing, f"path vertices not blocked: {missing}"


def recursive_unblock(v: int, st: JohnsonState, cnt=None) -> None:
    """Unblock ``v`` and, transitively, everything waiting on it.

    Vertices currently on the path stay blocked; their lists are drained
    when they are unblocked themselves.
    """
    if v not in st.blk or v in st.onpath:
        return
    del st.blk[v]
    todo = [v]
    blk, blist, onpath = st.blk, st.blist, st.onpath
    while todo:
        x = todo.pop()
        if cnt is not None:
            cnt.unblock_calls += 1
        waiting = blist.pop(x, None)
        if waiting:
            for w in waiting:
                if w in blk and w not in onpath:
                    del blk[w]
                    todo.append(w)


def johnson_scan(ctx: SearchContext, st: JohnsonState, v: int, rep: Reporter, cnt) -> tuple[bool, list[int]]:
    """Report closing edges of ``v`` and collect its unblocked neighbors."""
    v0 = ctx.v0
    blk = st.blk
    found = False
    cands = []
    for w, _ in ctx.adj(v):
        cnt.edge_visits += 1
        if w == v0:
            rep.report(ctx, st.path)
            found = True
        elif w not in blk:
            cands.append(w)
    return found, cands


def johnson_finish(ctx: SearchContext, st: JohnsonState, v: int, found: bool, cnt, settle: bool = False) -> None:
    """Pop ``v``; unblock it on success, otherwise register it in Blists.

    With ``settle``, a failed ``v`` that still has an unblocked neighbor is
    unblocked instead: that neighbor's failure was established in another
    worker's state, so nothing here would ever unblock ``v`` again.
    """
    st.pop()
    v0 = ctx.v0
    if not found and settle:
        blk = st.blk
        found = any(w != v0 and w not in blk for w, _ in ctx.adj(v))
    if found:
        recursive_unblock(v, st, cnt)
    else:
        blist = st.blist
        for w, _ in ctx.adj(v):
            if w != v0:
                s = blist.get(w)
                if s is None:
                    blist[w] = {v}
                else:
                    s.add(v)


def johnson_unit(ctx: SearchContext, rep: Reporter, cnt, trace=None, state: JohnsonState | None = None) -> JohnsonState:
    """Johnson's search for one start unit (simple cycles)."""
    st = state if state is not None else JohnsonState()

    def visit(v, d):
        st.push(v, d)
        if trace is not None:
            trace.append(("push", v))
        cnt.vertex_visits += 1
        found, cands = johnson_scan(ctx, st, v, rep, cnt)
        for w in cands:
            if w in st.blk:
                continue
            if visit(w, d + 1):
                found = True
        if trace is not None:
            trace.append(("pop", v, found))
        johnson_finish(ctx, st, v, found, cnt)
        return found

    visit(ctx.v0, 1)
    return st


# ------------------------------------------------------------ Read-Tarjan


class RTState:
    """Path and depth-tagged blocked set of a Read-Tarjan search.

    ``log`` records blocked vertices in insertion order with their depth
    tag so a task can drop everything blocked at or below its own depth.
    """

    __slots__ = ("path", "blk", "log", "lock")

    def __init__(self, lock=None):
        self.path: list[int] = []
        self.blk: dict[int, int] = {}
        self.log: list[tuple[int, int]] = []
        self.lock = lock if lock is not None else threading.Lock()

    def block(self, v: int, depth: int) -> None:
        if v not in self.blk:
            self.blk[v] = depth
            self.log.append((v, depth))

    def push(self, v: int, depth: int) -> None:
        self.path.append(v)
        self.block(v, depth)

    def rewind(self, anchor: int, depth: int) -> None:
        """Truncate the path to ``anchor`` vertices and drop blocks tagged >= depth."""
        del self.path[anchor:]
        log, blk = self.log, self.blk
        while log and log[-1][1] >= depth:
            v, _ = log.pop()
            del blk[v]

    def reset_to_path(self) -> None:
        self.blk = {v: 0 for v in self.path[1:]}
        self.log = [(v, 0) for v in self.path[1:]]

    def copy(self, lock=None) -> "RTState":
        out = RTState(lock)
        out.path = list(self.path)
        out.blk = dict(self.blk)
        out.log = list(self.log)
        return out


def rt_dfs(ctx: SearchContext, u: int, blk, vis: set, cnt, block_dead: Callable[[int], None] | None = None):
    """Find a path extension from ``u`` back to the start vertex.

    Iterative DFS over unblocked, unvisited vertices in adjacency order.
    ``block_dead`` (if given) is called for vertices whose neighbors are all
    blocked, even when the search as a whole succeeds. Returns the extension
    or ``None``; on failure every vertex of ``vis`` is a dead end.
    """
    cnt.dfs_calls += 1
    v0 = ctx.v0
    if u == v0:
        return [v0]
    adj = ctx.adj
    vis.add(u)
    cnt.vertex_visits += 1
    xs = [u]
    nbs = [adj(u)]
    idx = [0]
    dead = [True]
    while xs:
        i = idx[-1]
        nb = nbs[-1]
        if i < len(nb):
            idx[-1] = i + 1
            w = nb[i][0]
            cnt.edge_visits += 1
            if w == v0:
                xs.append(v0)
                return xs
            if w not in blk:
                if w not in vis:
                    vis.add(w)
                    cnt.vertex_visits += 1
                    xs.append(w)
                    nbs.append(adj(w))
                    idx.append(0)
                    dead.append(True)
                    continue
                dead[-1] = False
        else:
            x = xs.pop()
            nbs.pop()
            idx.pop()
            if dead.pop() and block_dead is not None:
                block_dead(x)
            if xs and x not in blk:
                dead[-1] = False
    return None


def rt_task_body(ctx, st: RTState, anchor: int, ext: list, d: int, opts: RTOptions, rep: Reporter, cnt, trace=None):
    """One path-extension exploration.

    Returns the list of ``(anchor, extension)`` children to run at depth
    ``d + 1`` in spawn order; the continuation of ``ext`` (if any) is last.
    """
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

        def block_dead(x):
            with lock:
                st.block(x, d)

    if ext[-1] != v0:
        vis: set[int] = set()
        ext = rt_dfs(ctx, ext[0], st.blk, vis, cnt, block_dead)
        if ext is None:
            with lock:
                for x in vis:
                    st.block(x, d)
            return []
    children: list[tuple[int, list]] = []
    last = len(ext) - 1
    i = 0
    while i < last:
        x = ext[i]
        nxt = ext[i + 1]
        with lock:
            st.push(x, d)
        if trace is not None:
            trace.append(("push", x))
        cnt.vertex_visits += 1
        for u, _ in ctx.adj(x):
            cnt.edge_visits += 1
            if u == nxt or u in st.blk:
                continue
            vis = set()
            alt = rt_dfs(ctx, u, st.blk, vis, cnt, block_dead)
            if alt is not None:
                children.append(alt)
            else:
                with lock:
                    for y in vis:
                        st.block(y, d)
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


def read_tarjan_unit(ctx: SearchContext, rep: Reporter, cnt, opts: RTOptions = RTOptions(), trace=None) -> None:
    """Read-Tarjan search for one start unit, children run last-spawned first."""
    v0 = ctx.v0
    for first, _ in ctx.adj(v0):
        st = RTState()
        st.path.append(v0)
        cnt.edge_visits += 1
        vis: set[int] = set()
        bd = (lambda x: st.block(x, 0)) if opts.blk_on_success else None
        ext = rt_dfs(ctx, first, st.blk, vis, cnt, bd)
        if ext is None:
            continue

        def run(anchor, e, d):
            kids = rt_task_body(ctx, st, anchor, e, d, opts, rep, cnt, trace)
            for a, e2 in reversed(kids):
                run(a, e2, d + 1)

        run(1, ext, 1)


# ---------------------------------------------------------------- drivers


def drive(
    g: TemporalGraph,
    cons: Constraints,
    sink: Sink,
    body,
    grain: str = "edge",
    bundles: bool = True,
    counters=None,
    trace: list | None = None,
) -> VisitCounters:
    """Run ``body(ctx, rep, cnt, trace)`` for every start unit in order."""
    cnt = counters if counters is not None else VisitCounters()
    rep = Reporter(sink, cnt, cons.mode, cons.strict, bundles, trace)

    def loop():
        for unit in start_units(g, cons, grain):
            ctx = build_context(g, cons, unit)
            if ctx is not None:
                body(ctx, rep, cnt, trace)

    run_deep(loop)
    return cnt


def tiernan_enumerate(g: TemporalGraph, constraints: Constraints, sink: Sink, **kw) -> VisitCounters:
    return drive(g, constraints, sink, tiernan_unit, **kw)


def johnson_enumerate(g: TemporalGraph, constraints: Constraints, sink: Sink, **kw) -> VisitCounters:
    if constraints.mode != "simple":
        raise ValueError("johnson_enumerate handles simple mode; use the constrained enumerators")
    return drive(g, constraints, sink, lambda c, r, n, t: johnson_unit(c, r, n, t), **kw)


def read_tarjan_enumerate(
    g: TemporalGraph, constraints: Constraints, sink: Sink, opts: RTOptions = RTOptions(), **kw
) -> VisitCounters:
    if constraints.mode == "temporal":
        from .constrained import temporal_read_tarjan_unit

        return drive(g, constraints, sink, lambda c, r, n, t: temporal_read_tarjan_unit(c, r, n, opts, t), **kw)
    if constraints.mode != "simple":
        raise ValueError("Read-Tarjan supports simple and temporal modes only")
    return drive(g, constraints, sink, lambda c, r, n, t: read_tarjan_unit(c, r, n, opts, t), **kw)
