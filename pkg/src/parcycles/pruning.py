"""Time-window semantics, per-start-edge pruning masks and cycle bundles.

Every search is rooted at a *start unit*. Without a time window, simple and
hop-constrained searches use Johnson's vertex ordering: a cycle is reported
from its smallest vertex and only larger vertices are entered. With a window
(and always in temporal mode) cycles are partitioned by start edge: the
earliest edge of the cycle, ties broken towards the larger source id, so each
cycle is owned by exactly one start edge.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Literal, Sequence

from .graph import Group, TemporalEdge, TemporalGraph, WindowView

INF = float("inf")

Mode = Literal["simple", "temporal", "hop"]
Prune = Literal["none", "scc", "cycle-union"]


@dataclass(frozen=True)
class WindowConstraint:
    delta: int

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("window size must be >= 0")


@dataclass(frozen=True)
class Constraints:
    """What counts as a reportable cycle.

    ``window=None`` means unbounded. ``hops`` is required in hop mode.
    ``strict`` selects strictly increasing timestamps in temporal mode.
    """

    mode: Mode = "simple"
    window: int | None = None
    hops: int | None = None
    prune: Prune = "none"
    strict: bool = True

    def __post_init__(self):
        if self.mode not in ("simple", "temporal", "hop"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "hop":
            if self.hops is None or self.hops < 2:
                raise ValueError("hop mode needs hops >= 2")
        if self.window is not None and self.window < 0:
            raise ValueError("window must be >= 0")
        if self.prune not in ("none", "scc", "cycle-union"):
            raise ValueError(f"unknown prune {self.prune!r}")
        if self.prune == "cycle-union" and self.mode != "temporal":
            raise ValueError("cycle-union pruning requires temporal mode")

    @property
    def vertex_ordered(self) -> bool:
        return self.window is None and self.mode != "temporal"


@dataclass(frozen=True)
class StartUnit:
    """Root of one search: a start vertex, optionally a fixed first hop.

    ``t0`` is set for edge-partitioned searches and is the timestamp of the
    start edge ``v0 -> first``.
    """

    v0: int
    first: int | None = None
    t0: int | None = None

    @property
    def edge(self) -> TemporalEdge | None:
        if self.first is None or self.t0 is None:
            return None
        return TemporalEdge(self.v0, self.first, self.t0)


def start_units(g: TemporalGraph, cons: Constraints, grain: str = "edge") -> list[StartUnit]:
    """Start units in deterministic order."""
    units = []
    if cons.vertex_ordered:
        for v0 in range(g.n):
            nbrs = [w for w, _ in g.out_adj[v0] if w > v0]
            if not nbrs:
                continue
            if grain == "vertex":
                units.append(StartUnit(v0))
            else:
                units.extend(StartUnit(v0, w) for w in nbrs)
    else:
        for v0 in range(g.n):
            for w, ts in g.out_adj[v0]:
                units.extend(StartUnit(v0, w, t) for t in ts)
    return units


def group_units(units: Sequence[StartUnit]) -> list[list[StartUnit]]:
    """Group consecutive units by start vertex (vertex grain over edges)."""
    out: list[list[StartUnit]] = []
    for u in units:
        if out and out[-1][0].v0 == u.v0:
            out[-1].append(u)
        else:
            out.append([u])
    return out


def window_of(start_edge: TemporalEdge, w: WindowConstraint | None) -> WindowView:
    """Window ``[ts, ts + delta]`` anchored at a start edge, as a view."""
    return WindowView(None, start_edge.ts, INF if w is None else start_edge.ts + w.delta)


def same_ts_admissible(candidate: TemporalEdge, start_edge: TemporalEdge) -> bool:
    """Tie-break for edges sharing the start edge's timestamp.

    Assumes ``candidate.ts >= start_edge.ts``.
    """
    if candidate == start_edge or candidate.ts > start_edge.ts:
        return True
    return candidate.ts == start_edge.ts and candidate.src < start_edge.src


class SearchContext:
    """Admissible adjacency for one start unit.

    ``adj(v)`` yields ``(w, timestamps)`` groups restricted to the window,
    the same-timestamp tie-break, the vertex ordering (if any) and the
    pruning mask. The closing group ``w == v0`` comes first, then ascending
    neighbor ids. Results are cached per vertex.
    """

    __slots__ = ("g", "cons", "unit", "v0", "t0", "lo", "hi", "min_id", "mask", "_cache", "_ts", "_rev", "_loose")

    def __init__(self, g: TemporalGraph, cons: Constraints, unit: StartUnit, mask: frozenset[int] | None = None):
        self.g = g
        self.cons = cons
        self.unit = unit
        self.v0 = unit.v0
        self.t0 = unit.t0
        if cons.vertex_ordered:
            self.lo, self.hi = -INF, INF
            self.min_id = unit.v0
        else:
            self.lo = unit.t0
            self.hi = INF if cons.window is None else unit.t0 + cons.window
            self.min_id = None
        self.mask = mask
        # nondecreasing temporal order needs no tie-break after the start edge
        self._loose = cons.mode == "temporal" and not cons.strict
        self._cache: dict[int, list[Group]] = {}
        self._ts: dict[int, dict[int, tuple[int, ...]]] = {}
        self._rev: dict[int, list[int]] = {}

    def adj(self, v: int) -> list[Group]:
        got = self._cache.get(v)
        if got is not None:
            return got
        v0 = self.v0
        out: list[Group] = []
        closing = None
        if v == v0:
            first = self.unit.first
            if self.t0 is not None:
                out = [(first, (self.t0,))]
            else:
                for w, ts in self.g.out_adj[v]:
                    if w > v0 and (first is None or w == first) and self._masked_in(w):
                        out.append((w, ts))
            self._cache[v] = out
            return out
        lo, hi, t0, min_id = self.lo, self.hi, self.t0, self.min_id
        loose = self._loose
        for w, ts in self.g.out_adj[v]:
            if w != v0:
                if min_id is not None and w < min_id:
                    continue
                if not self._masked_in(w):
                    continue
            if t0 is not None:
                i = bisect_left(ts, lo) if loose or v < v0 else bisect_right(ts, t0)
                j = len(ts) if hi == INF else bisect_right(ts, hi)
                if i >= j:
                    continue
                if i or j < len(ts):
                    ts = ts[i:j]
            if w == v0:
                closing = (w, ts)
            else:
                out.append((w, ts))
        if closing is not None:
            out.insert(0, closing)
        self._cache[v] = out
        return out

    def _masked_in(self, w: int) -> bool:
        return self.mask is None or w in self.mask

    def hop_ts(self, u: int, w: int) -> tuple[int, ...]:
        if u == self.v0 and self.t0 is not None:
            return (self.t0,)
        d = self._ts.get(u)
        if d is None:
            d = self._ts[u] = dict(self.adj(u))
        return d[w]

    def radj(self, w: int) -> list[int]:
        """Vertices ``u != v0`` with an admissible edge ``u -> w``."""
        got = self._rev.get(w)
        if got is not None:
            return got
        out = []
        for u, _ in self.g.in_adj[w]:
            if u == self.v0 or (self.min_id is not None and u < self.min_id) or not self._masked_in(u):
                continue
            d = self._ts.get(u)
            if d is None:
                d = self._ts[u] = dict(self.adj(u))
            if w in d:
                out.append(u)
        self._rev[w] = out
        return out

    def bundle(self, path: Sequence[int]) -> "CycleBundle":
        """Bundle for the closed vertex sequence ``path`` (v0 first)."""
        hops = []
        k = len(path)
        for i in range(k):
            hops.append(self.hop_ts(path[i], path[(i + 1) % k]))
        if self._loose and self.t0 is not None and min(path) < self.v0:
            # a cycle flat at t0 belongs to the start edge leaving its smallest vertex
            last = hops[-1]
            hops[-1] = last[bisect_right(last, self.t0) :]
        return CycleBundle(tuple(path), tuple(hops), self.t0)

    def admissible_edges(self) -> Iterator[tuple[int, int, tuple[int, ...]]]:
        """Every admissible group as ``(u, w, ts)``; used for masks."""
        for u in range(self.g.n):
            if self.min_id is not None and u < self.min_id:
                continue
            if u != self.v0 and not self._masked_in(u):
                continue
            for w, ts in self.adj(u):
                yield u, w, ts


def build_context(g: TemporalGraph, cons: Constraints, unit: StartUnit) -> SearchContext | None:
    """Context for a unit with the configured mask; ``None`` means skip it."""
    if cons.prune == "none":
        return SearchContext(g, cons, unit)
    if cons.prune == "scc":
        mask = _scc_mask(g, cons, unit)
    else:
        mask = _cycle_union_mask(g, cons, unit)
    if not mask:
        return None
    return SearchContext(g, cons, unit, mask)


def _reach(ctx: SearchContext, sources: Iterable[int], forward: bool) -> set[int]:
    seen = set(sources)
    todo = deque(seen)
    v0 = ctx.v0
    if forward:
        while todo:
            u = todo.popleft()
            if u == v0:
                continue
            for w, _ in ctx.adj(u):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen
    # backward: walk in-edges but keep only those admissible from the source side
    g = ctx.g
    while todo:
        w = todo.popleft()
        for u, _ in g.in_adj[w]:
            if u in seen or u == v0:
                continue
            if ctx.min_id is not None and u < ctx.min_id:
                continue
            if any(x == w for x, _ in ctx.adj(u)):
                seen.add(u)
                todo.append(u)
    return seen


def _scc_mask(g: TemporalGraph, cons: Constraints, unit: StartUnit) -> frozenset[int]:
    ctx = SearchContext(g, cons, unit)
    v0 = unit.v0
    roots = [w for w, _ in ctx.adj(v0)]
    fwd = _reach(ctx, roots, forward=True)
    if v0 not in fwd:
        return frozenset()
    bwd = _reach(ctx, [v0], forward=False)
    both = (fwd & bwd) | {v0}
    if not any(w in both for w in roots):
        return frozenset()
    return frozenset(both)


def scc_of_edge(g: TemporalGraph, start_edge: TemporalEdge, w: WindowConstraint | None) -> frozenset[int]:
    """Vertices strongly connected with the start edge inside its window.

    Empty when no cycle can start with this edge.
    """
    cons = Constraints("simple", None if w is None else w.delta)
    if cons.vertex_ordered:
        cons = Constraints("simple", 2**62)
    return _scc_mask(g, cons, StartUnit(start_edge.src, start_edge.dst, start_edge.ts))


def _cycle_union_mask(g: TemporalGraph, cons: Constraints, unit: StartUnit) -> frozenset[int]:
    ctx = SearchContext(g, cons, unit)
    v0, v, t0 = unit.v0, unit.first, unit.t0
    strict = cons.strict
    # earliest arrival along time-respecting paths that start with the start edge
    arrive = {v: t0}
    todo = deque([v])
    while todo:
        u = todo.popleft()
        a = arrive[u]
        for w, ts in ctx.adj(u):
            i = bisect_right(ts, a) if strict else bisect_left(ts, a)
            if i == len(ts):
                continue
            t = ts[i]
            if w == v0:
                continue
            if t < arrive.get(w, INF):
                arrive[w] = t
                todo.append(w)
    # latest departure along time-respecting paths that end in v0
    depart: dict[int, float] = {}
    todo = deque()
    for u, _ in g.in_adj[v0]:
        for w, ts in ctx.adj(u) if u in arrive else ():
            if w == v0:
                depart[u] = ts[-1]
                todo.append(u)
    while todo:
        w = todo.popleft()
        d = depart[w]
        for u, _ in g.in_adj[w]:
            if u == v0 or u not in arrive:
                continue
            for x, ts in ctx.adj(u):
                if x != w:
                    continue
                i = (bisect_left(ts, d) if strict else bisect_right(ts, d)) - 1
                if i >= 0 and ts[i] > depart.get(u, -INF):
                    depart[u] = ts[i]
                    todo.append(u)
    keep = {u for u, a in arrive.items() if u in depart and (a < depart[u] if strict else a <= depart[u])}
    if v not in keep:
        return frozenset()
    return frozenset(keep | {v0})


def cycle_union_of_edge(
    g: TemporalGraph, start_edge: TemporalEdge, w: WindowConstraint | None, strict: bool = True
) -> frozenset[int]:
    """Vertices on some temporal cycle that starts with ``start_edge``.

    Computed as reachable-forward-in-time from the edge intersected with
    can-still-return-to-the-source, comparing earliest arrival with latest
    departure. Empty means the edge starts no temporal cycle.
    """
    cons = Constraints("temporal", None if w is None else w.delta, strict=strict)
    return _cycle_union_mask(g, cons, StartUnit(start_edge.src, start_edge.dst, start_edge.ts))


def strong_components(g: TemporalGraph) -> list[int]:
    """Component label per vertex (iterative Tarjan)."""
    n = g.n
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    onstack = [False] * n
    stack: list[int] = []
    counter = 0
    label = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        while work:
            v, i = work[-1]
            nb = g.out_adj[v]
            if i < len(nb):
                work[-1] = (v, i + 1)
                w = nb[i][0]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, 0))
                elif onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    x = stack.pop()
                    onstack[x] = False
                    comp[x] = label
                    if x == v:
                        break
                label += 1
    return comp


def trim_acyclic(g: TemporalGraph) -> TemporalGraph:
    """Same graph without the edges that join different strong components.

    Such edges lie on no cycle in any mode, so every enumeration result is
    unchanged while vertices outside the cyclic core lose their start units.
    """
    comp = strong_components(g)
    edges = [(u, w, t) for u, w, t in g.edge_tuples() if comp[u] == comp[w]]
    return TemporalGraph(g.n, edges, g.id_map, g.dropped_self_loops)


@dataclass(frozen=True)
class CycleBundle:
    """Cycles sharing one vertex sequence.

    ``hop_timestamps[i]`` lists the admissible timestamps of the edge from
    ``vertex_seq[i]`` to the next vertex (wrapping to the first).
    """

    vertex_seq: tuple[int, ...]
    hop_timestamps: tuple[tuple[int, ...], ...]
    start_ts: int | None = None

    def __len__(self) -> int:
        return len(self.vertex_seq)


def bundle_count(b: CycleBundle, mode: str = "simple", strict: bool = True) -> int:
    """Number of cycles in a bundle.

    Temporal mode counts timestamp selections increasing along the sequence,
    with a DP over hops: ``ways[t]`` is the number of valid prefixes whose
    last chosen timestamp is ``t``.
    """
    if mode != "temporal":
        total = 1
        for ts in b.hop_timestamps:
            total *= len(ts)
        return total
    prev_ts: tuple[int, ...] = b.hop_timestamps[0]
    ways = [1] * len(prev_ts)
    for ts in b.hop_timestamps[1:]:
        # prefix sums over the previous hop
        acc = [0]
        for w in ways:
            acc.append(acc[-1] + w)
        new = []
        for t in ts:
            k = bisect_left(prev_ts, t) if strict else bisect_right(prev_ts, t)
            new.append(acc[k])
        prev_ts, ways = ts, new
    return sum(ways)


def bundle_expand(b: CycleBundle, mode: str = "simple", strict: bool = True) -> Iterator[tuple[int, ...]]:
    """Yield the per-hop timestamp assignment of every cycle in the bundle."""
    if mode != "temporal":
        yield from product(*b.hop_timestamps)
        return
    hops = b.hop_timestamps
    chosen: list[int] = []

    def rec(i: int, last: float) -> Iterator[tuple[int, ...]]:
        if i == len(hops):
            yield tuple(chosen)
            return
        ts = hops[i]
        k = bisect_right(ts, last) if strict else bisect_left(ts, last)
        for t in ts[k:]:
            chosen.append(t)
            yield from rec(i + 1, t)
            chosen.pop()

    yield from rec(0, -INF)


def singleton_bundles(b: CycleBundle, mode: str = "simple", strict: bool = True) -> Iterator[CycleBundle]:
    """Expand a bundle into one-cycle bundles."""
    for sel in bundle_expand(b, mode, strict):
        yield CycleBundle(b.vertex_seq, tuple((t,) for t in sel), b.start_ts)


def canonical_cycle(vertex_seq: Sequence[int], ts: Sequence[int] | None = None) -> tuple:
    """Rotation-normalised cycle: smallest vertex first.

    With ``ts`` the result is a tuple of ``(src, dst, ts)`` edges, otherwise a
    tuple of vertices.
    """
    k = len(vertex_seq)
    r = min(range(k), key=vertex_seq.__getitem__)
    if ts is None:
        return tuple(vertex_seq[(r + i) % k] for i in range(k))
    return tuple(
        (vertex_seq[(r + i) % k], vertex_seq[(r + i + 1) % k], ts[(r + i) % k]) for i in range(k)
    )


def canonical_set(bundles: Iterable[CycleBundle], mode: str = "simple", strict: bool = True) -> frozenset:
    """All individual cycles of the bundles, canonicalised."""
    out = set()
    for b in bundles:
        for sel in bundle_expand(b, mode, strict):
            out.add(canonical_cycle(b.vertex_seq, sel))
    return frozenset(out)


def canonical_bundles(bundles: Iterable[CycleBundle]) -> frozenset:
    return frozenset((canonical_cycle(b.vertex_seq), b.start_ts) for b in bundles)
