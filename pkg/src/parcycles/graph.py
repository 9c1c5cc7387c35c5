"""Immutable temporal multigraph with bundle-grouped adjacency.

Edges are ``(src, dst, ts)`` triples over dense integer vertex ids. Parallel
edges between the same pair of vertices are kept as one adjacency group
holding the sorted list of their timestamps.
"""

from __future__ import annotations

import io
import logging
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

Group = tuple[int, tuple[int, ...]]


class EdgeListParseError(ValueError):
    """Raised for a malformed edge-list line."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")
        self.lineno = lineno
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class TemporalEdge:
    src: int
    dst: int
    ts: int = 0


class TemporalGraph:
    """Directed temporal multigraph.

    ``out_adj[v]`` is a tuple of ``(neighbor, timestamps)`` groups sorted by
    neighbor id, ``timestamps`` sorted ascending. ``in_adj`` mirrors it for
    reverse traversal. ``id_map[dense] == original id``.
    """

    __slots__ = ("n", "n_edges", "out_adj", "in_adj", "id_map", "dropped_self_loops")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, int]],
        id_map: Sequence[int] | None = None,
        dropped_self_loops: int = 0,
    ):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        out: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(n)]
        inc: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(n)]
        count = 0
        for src, dst, ts in edges:
            if not (0 <= src < n and 0 <= dst < n):
                raise IndexError(f"edge ({src}, {dst}) out of range for n={n}")
            if src == dst:
                raise ValueError(f"self-loop on vertex {src}")
            out[src][dst].append(int(ts))
            inc[dst][src].append(int(ts))
            count += 1
        self.n = n
        self.n_edges = count
        self.out_adj: tuple[tuple[Group, ...], ...] = tuple(_freeze(d) for d in out)
        self.in_adj: tuple[tuple[Group, ...], ...] = tuple(_freeze(d) for d in inc)
        self.id_map = tuple(id_map) if id_map is not None else tuple(range(n))
        self.dropped_self_loops = dropped_self_loops

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], n: int | None = None) -> "TemporalGraph":
        """Build from ``(src, dst[, ts])`` rows that already use dense ids.

        Self-loops are dropped and counted, as on file ingestion.
        """
        rows = []
        dropped = 0
        hi = -1
        for e in edges:
            src, dst = int(e[0]), int(e[1])
            ts = int(e[2]) if len(e) > 2 else 0
            hi = max(hi, src, dst)
            if src == dst:
                dropped += 1
                continue
            rows.append((src, dst, ts))
        return cls(hi + 1 if n is None else n, rows, dropped_self_loops=dropped)

    def edges(self) -> Iterator[TemporalEdge]:
        """All edges in (src, dst, ts) order."""
        for u, groups in enumerate(self.out_adj):
            for w, tss in groups:
                for t in tss:
                    yield TemporalEdge(u, w, t)

    def edge_tuples(self) -> list[tuple[int, int, int]]:
        return [(e.src, e.dst, e.ts) for e in self.edges()]

    def timestamps(self, u: int, v: int) -> tuple[int, ...]:
        """Timestamps of the parallel edges u -> v (empty if none)."""
        groups = self.out_adj[u]
        keys = [w for w, _ in groups]
        i = bisect_left(keys, v)
        if i < len(groups) and groups[i][0] == v:
            return groups[i][1]
        return ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TemporalGraph):
            return NotImplemented
        return self.n == other.n and self.out_adj == other.out_adj

    def __repr__(self) -> str:
        return f"TemporalGraph(n={self.n}, e={self.n_edges})"


def _freeze(d: dict[int, list[int]]) -> tuple[Group, ...]:
    return tuple((w, tuple(sorted(d[w]))) for w in sorted(d))


@dataclass(frozen=True)
class WindowView:
    """Read-only time-window filter over a graph; never copies edges."""

    base: TemporalGraph
    lo: float = float("-inf")
    hi: float = float("inf")
    mask: frozenset[int] | None = field(default=None)

    def contains(self, e: TemporalEdge) -> bool:
        if not self.lo <= e.ts <= self.hi:
            return False
        return self.mask is None or (e.src in self.mask and e.dst in self.mask)

    def edges(self) -> Iterator[TemporalEdge]:
        for u in range(self.base.n):
            if self.mask is not None and u not in self.mask:
                continue
            for w, ts in neighbors(self.base, u, self):
                for t in ts:
                    yield TemporalEdge(u, w, t)


def window_slice(ts: tuple[int, ...], lo: float, hi: float) -> tuple[int, ...]:
    i = 0 if lo == float("-inf") else bisect_left(ts, lo)
    j = len(ts) if hi == float("inf") else bisect_right(ts, hi)
    return ts[i:j]


def neighbors(g: TemporalGraph, v: int, view: WindowView | None = None) -> list[Group]:
    """Out-neighbor groups of ``v`` in ascending id order.

    With a view, timestamps are restricted to the window and groups left
    empty (or whose neighbor is masked out) are skipped.
    """
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range for n={g.n}")
    if view is None:
        return list(g.out_adj[v])
    out = []
    for w, ts in g.out_adj[v]:
        if view.mask is not None and w not in view.mask:
            continue
        sub = window_slice(ts, view.lo, view.hi)
        if sub:
            out.append((w, sub))
    return out


def load_edge_list(
    source: IO[str] | IO[bytes] | str | bytes,
    untimed: bool = False,
) -> TemporalGraph:
    """Parse ``src dst ts`` lines into a graph with dense, sorted ids.

    ``#`` starts a comment line. With ``untimed`` the timestamp column is
    optional and defaults to 0. Self-loops are dropped and counted in
    ``dropped_self_loops``; repeated triples stay as distinct parallel edges.
    """
    if isinstance(source, bytes):
        source = source.decode()
    if isinstance(source, str):
        source = io.StringIO(source)
    raw: list[tuple[int, int, int]] = []
    seen: set[int] = set()
    dropped = 0
    for lineno, line in enumerate(source, 1):
        if isinstance(line, bytes):
            line = line.decode()
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) == 2 and untimed:
            parts.append("0")
        if len(parts) != 3:
            raise EdgeListParseError(lineno, line, f"expected 3 fields, got {len(parts)}")
        try:
            src, dst, ts = (int(p) for p in parts)
        except ValueError:
            raise EdgeListParseError(lineno, line, "non-integer token") from None
        seen.add(src)
        seen.add(dst)
        if src == dst:
            dropped += 1
            continue
        raw.append((src, dst, ts))
    if dropped:
        log.warning("dropped %d self-loop edge(s)", dropped)
    ids = sorted(seen)
    dense = {orig: i for i, orig in enumerate(ids)}
    edges = [(dense[s], dense[d], t) for s, d, t in raw]
    return TemporalGraph(len(ids), edges, id_map=ids, dropped_self_loops=dropped)


def write_edge_list(g: TemporalGraph, dest: IO[str], original_ids: bool = False) -> None:
    for e in g.edges():
        s, d = (g.id_map[e.src], g.id_map[e.dst]) if original_ids else (e.src, e.dst)
        dest.write(f"{s} {d} {e.ts}\n")


def dumps_edge_list(g: TemporalGraph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def write_id_map(g: TemporalGraph, dest: IO[str]) -> None:
    """One ``orig dense`` pair per line."""
    for dense, orig in enumerate(g.id_map):
        dest.write(f"{orig} {dense}\n")
