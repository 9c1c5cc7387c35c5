"""Brute-force cycle oracle, independent of the package's search code.

Cycles are enumerated as vertex sequences starting at their smallest vertex,
then every choice of parallel edge is expanded and filtered against the
constraints. Output uses the same canonical form as ``canonical_set``.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product


def _rotations_ok(ts, strict):
    k = len(ts)
    for r in range(k):
        seq = ts[r:] + ts[:r]
        if all((a < b) if strict else (a <= b) for a, b in zip(seq, seq[1:])):
            return True
    return False


def brute_cycles(edges, mode="simple", window=None, hops=None, strict=True):
    """Canonical set of (src, dst, ts) tuples for every admissible cycle."""
    adj = defaultdict(lambda: defaultdict(list))
    verts = set()
    for u, v, t in edges:
        verts.update((u, v))
        if u != v:
            adj[u][v].append(t)
    out = set()

    def closed(path):
        ts_lists = [adj[path[i]][path[(i + 1) % len(path)]] for i in range(len(path))]
        for sel in product(*ts_lists):
            if window is not None and max(sel) - min(sel) > window:
                continue
            if mode == "temporal" and not _rotations_ok(list(sel), strict):
                continue
            out.add(tuple((path[i], path[(i + 1) % len(path)], sel[i]) for i in range(len(path))))

    def dfs(path, on):
        u = path[-1]
        for v in adj[u]:
            if v == path[0]:
                if mode != "hop" or len(path) <= hops:
                    closed(path)
            elif v > path[0] and v not in on:
                if mode == "hop" and len(path) >= hops:
                    continue
                on.add(v)
                path.append(v)
                dfs(path, on)
                path.pop()
                on.discard(v)

    for s in sorted(verts):
        dfs([s], {s})
    return frozenset(out)
