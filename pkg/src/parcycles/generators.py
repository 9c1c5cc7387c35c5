"""Graph families used for tests, benchmarks and worst-case demonstrations."""

from __future__ import annotations

import numpy as np

from .graph import TemporalGraph


class ParameterError(ValueError):
    pass


def exp_cycles(n: int, ts: int = 0) -> TemporalGraph:
    """Graph with exactly ``2**(n-2)`` simple cycles, all through vertex 0.

    Edges: 0->1, i->j for 1 <= i < j <= n-1, and i->0 for 1 <= i <= n-1.
    """
    if n < 3:
        raise ParameterError("exp-cycles needs n >= 3")
    edges = [(0, 1, ts)]
    for i in range(1, n):
        edges.append((i, 0, ts))
        for j in range(i + 1, n):
            edges.append((i, j, ts))
    return TemporalGraph(n, edges)


def blocked_tail(m: int, k: int) -> TemporalGraph:
    """Hub cycle 0->1->2->0 with ``m`` detours 2->w_i->u_i->0.

    Every w_i and u_i also leads into the dead-end chain b_1 -> ... -> b_k, so
    a brute-force search walks the chain 2m times while Johnson walks it once.
    Vertex ids: hub 0..2, then (w_i, u_i) pairs, then the chain.
    """
    if m < 1 or k < 1:
        raise ParameterError("blocked-tail needs m >= 1 and k >= 1")
    b0 = 3 + 2 * m
    edges = [(0, 1, 0), (1, 2, 0), (2, 0, 0)]
    for i in range(m):
        w, u = 3 + 2 * i, 4 + 2 * i
        edges += [(2, w, 0), (w, u, 0), (u, 0, 0), (w, b0, 0), (u, b0, 0)]
    for i in range(k - 1):
        edges.append((b0 + i, b0 + i + 1, 0))
    return TemporalGraph(b0 + k, edges)


def infeasible_region(width: int = 4, m: int = 6) -> TemporalGraph:
    """``width`` parallel routes 1->u_i->2 plus a dead region behind vertex 2.

    0->1, 1->u_i, u_i->2, 2->0 give ``width`` cycles. From 2 the dead region
    b_1..b_m (b_i->b_{i+1}, b_i->b_{i+2}) has exponentially many maximal paths
    but no way back, so every search that reaches 2 with a fresh blocked set
    walks it again.
    """
    if width < 1 or m < 1:
        raise ParameterError("infeasible-region needs width >= 1 and m >= 1")
    b0 = 3 + width
    edges = [(0, 1, 0), (2, 0, 0), (2, b0, 0)]
    for i in range(width):
        edges += [(1, 3 + i, 0), (3 + i, 2, 0)]
    for i in range(m):
        if i + 1 < m:
            edges.append((b0 + i, b0 + i + 1, 0))
        if i + 2 < m:
            edges.append((b0 + i, b0 + i + 2, 0))
    return TemporalGraph(b0 + m, edges)


def forwarding_showcase(k: int = 6) -> TemporalGraph:
    """Read-Tarjan graph where forwarding blocked vertices saves work.

    Start vertex 0 with extension 0->a->b->c->0 and an alternate branch
    b->e->0. Vertices a, c and e all lead into a dead chain of ``k`` vertices;
    once the chain is blocked while probing from a, a forwarded blocked set
    keeps both child explorations from walking it again. The chain takes ids
    1..k in decreasing order along the chain and the hub a, b, c, e takes
    k+1..k+4, so only searches rooted at 0 can enter the chain.
    """
    if k < 1:
        raise ParameterError("forwarding-showcase needs k >= 1")
    a, b, c, e = k + 1, k + 2, k + 3, k + 4
    edges = [(0, a, 0), (a, b, 0), (b, c, 0), (c, 0, 0), (b, e, 0), (e, 0, 0)]
    edges += [(a, k, 0), (c, k, 0), (e, k, 0)]
    for v in range(k, 1, -1):
        edges.append((v, v - 1, 0))
    return TemporalGraph(k + 5, edges)


def random_temporal(
    n: int,
    p: float,
    ts_max: int = 20,
    seed: int | None = None,
    max_parallel: int = 1,
) -> TemporalGraph:
    """Erdos-Renyi style digraph with uniform integer timestamps in [0, ts_max].

    Each ordered pair gets an edge with probability ``p``; with
    ``max_parallel > 1`` a present pair carries 1..max_parallel parallel edges.
    """
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                k = 1 if max_parallel <= 1 else int(rng.integers(1, max_parallel + 1))
                for t in rng.integers(0, ts_max + 1, size=k):
                    edges.append((u, v, int(t)))
    return TemporalGraph(n, edges)


def skewed(core: int = 18, background: int = 10_000, degree: float = 2.0, seed: int = 0) -> TemporalGraph:
    """``exp_cycles(core)`` embedded in a large acyclic random background.

    Background vertices get random edges pointing to higher ids only, plus a
    few edges from the core into the background, so all cycles remain inside
    the core and share vertex 0.
    """
    rng = np.random.default_rng(seed)
    base = exp_cycles(core)
    edges = base.edge_tuples()
    n = core + background
    m = int(background * degree)
    src = rng.integers(core, n - 1, size=m)
    span = n - src
    dst = src + 1 + (rng.random(m) * (span - 1)).astype(np.int64)
    edges += [(int(s), int(d), 0) for s, d in zip(src, dst) if d < n]
    for v in range(1, core):
        edges.append((v, int(rng.integers(core, n)), 0))
    return TemporalGraph(n, edges)


GENERATORS = {
    "exp-cycles": exp_cycles,
    "blocked-tail": blocked_tail,
    "infeasible-region": infeasible_region,
    "forwarding-showcase": forwarding_showcase,
    "random": random_temporal,
    "skewed": skewed,
}


def generate_adversarial(family: str, **params) -> TemporalGraph:
    try:
        fn = GENERATORS[family]
    except KeyError:
        raise ParameterError(f"unknown family {family!r}; choose from {sorted(GENERATORS)}") from None
    return fn(**params)
