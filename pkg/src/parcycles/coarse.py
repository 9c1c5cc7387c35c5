"""Coarse-grained parallel drivers: one sequential search per start unit.

Each unit runs with private state, so total work does not depend on the
worker count. Balance is only as good as the spread of cycles over start
units.
"""

from __future__ import annotations

from .constrained import hop_johnson_unit, temporal_johnson_unit, temporal_read_tarjan_unit
from .fg_johnson import attach_reporters, finish_run, make_runtime
from .graph import TemporalGraph
from .metrics import MetricsSnapshot, Sink
from .pruning import Constraints
from .runtime import Runtime, parallel_for_units
from .sequential import RTOptions, johnson_unit, read_tarjan_unit, tiernan_unit

ALGOS = ("tiernan", "johnson", "read_tarjan", "temporal_johnson", "hop_johnson")


def unit_body(algo: str, cons: Constraints, opts: RTOptions = RTOptions()):
    """Sequential per-unit search ``body(ctx, rep, cnt, trace)`` for ``algo``.

    ``johnson`` picks the temporal or hop-limited variant from the mode.
    Hyphenated names (``read-tarjan``) are accepted too.
    """
    mode = cons.mode
    algo = algo.replace("-", "_")
    if algo == "johnson":
        algo = {"simple": "johnson", "temporal": "temporal_johnson", "hop": "hop_johnson"}[mode]
    if algo == "tiernan":
        return tiernan_unit
    if algo == "johnson":
        return lambda c, r, n, t: johnson_unit(c, r, n, t)
    if algo == "temporal_johnson":
        if mode != "temporal":
            raise ValueError("temporal_johnson needs temporal mode")
        return lambda c, r, n, t: temporal_johnson_unit(c, r, n, t)
    if algo == "hop_johnson":
        if mode != "hop":
            raise ValueError("hop_johnson needs hop mode")
        return lambda c, r, n, t: hop_johnson_unit(c, r, n, t)
    if algo == "read_tarjan":
        if mode == "hop":
            raise ValueError("read_tarjan does not support hop mode")
        if mode == "temporal":
            return lambda c, r, n, t: temporal_read_tarjan_unit(c, r, n, opts, t)
        return lambda c, r, n, t: read_tarjan_unit(c, r, n, opts, t)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGOS}")


def coarse_enumerate(
    g: TemporalGraph,
    constraints: Constraints,
    algo: str,
    grain: str = "edge",
    sink: Sink | None = None,
    opts: RTOptions = RTOptions(),
    runtime: Runtime | None = None,
    bundles: bool = True,
    **rt_kw,
) -> MetricsSnapshot:
    """Run ``algo`` once per start vertex or start edge across the workers."""
    if grain not in ("vertex", "edge"):
        raise ValueError(f"unknown grain {grain!r}")
    body = unit_body(algo, constraints, opts)
    rt = runtime or make_runtime(**rt_kw)
    attach_reporters(rt, constraints, bundles)

    def run_unit(ctx, w):
        body(ctx, w.rep, w.counters, w.trace)

    snap = parallel_for_units(rt, g, constraints, grain, run_unit)
    return finish_run(rt, snap, sink)
