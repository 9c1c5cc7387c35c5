"""One entry point over every enumerator and parallel mode."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .coarse import coarse_enumerate, unit_body
from .fg_johnson import fgj_enumerate
from .fg_read_tarjan import fgrt_enumerate
from .graph import TemporalGraph
from .metrics import MetricsSnapshot
from .pruning import CycleBundle, Constraints, bundle_count, canonical_set, trim_acyclic
from .runtime import Runtime, StealInjector
from .sequential import RTOptions, drive

ALGORITHMS = ("tiernan", "johnson", "read-tarjan")
PARALLEL = ("seq", "coarse", "fine")


@dataclass
class EnumerationResult:
    bundles: list[CycleBundle]
    metrics: MetricsSnapshot
    constraints: Constraints = field(default_factory=Constraints)

    @property
    def count(self) -> int:
        """Number of cycles, counting every member of every bundle."""
        c = self.constraints
        return sum(bundle_count(b, c.mode, c.strict) for b in self.bundles)

    def histogram(self) -> dict[int, int]:
        """Cycle count per cycle length."""
        c = self.constraints
        h: Counter[int] = Counter()
        for b in self.bundles:
            h[len(b.vertex_seq)] += bundle_count(b, c.mode, c.strict)
        return dict(sorted(h.items()))

    def canonical(self) -> frozenset:
        c = self.constraints
        return canonical_set(self.bundles, c.mode, c.strict)


def check_combination(constraints: Constraints, algo: str, parallel: str) -> None:
    """Raise ``ValueError`` naming the violated rule for unsupported combinations."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    if parallel not in PARALLEL:
        raise ValueError(f"unknown parallel mode {parallel!r}; choose from {PARALLEL}")
    if algo == "read-tarjan" and constraints.mode == "hop":
        raise ValueError("hop mode is not supported by read-tarjan; use johnson or tiernan")
    if algo == "tiernan" and parallel == "fine":
        raise ValueError("tiernan has no fine-grained variant; use seq or coarse")


def enumerate_cycles(
    g: TemporalGraph,
    constraints: Constraints = Constraints(),
    algo: str = "johnson",
    parallel: str = "seq",
    threads: int = 1,
    grain: str = "edge",
    cos: str = "recursive",
    bundles: bool = True,
    opts: RTOptions = RTOptions(),
    trim: bool = False,
    backend: str = "threads",
    seed: int | None = 0,
    steal_prob: float = 0.0,
    injector: StealInjector | None = None,
    sink=None,
) -> EnumerationResult:
    """Enumerate cycles of ``g`` under ``constraints``.

    ``sink``, when given, receives every bundle and the returned result
    holds none; otherwise the bundles are collected.
    """
    check_combination(constraints, algo, parallel)
    if trim:
        g = trim_acyclic(g)
    out: list[CycleBundle] = []
    emit = sink if sink is not None else out.append
    key = algo.replace("-", "_")
    if parallel == "seq":
        body = unit_body(key, constraints, opts)
        t0 = time.perf_counter_ns()
        cnt = drive(g, constraints, emit, body, grain=grain, bundles=bundles)
        wall = time.perf_counter_ns() - t0
        snap = MetricsSnapshot.from_counters(cnt, busy_ns=[wall], wall_ns=wall)
        return EnumerationResult(out, snap, constraints)
    rt = Runtime(threads, backend, seed, steal_prob, injector)
    if parallel == "coarse":
        snap = coarse_enumerate(g, constraints, key, grain, emit, opts, runtime=rt, bundles=bundles)
    elif algo == "johnson":
        snap = fgj_enumerate(g, constraints, emit, cos=cos, runtime=rt, grain=grain, bundles=bundles)
    else:
        snap = fgrt_enumerate(g, constraints, emit, opts, runtime=rt, grain=grain, bundles=bundles)
    return EnumerationResult(out, snap, constraints)
