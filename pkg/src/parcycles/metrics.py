"""Visit counters, cycle reporting and mergeable run metrics."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

from .pruning import CycleBundle, SearchContext, bundle_count, singleton_bundles

SCHEMA_VERSION = 1


@dataclass
class VisitCounters:
    """Per-search or per-worker work counters."""

    edge_visits: int = 0
    vertex_visits: int = 0
    unblock_calls: int = 0
    dfs_calls: int = 0
    cycles_reported: int = 0
    bundles_reported: int = 0

    def add(self, other: "VisitCounters") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


class NullCounters:
    """Counter stand-in that ignores every update."""

    edge_visits = vertex_visits = unblock_calls = dfs_calls = 0
    cycles_reported = bundles_reported = 0

    def __setattr__(self, name, value):
        pass

    def add(self, other) -> None:
        pass


Sink = Callable[[CycleBundle], None]


class Reporter:
    """Turns a closed vertex path into bundles delivered to a sink.

    With ``bundles=False`` each bundle is expanded into one-cycle bundles
    before delivery.
    """

    __slots__ = ("sink", "counters", "temporal", "strict", "bundles", "trace")

    def __init__(self, sink: Sink, counters, mode: str, strict: bool = True, bundles: bool = True, trace=None):
        self.sink = sink
        self.counters = counters
        self.temporal = mode == "temporal"
        self.strict = strict
        self.bundles = bundles
        self.trace = trace

    def report(self, ctx: SearchContext, path) -> None:
        b = ctx.bundle(path)
        mode = "temporal" if self.temporal else "simple"
        k = bundle_count(b, mode, self.strict)
        if k == 0:
            return
        if self.trace is not None:
            self.trace.append(("cycle", b.vertex_seq))
        c = self.counters
        if self.bundles:
            self.sink(b)
            c.bundles_reported += 1
            c.cycles_reported += k
        else:
            for s in singleton_bundles(b, mode, self.strict):
                self.sink(s)
                c.bundles_reported += 1
                c.cycles_reported += 1


@dataclass
class MetricsSnapshot:
    busy_ns: list[int] = field(default_factory=list)
    edge_visits: int = 0
    vertex_visits: int = 0
    unblock_calls: int = 0
    dfs_calls: int = 0
    tasks_spawned: int = 0
    tasks_stolen: int = 0
    cycles_reported: int = 0
    bundles_reported: int = 0
    wall_ns: int = 0

    @classmethod
    def from_counters(cls, c: VisitCounters, **kw) -> "MetricsSnapshot":
        return cls(
            edge_visits=c.edge_visits,
            vertex_visits=c.vertex_visits,
            unblock_calls=c.unblock_calls,
            dfs_calls=c.dfs_calls,
            cycles_reported=c.cycles_reported,
            bundles_reported=c.bundles_reported,
            **kw,
        )

    @property
    def workers(self) -> int:
        return len(self.busy_ns)

    def busy_cv(self) -> float:
        """Coefficient of variation of per-worker busy time."""
        b = self.busy_ns
        if not b:
            return 0.0
        mean = sum(b) / len(b)
        if mean == 0:
            return 0.0
        var = sum((x - mean) ** 2 for x in b) / len(b)
        return var**0.5 / mean


_COUNTER_FIELDS = (
    "edge_visits",
    "vertex_visits",
    "unblock_calls",
    "dfs_calls",
    "tasks_spawned",
    "tasks_stolen",
    "cycles_reported",
    "bundles_reported",
)


def merge(a: MetricsSnapshot, b: MetricsSnapshot) -> MetricsSnapshot:
    """Sum counters, add busy time per worker index, keep the longer wall time."""
    n = max(len(a.busy_ns), len(b.busy_ns))
    busy = [
        (a.busy_ns[i] if i < len(a.busy_ns) else 0) + (b.busy_ns[i] if i < len(b.busy_ns) else 0) for i in range(n)
    ]
    out = MetricsSnapshot(busy_ns=busy, wall_ns=max(a.wall_ns, b.wall_ns))
    for name in _COUNTER_FIELDS:
        setattr(out, name, getattr(a, name) + getattr(b, name))
    return out


def export(snapshot: MetricsSnapshot, fmt: str = "json") -> bytes:
    """Serialise a snapshot.

    JSON holds every field plus ``schema``. CSV has a ``worker,busy_ns``
    header and one row per worker, followed by a blank line and
    ``counter,value`` rows.
    """
    if fmt == "json":
        d = {"schema": SCHEMA_VERSION}
        d.update(asdict(snapshot))
        return (json.dumps(d, sort_keys=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["worker", "busy_ns"])
        for i, ns in enumerate(snapshot.busy_ns):
            w.writerow([i, ns])
        w.writerow([])
        w.writerow(["counter", "value"])
        w.writerow(["schema", SCHEMA_VERSION])
        for name in _COUNTER_FIELDS + ("wall_ns",):
            w.writerow([name, getattr(snapshot, name)])
        return buf.getvalue().encode()
    raise ValueError(f"unknown export format {fmt!r}")


def load_json(data: bytes | str) -> MetricsSnapshot:
    d = json.loads(data)
    d.pop("schema", None)
    return MetricsSnapshot(**d)
