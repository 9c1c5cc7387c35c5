"""Acceptance suite: one pass/fail line per criterion.

Run ``python tests/test_acceptance.py`` for the report alone, or let pytest
collect it; the lines are then printed in the terminal summary.

Lines tagged ``[threads]`` measure real OS threads on the host. Lines tagged
``[virtual]`` use the virtual-clock backend, which emulates ``p`` cores by
letting one worker thread run at a time and advancing per-worker clocks.
"""

from __future__ import annotations

import statistics
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import corpus, cyclic_corpus, steal_sweep  # noqa: E402
from oracle import brute_cycles  # noqa: E402

from parcycles import (  # noqa: E402
    Constraints,
    Runtime,
    bundle_count,
    canonical_set,
    enumerate_cycles,
    fgj_enumerate,
    fgrt_enumerate,
)
from parcycles._deep import raise_limits  # noqa: E402
from parcycles.constrained import (  # noqa: E402
    hop_johnson_unit,
    temporal_johnson_unit,
    temporal_read_tarjan_unit,
)
from parcycles.generators import exp_cycles, forwarding_showcase, infeasible_region, skewed  # noqa: E402
from parcycles.pruning import bundle_expand  # noqa: E402
from parcycles.runtime import parallel_for  # noqa: E402
from parcycles.sequential import RTOptions, drive, johnson_unit, read_tarjan_unit  # noqa: E402

# ------------------------------------------------------------ tolerances
C1_N = range(3, 17)
C1_SECONDS = 60.0
C2_GRAPHS = 200
C2_WINDOWS = (2, 5, None)
C2_HOPS = (3, 5, 8)
C2_THREADS = (2, 4, 8)
C2_SECONDS = 600.0
C2_SEED = 2024
C3_GRAPHS = 20
C3_SECONDS = 600.0
C4_RATIO = 1.5
C4_THREADS = (1, 2, 4, 8)
C6_N = 20
C6_FINE_MIN = 3.0
C6_COARSE_MAX = 1.3
C7_FINE_MAX = 0.3
C7_COARSE_MIN = 1.0
C7_WORKERS = 8
C8_K = 20_000
C8_WALL_MIN = 1.1
C10_GRAPHS = 20

SIM_STEAL = 0.3
REPORT: list[str] = []


def record(label: str, ok: bool, detail: str) -> bool:
    REPORT.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    return ok


def drop(_):
    return None


def cv(xs) -> float:
    m = statistics.fmean(xs)
    return statistics.pstdev(xs) / m if m else 0.0


# ------------------------------------------------------------ criteria


def criterion_1() -> list[bool]:
    """exp-cycles(n) reports 2**(n-2) cycles for every enumerator and driver."""
    runs = [("tiernan", "seq"), ("tiernan", "coarse")]
    runs += [(a, p) for a in ("johnson", "read-tarjan") for p in ("seq", "coarse", "fine")]
    t0 = time.perf_counter()
    wrong = []
    for n in C1_N:
        g = exp_cycles(n)
        for algo, par in runs:
            got = enumerate_cycles(g, algo=algo, parallel=par, threads=4, sink=drop).metrics.cycles_reported
            if got != 2 ** (n - 2):
                wrong.append((n, algo, par, got))
    dt = time.perf_counter() - t0
    return [
        record("C1 count identity", not wrong, f"{len(C1_N) * len(runs)} runs, mismatches={wrong[:3]}"),
        record("C1 time budget", dt < C1_SECONDS, f"{dt:.1f}s < {C1_SECONDS:.0f}s"),
    ]


def _c2_configs(mode: str):
    algos = ["johnson"] + (["read-tarjan"] if mode != "hop" else [])
    for algo in algos:
        optss = RTOptions.all_combinations() if algo == "read-tarjan" else [RTOptions()]
        for o in optss:
            yield algo, "seq", 1, "recursive", o
            yield algo, "coarse", 4, "recursive", o
            for p in C2_THREADS:
                for cos in ("recursive", "complete") if algo == "johnson" else ("recursive",):
                    yield algo, "fine", p, cos, o


def _semantics(g, cons: Constraints, bundles) -> list[str]:
    """Constraint violations among the expanded cycles of ``bundles``."""
    edges = set(g.edge_tuples())
    bad = []
    for b in bundles:
        sels = list(bundle_expand(b, cons.mode, cons.strict))
        if not sels or len(sels) != bundle_count(b, cons.mode, cons.strict):
            bad.append(f"count {b.vertex_seq}")
        if cons.hops is not None and len(b) > cons.hops:
            bad.append(f"hops {b.vertex_seq}")
        seq = b.vertex_seq
        for sel in sels:
            if any((u, v, t) not in edges for u, v, t in zip(seq, seq[1:] + seq[:1], sel)):
                bad.append(f"edge {seq} {sel}")
            if cons.mode == "temporal" and any(x >= y for x, y in zip(sel, sel[1:])):
                bad.append(f"order {seq} {sel}")
            if cons.window is not None:
                t0 = b.start_ts if b.start_ts is not None else sel[0]
                if sel[0] != t0 or any(not t0 <= t <= t0 + cons.window for t in sel):
                    bad.append(f"window {seq} {sel}")
    return bad


def criterion_2_and_9() -> list[bool]:
    """Every configuration equals the Tiernan oracle; semantics hold on the same corpus."""
    t0 = time.perf_counter()
    runs = mism = oracle_mism = 0
    first = None
    sem_bad: list[str] = []
    bundle_bad = 0
    for i, g in corpus(C2_GRAPHS, seed=C2_SEED):
        edges = g.edge_tuples()
        for window in C2_WINDOWS:
            cases = [Constraints("simple", window), Constraints("temporal", window)]
            cases += [Constraints("hop", window, L) for L in C2_HOPS]
            for cons in cases:
                ref = enumerate_cycles(g, cons, algo="tiernan").canonical()
                if ref != brute_cycles(edges, cons.mode, cons.window, cons.hops, cons.strict):
                    oracle_mism += 1
                for algo, par, p, cos, o in _c2_configs(cons.mode):
                    r = enumerate_cycles(
                        g, cons, algo=algo, parallel=par, threads=p, cos=cos, opts=o,
                        backend="simulated", seed=i, steal_prob=SIM_STEAL if par == "fine" else 0.0,
                    )
                    runs += 1
                    if r.canonical() != ref:
                        mism += 1
                        first = first or (i, cons, algo, par, p, cos, o)
                seq = enumerate_cycles(g, cons, algo="johnson")
                sem_bad += _semantics(g, cons, seq.bundles)
                flat = enumerate_cycles(g, cons, algo="johnson", bundles=False)
                total = sum(bundle_count(b, cons.mode, cons.strict) for b in seq.bundles)
                if total != len(flat.bundles) or flat.canonical() != seq.canonical():
                    bundle_bad += 1
    dt = time.perf_counter() - t0
    return [
        record("C2 oracle equivalence", mism == 0, f"{runs} runs on {C2_GRAPHS} graphs, mismatches={mism}, first={first}"),
        record("C2 Tiernan vs brute force", oracle_mism == 0, f"mismatches={oracle_mism}"),
        record("C2 time budget", dt < C2_SECONDS, f"{dt:.0f}s < {C2_SECONDS:.0f}s"),
        record("C9 constraint semantics", not sem_bad, f"violations={len(sem_bad)} {sem_bad[:3]}"),
        record("C9 bundle expansion", bundle_bad == 0, f"count or set mismatches={bundle_bad}"),
    ]


def criterion_3() -> list[bool]:
    """Forcing any single task to be stolen never changes the result."""
    t0 = time.perf_counter()
    modes = [Constraints(), Constraints("temporal", 5), Constraints("hop", None, 5)]
    sweeps = stolen = bad = 0
    for i, g in cyclic_corpus(C3_GRAPHS, seed=31, max_n=10):
        for cons in modes:
            want = enumerate_cycles(g, cons, algo="tiernan").canonical()
            variants = [("johnson", "recursive"), ("johnson", "complete")]
            if cons.mode != "hop":
                variants.append(("read-tarjan", "recursive"))
            for algo, cos in variants:

                def run(inj, algo=algo, cos=cos, cons=cons):
                    out = []
                    if algo == "johnson":
                        fgj_enumerate(g, cons, out.append, cos=cos, threads=2, backend="simulated", injector=inj)
                    else:
                        fgrt_enumerate(g, cons, out.append, threads=2, backend="simulated", injector=inj)
                    return canonical_set(out, cons.mode, cons.strict)

                sweeps += 1
                for _, got in steal_sweep(run):
                    stolen += 1
                    bad += got != want
    dt = time.perf_counter() - t0
    return [
        record("C3 steal-injector sweep", bad == 0, f"{sweeps} sweeps, {stolen} forced steals, changed results={bad}"),
        record("C3 time budget", dt < C3_SECONDS, f"{dt:.0f}s < {C3_SECONDS:.0f}s"),
    ]


def criterion_4() -> list[bool]:
    """fgrt work at 8 workers stays within 1.5x of 1 worker; coarse work ignores p."""
    worst = 0.0
    over = []
    coarse_bad = []
    for i, g in corpus(C2_GRAPHS, seed=C2_SEED):
        for cons in (Constraints(), Constraints("temporal"), Constraints("temporal", 5)):
            one = enumerate_cycles(g, cons, algo="read-tarjan", parallel="fine", threads=1).metrics.edge_visits
            for prob in (SIM_STEAL, 1.0):
                many = enumerate_cycles(
                    g, cons, algo="read-tarjan", parallel="fine", threads=8,
                    backend="simulated", seed=i, steal_prob=prob,
                ).metrics.edge_visits
                ratio = many / one if one else (1.0 if many == 0 else float("inf"))
                worst = max(worst, ratio)
                if many > C4_RATIO * one:
                    over.append((i, cons.mode, prob, one, many))
        for algo in ("tiernan", "johnson", "read-tarjan"):
            visits = {
                enumerate_cycles(g, algo=algo, parallel="coarse", threads=p).metrics.edge_visits for p in C4_THREADS
            }
            if len(visits) != 1:
                coarse_bad.append((i, algo, sorted(visits)))
    return [
        record("C4 fgrt work efficiency", not over, f"worst p=8/p=1 edge-visit ratio {worst:.3f} <= {C4_RATIO}"),
        record("C4 coarse visits independent of p", not coarse_bad, f"graphs differing={coarse_bad[:3]}"),
    ]


def criterion_5() -> list[bool]:
    """Stealing into the dead region makes fgj repeat work."""
    g = infeasible_region()
    one = enumerate_cycles(g, algo="johnson", parallel="fine", threads=1).metrics
    many = enumerate_cycles(g, algo="johnson", parallel="fine", threads=8, backend="simulated", steal_prob=1.0).metrics
    return [
        record(
            "C5 work inflation witness",
            many.edge_visits > one.edge_visits,
            f"edge visits p=1 {one.edge_visits} < p=8 {many.edge_visits} ({many.tasks_stolen} steals)",
        )
    ]


def _speedups(backend: str) -> dict[str, float]:
    g = exp_cycles(C6_N)
    out = {}
    for key, algo, par in (("fgj", "johnson", "fine"), ("fgrt", "read-tarjan", "fine"), ("coarse", "johnson", "coarse")):
        walls = []
        for p in (1, 8):
            r = enumerate_cycles(g, algo=algo, parallel=par, threads=p, backend=backend, sink=drop)
            assert r.metrics.cycles_reported == 2 ** (C6_N - 2)
            walls.append(r.metrics.wall_ns)
        out[key] = walls[0] / walls[1]
    return out


def _c6_lines(tag: str, s: dict[str, float]) -> list[bool]:
    return [
        record(f"C6 {tag} fgj speedup", s["fgj"] >= C6_FINE_MIN, f"{s['fgj']:.2f}x >= {C6_FINE_MIN}x"),
        record(f"C6 {tag} fgrt speedup", s["fgrt"] >= C6_FINE_MIN, f"{s['fgrt']:.2f}x >= {C6_FINE_MIN}x"),
        record(f"C6 {tag} coarse speedup", s["coarse"] <= C6_COARSE_MAX, f"{s['coarse']:.2f}x <= {C6_COARSE_MAX}x"),
        record(
            f"C6 {tag} ordering fine > coarse",
            min(s["fgj"], s["fgrt"]) > s["coarse"],
            f"min(fgj, fgrt)={min(s['fgj'], s['fgrt']):.2f}x vs coarse {s['coarse']:.2f}x",
        ),
    ]


def criterion_6_threads() -> list[bool]:
    import os

    cpus = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    lines = _c6_lines(f"[threads, {cpus} cpu]", _speedups("threads"))
    return lines


def criterion_6_virtual() -> list[bool]:
    return _c6_lines("[virtual]", _speedups("virtual"))


def _cvs(backend: str) -> tuple[float, float]:
    g = skewed()
    fine = enumerate_cycles(g, algo="johnson", parallel="fine", threads=C7_WORKERS, backend=backend, trim=True, sink=drop)
    coarse = enumerate_cycles(g, algo="johnson", parallel="coarse", threads=C7_WORKERS, backend=backend, trim=True, sink=drop)
    return cv(fine.metrics.busy_ns), cv(coarse.metrics.busy_ns)


def _uniform_cv() -> float:
    """Busy-time dispersion of 64 identical items under the threads backend."""

    def body(_, w):
        return sum(range(200_000))

    snap = parallel_for(Runtime(C7_WORKERS, "threads"), range(64), body)
    return cv(snap.busy_ns)


def criterion_7_threads() -> list[bool]:
    f, c = _cvs("threads")
    u = _uniform_cv()
    return [
        record("C7 [threads] fine busy-time CV", f < C7_FINE_MAX, f"{f:.3f} < {C7_FINE_MAX} (uniform-work calibration CV {u:.3f})"),
        record("C7 [threads] coarse busy-time CV", c > C7_COARSE_MIN, f"{c:.3f} > {C7_COARSE_MIN}"),
    ]


def criterion_7_virtual() -> list[bool]:
    f, c = _cvs("virtual")
    return [
        record("C7 [virtual] fine busy-time CV", f < C7_FINE_MAX, f"{f:.3f} < {C7_FINE_MAX}"),
        record("C7 [virtual] coarse busy-time CV", c > C7_COARSE_MIN, f"{c:.3f} > {C7_COARSE_MIN}"),
    ]


def criterion_8() -> list[bool]:
    """All three Read-Tarjan pruning options never add work and pay off on the designed graph."""
    on, off = RTOptions(True, True, True), RTOptions(False, False, False)

    def visits(g, cons, o):
        return enumerate_cycles(g, cons, algo="read-tarjan", opts=o, sink=drop).metrics.edge_visits

    worse = []
    graphs = [("showcase", forwarding_showcase())] + [(i, g) for i, g in corpus(C2_GRAPHS, seed=C2_SEED)]
    for name, g in graphs:
        for cons in (Constraints(), Constraints("temporal"), Constraints("temporal", 5)):
            a, b = visits(g, cons, on), visits(g, cons, off)
            if a > b:
                worse.append((name, cons.mode, a, b))
    d_on, d_off = visits(forwarding_showcase(), Constraints(), on), visits(forwarding_showcase(), Constraints(), off)

    big = forwarding_showcase(C8_K)

    def best_wall(o):
        ws = []
        for _ in range(3):
            t0 = time.perf_counter()
            enumerate_cycles(big, algo="read-tarjan", opts=o, sink=drop)
            ws.append(time.perf_counter() - t0)
        return min(ws)

    w_off, w_on = best_wall(off), best_wall(on)
    return [
        record("C8 options never add work", not worse, f"{len(graphs)} graphs x 3 modes, regressions={worse[:3]}"),
        record("C8 strictly fewer visits on designed graph", d_on < d_off, f"{d_on} < {d_off}"),
        record("C8 wall-time speedup", w_off / w_on >= C8_WALL_MIN, f"{w_off / w_on:.2f}x >= {C8_WALL_MIN}x (k={C8_K})"),
    ]


def criterion_10() -> list[bool]:
    """One-worker fine-grained traces equal the sequential traces."""
    o = RTOptions()
    cases = [
        ("fgj simple", Constraints(), johnson_unit, "j"),
        ("fgj temporal", Constraints("temporal", 4), temporal_johnson_unit, "j"),
        ("fgj hop", Constraints("hop", None, 4), hop_johnson_unit, "j"),
        ("fgrt simple", Constraints(), lambda c, r, n, t: read_tarjan_unit(c, r, n, o, t), "rt"),
        ("fgrt temporal", Constraints("temporal", 4), lambda c, r, n, t: temporal_read_tarjan_unit(c, r, n, o, t), "rt"),
    ]
    bad = []
    events = 0
    for i, g in cyclic_corpus(C10_GRAPHS, seed=101, max_n=9):
        for name, cons, unit, kind in cases:
            seq = []
            drive(g, cons, drop, unit, trace=seq)
            rt = Runtime(1, "simulated", trace=True)
            if kind == "j":
                fgj_enumerate(g, cons, None, runtime=rt)
            else:
                fgrt_enumerate(g, cons, None, o, runtime=rt)
            events += len(seq)
            if rt.workers[0].trace != seq:
                bad.append((i, name))
    return [record("C10 degeneracy traces", not bad, f"{C10_GRAPHS} graphs x {len(cases)} variants, {events} events, differing={bad[:3]}")]


CRITERIA = [
    criterion_1,
    criterion_2_and_9,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6_threads,
    criterion_6_virtual,
    criterion_7_threads,
    criterion_7_virtual,
    criterion_8,
    criterion_10,
]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    lines = criterion()
    assert all(lines), REPORT[-len(lines):]


if __name__ == "__main__":
    raise_limits()
    only = set(sys.argv[1:])
    failed = 0
    for c in CRITERIA:
        if only and c.__name__ not in only:
            continue
        start = len(REPORT)
        failed += not all(c())
        for line in REPORT[start:]:
            print(line, flush=True)
    sys.exit(1 if failed else 0)
