"""Command-line interface: enumerate, verify, bench and gen.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from .api import ALGORITHMS, PARALLEL, check_combination, enumerate_cycles
from .generators import GENERATORS, ParameterError, generate_adversarial, random_temporal
from .graph import EdgeListParseError, TemporalGraph, load_edge_list, write_edge_list
from .metrics import export
from .pruning import Constraints, bundle_count, bundle_expand
from .runtime import BACKENDS
from .sequential import RTOptions

THREADS_ENV = "PARCYCLES_THREADS"


class UsageError(Exception):
    pass


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        p = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if p < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1")
    return p


def _window(text: str) -> int | None:
    if text.lower() in ("inf", "none", "unbounded"):
        return None
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("window must be >= 0")
    return v


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("simple", "temporal", "hop"), default="simple")
    p.add_argument("--hops", type=int, help="hop limit L (hop mode)")
    p.add_argument("--window", type=_window, default=None, help="time window delta; 'inf' for none")
    p.add_argument("--algo", choices=ALGORITHMS, default="johnson")
    p.add_argument("--parallel", choices=PARALLEL, default="seq")
    p.add_argument("--grain", choices=("vertex", "edge"), default="edge")
    p.add_argument("--threads", type=int, default=None, help=f"worker count (default ${THREADS_ENV} or 1)")
    p.add_argument("--cos", choices=("recursive", "complete"), default="recursive")
    p.add_argument("--bundles", choices=("on", "off"), default="on")
    p.add_argument("--prune", choices=("none", "scc", "cycle-union"), default="none")
    p.add_argument("--rt-opts", default="111", help="Read-Tarjan switches fwd_blk,fwd_ext,blk_on_success as 3 bits")
    p.add_argument("--temporal-nondecreasing", action="store_true", help="allow equal consecutive timestamps")
    p.add_argument("--trim", action="store_true", help="drop edges outside strong components first")
    p.add_argument("--backend", choices=BACKENDS, default="threads")
    p.add_argument("--seed", type=int, default=0)


def _constraints(a) -> Constraints:
    try:
        return Constraints(a.mode, a.window, a.hops, a.prune, not a.temporal_nondecreasing)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _rt_opts(bits: str) -> RTOptions:
    if len(bits) != 3 or set(bits) - {"0", "1"}:
        raise UsageError("--rt-opts takes three 0/1 digits")
    return RTOptions(*(b == "1" for b in bits))


def _threads(a) -> int:
    p = a.threads if a.threads is not None else default_threads()
    if p < 1:
        raise UsageError("--threads must be >= 1")
    return p


def _load(path: str, untimed: bool) -> TemporalGraph:
    if path == "-":
        return load_edge_list(sys.stdin, untimed=untimed)
    with open(path) as f:
        return load_edge_list(f, untimed=untimed)


def _run(g: TemporalGraph, a, cons: Constraints, threads: int, sink=None, **kw):
    try:
        check_combination(cons, a.algo, a.parallel)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return enumerate_cycles(
        g,
        cons,
        algo=a.algo,
        parallel=a.parallel,
        threads=threads,
        grain=a.grain,
        cos=a.cos,
        bundles=a.bundles == "on",
        opts=_rt_opts(a.rt_opts),
        trim=a.trim,
        backend=a.backend,
        seed=a.seed,
        sink=sink,
        **kw,
    )


def _write_metrics(path: str, snap) -> None:
    fmt = "csv" if path.endswith(".csv") else "json"
    Path(path).write_bytes(export(snap, fmt))


# ---------------------------------------------------------------- enumerate


def cmd_enumerate(a) -> int:
    cons = _constraints(a)
    threads = _threads(a)
    g = _load(a.input, a.untimed)
    ids = g.id_map
    out = sys.stdout
    total = 0
    hist: dict[int, int] = {}

    def line(obj) -> None:
        out.write(json.dumps(obj, separators=(",", ":")) + "\n")

    def sink(b) -> None:
        nonlocal total
        k = bundle_count(b, cons.mode, cons.strict)
        total += k
        hist[len(b)] = hist.get(len(b), 0) + k
        verts = [ids[v] for v in b.vertex_seq]
        if a.emit == "bundles":
            line({"vertices": verts, "hop_timestamps": [list(t) for t in b.hop_timestamps], "count": k})
        elif a.emit == "cycles":
            for ts in bundle_expand(b, cons.mode, cons.strict):
                line({"vertices": verts, "timestamps": list(ts)})

    res = _run(g, a, cons, threads, sink=sink)
    if a.emit in ("count", "histogram"):
        obj: dict = {"cycles": total}
        if a.emit == "histogram":
            obj["histogram"] = {str(k): hist[k] for k in sorted(hist)}
        line(obj)
    if a.metrics:
        _write_metrics(a.metrics, res.metrics)
    return 0


# ------------------------------------------------------------------- verify


def verify_configs(mode: str, opts_all: bool = True):
    """Configurations checked against the brute-force oracle for one mode."""
    algos = ["johnson"] + (["read-tarjan"] if mode != "hop" else [])
    for algo in algos:
        for par in PARALLEL:
            coss = ("recursive", "complete") if par == "fine" and algo == "johnson" else ("recursive",)
            optss = RTOptions.all_combinations() if algo == "read-tarjan" and opts_all else [RTOptions()]
            for cos in coss:
                for o in optss:
                    yield algo, par, cos, o


def cmd_verify(a) -> int:
    threads = _threads(a)
    modes = a.modes.split(",")
    for m in modes:
        if m not in ("simple", "temporal", "hop"):
            raise UsageError(f"unknown mode {m!r} in --modes")
    rng = random.Random(a.seed)
    checked = 0
    for i in range(a.graphs):
        gs = rng.randrange(2**31)
        n = rng.randint(3, a.max_n)
        g = random_temporal(n, rng.uniform(0.05, a.max_p), ts_max=20, seed=gs)
        for mode in modes:
            for window in (None, 2, 5):
                hops = rng.choice((3, 5, 8)) if mode == "hop" else None
                cons = Constraints(mode, window, hops)
                ref = enumerate_cycles(g, cons, algo="tiernan").canonical()
                for algo, par, cos, o in verify_configs(mode):
                    got = enumerate_cycles(
                        g, cons, algo=algo, parallel=par, threads=threads, cos=cos, opts=o,
                        backend=a.backend, seed=gs, steal_prob=a.steal_prob if par == "fine" else 0.0,
                    ).canonical()
                    checked += 1
                    if got != ref:
                        dump = Path(a.dump)
                        with dump.open("w") as f:
                            write_edge_list(g, f)
                        print(
                            json.dumps(
                                {
                                    "mismatch": {"graph": i, "graph_seed": gs, "mode": mode, "window": window,
                                                 "hops": hops, "algo": algo, "parallel": par, "cos": cos,
                                                 "rt_opts": [o.fwd_blk, o.fwd_ext, o.blk_on_success]},
                                    "expected": len(ref),
                                    "got": len(got),
                                    "reproducer": str(dump),
                                }
                            )
                        )
                        return 1
    print(json.dumps({"ok": True, "graphs": a.graphs, "checks": checked}))
    return 0


# -------------------------------------------------------------------- bench


def cmd_bench(a) -> int:
    cons = _constraints(a)
    if a.input:
        g = _load(a.input, a.untimed)
    else:
        g = _generate(a.gen, a.param)
    try:
        plist = [int(x) for x in a.threads_list.split(",")]
    except ValueError:
        raise UsageError("--threads-list takes comma-separated integers") from None
    if not plist or min(plist) < 1:
        raise UsageError("--threads-list entries must be >= 1")
    rows = []
    busy_rows = []
    base = None
    for p in plist:
        best = None
        for _ in range(a.repeat):
            t0 = time.perf_counter()
            res = _run(g, a, cons, p, sink=lambda b: None)
            dt = time.perf_counter() - t0
            if best is None or dt < best[0]:
                best = (dt, res.metrics)
        dt, snap = best
        if base is None:
            base = dt
        rows.append({"threads": p, "seconds": round(dt, 6), "speedup": round(base / dt, 3) if dt else None,
                     "edge_visits": snap.edge_visits, "tasks_stolen": snap.tasks_stolen,
                     "busy_cv": round(snap.busy_cv(), 4)})
        busy_rows.extend((p, i, ns) for i, ns in enumerate(snap.busy_ns))
    for r in rows:
        print(json.dumps(r))
    if a.busy_csv:
        with open(a.busy_csv, "w") as f:
            f.write("threads,worker,busy_ns\n")
            for p, i, ns in busy_rows:
                f.write(f"{p},{i},{ns}\n")
    return 0


# ---------------------------------------------------------------------- gen


def _parse_params(items: list[str]) -> dict:
    params = {}
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"--param expects key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            params[k] = int(v)
        except ValueError:
            try:
                params[k] = float(v)
            except ValueError:
                raise UsageError(f"--param {k} must be numeric") from None
    return params


def _generate(family: str, items: list[str]) -> TemporalGraph:
    try:
        return generate_adversarial(family, **_parse_params(items))
    except (ParameterError, TypeError) as e:
        raise UsageError(str(e)) from None


def cmd_gen(a) -> int:
    g = _generate(a.family, a.param)
    if a.output and a.output != "-":
        with open(a.output, "w") as f:
            write_edge_list(g, f)
    else:
        write_edge_list(g, sys.stdout)
    return 0


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parcycles", description="Parallel simple and temporal cycle enumeration")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="enumerate cycles of an edge list")
    e.add_argument("--input", required=True, help="edge list path ('-' for stdin)")
    e.add_argument("--untimed", action="store_true", help="allow 'src dst' lines (timestamp 0)")
    _add_search_flags(e)
    e.add_argument("--emit", choices=("count", "histogram", "cycles", "bundles"), default="count")
    e.add_argument("--metrics", help="write metrics to PATH (.csv for CSV, JSON otherwise)")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="compare enumerators against the brute-force oracle")
    v.add_argument("--graphs", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-n", type=int, default=10)
    v.add_argument("--max-p", type=float, default=0.3)
    v.add_argument("--modes", default="simple,temporal,hop")
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--backend", choices=BACKENDS, default="simulated")
    v.add_argument("--steal-prob", type=float, default=0.3)
    v.add_argument("--dump", default="parcycles-repro.txt", help="where to write a mismatching graph")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="thread-count sweep")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--gen", choices=sorted(GENERATORS))
    b.add_argument("--param", action="append", help="generator parameter key=value")
    b.add_argument("--untimed", action="store_true")
    _add_search_flags(b)
    # a thread sweep is only meaningful for a parallel driver
    b.set_defaults(parallel="fine")
    b.add_argument("--threads-list", default="1,2,4,8")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--busy-csv", help="per-worker busy time CSV")
    b.set_defaults(func=cmd_bench)

    gp = sub.add_parser("gen", help="write a generated graph as an edge list")
    gp.add_argument("family", choices=sorted(GENERATORS))
    gp.add_argument("--param", action="append", help="generator parameter key=value")
    gp.add_argument("--output", "-o")
    gp.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return a.func(a)
    except UsageError as e:
        print(f"parcycles: error: {e}", file=sys.stderr)
        return 2
    except (OSError, EdgeListParseError) as e:
        print(f"parcycles: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
