import json

import pytest

from parcycles import cli
from parcycles.generators import exp_cycles
from parcycles.graph import dumps_edge_list


@pytest.fixture
def exp6(tmp_path):
    p = tmp_path / "exp6.txt"
    p.write_text(dumps_edge_list(exp_cycles(6)))
    return str(p)


@pytest.fixture
def tri(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text("# triangle\n10 20 1\n20 30 2\n30 10 3\n")
    return str(p)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, [json.loads(x) for x in out.splitlines() if x.strip()], err


COMBOS = [
    (algo, par)
    for algo in ("tiernan", "johnson", "read-tarjan")
    for par in ("seq", "coarse", "fine")
    if not (algo == "tiernan" and par == "fine")
]


@pytest.mark.parametrize("algo,par", COMBOS)
def test_count_exp_cycles(capsys, exp6, algo, par):
    code, lines, _ = run(capsys, "enumerate", "--input", exp6, "--algo", algo, "--parallel", par, "--threads", "3")
    assert code == 0 and lines == [{"cycles": 16}]


def test_hop_triangle(capsys, tri):
    code, lines, _ = run(capsys, "enumerate", "--input", tri, "--mode", "hop", "--hops", "3")
    assert lines == [{"cycles": 1}]


def test_histogram_binomial(capsys, exp6):
    _, lines, _ = run(capsys, "enumerate", "--input", exp6, "--emit", "histogram")
    hist = lines[0]["histogram"]
    # cycles of length k pick k-2 of the four inner vertices
    assert hist == {"2": 1, "3": 4, "4": 6, "5": 4, "6": 1}
    assert sum(hist.values()) == lines[0]["cycles"] == 16


def test_cycles_use_original_ids(capsys, tri):
    _, lines, _ = run(capsys, "enumerate", "--input", tri, "--mode", "temporal", "--emit", "cycles")
    assert lines == [{"vertices": [10, 20, 30], "timestamps": [1, 2, 3]}]


def test_bundles_emit_and_expansion(capsys, tmp_path):
    p = tmp_path / "b.txt"
    p.write_text("0 1 1\n0 1 2\n1 0 3\n")
    _, lines, _ = run(capsys, "enumerate", "--input", str(p), "--mode", "temporal", "--emit", "bundles")
    assert lines == [{"vertices": [0, 1], "hop_timestamps": [[1], [3]], "count": 1},
                     {"vertices": [0, 1], "hop_timestamps": [[2], [3]], "count": 1}]
    _, lines, _ = run(capsys, "enumerate", "--input", str(p), "--emit", "bundles")
    assert lines == [{"vertices": [0, 1], "hop_timestamps": [[1, 2], [3]], "count": 2}]
    _, lines, _ = run(capsys, "enumerate", "--input", str(p), "--emit", "bundles", "--bundles", "off")
    assert len(lines) == 2 and all(x["count"] == 1 for x in lines)


def test_hop_read_tarjan_is_a_usage_error(capsys, tri):
    code, _, err = run(capsys, "enumerate", "--input", tri, "--mode", "hop", "--hops", "3", "--algo", "read-tarjan")
    assert code == 2 and "hop mode is not supported by read-tarjan" in err


def test_tiernan_fine_is_a_usage_error(capsys, tri):
    code, _, err = run(capsys, "enumerate", "--input", tri, "--algo", "tiernan", "--parallel", "fine")
    assert code == 2 and "fine-grained" in err


def test_malformed_input(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1 2\n0 one 3\n")
    code, _, err = run(capsys, "enumerate", "--input", str(p))
    assert code == 2 and "line 2" in err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "enumerate", "--input", str(tmp_path / "nope.txt"))
    assert code == 2


def test_bad_flag_exits_two(capsys, tri):
    code, _, err = run(capsys, "enumerate", "--input", tri, "--mode", "spiral")
    assert code == 2 and "invalid choice" in err


def test_single_thread_runs_are_byte_identical(capsys, exp6):
    argv = ["enumerate", "--input", exp6, "--emit", "cycles", "--parallel", "fine", "--threads", "1", "--seed", "7"]
    cli.main(argv)
    a = capsys.readouterr().out
    cli.main(argv)
    b = capsys.readouterr().out
    assert a == b and a.count("\n") == 16


def test_thread_env_var(capsys, exp6, monkeypatch, tmp_path):
    monkeypatch.setenv("PARCYCLES_THREADS", "3")
    m = tmp_path / "m.json"
    run(capsys, "enumerate", "--input", exp6, "--parallel", "coarse", "--metrics", str(m))
    assert len(json.loads(m.read_text())["busy_ns"]) == 3
    run(capsys, "enumerate", "--input", exp6, "--parallel", "coarse", "--threads", "2", "--metrics", str(m))
    assert len(json.loads(m.read_text())["busy_ns"]) == 2


def test_metrics_csv(capsys, exp6, tmp_path):
    m = tmp_path / "m.csv"
    run(capsys, "enumerate", "--input", exp6, "--parallel", "fine", "--threads", "2", "--metrics", str(m))
    assert m.read_text().splitlines()[0] == "worker,busy_ns"


def test_verify_passes(capsys, tmp_path):
    code, lines, _ = run(capsys, "verify", "--graphs", "3", "--max-n", "6", "--dump", str(tmp_path / "r.txt"))
    assert code == 0 and lines[0]["ok"] and lines[0]["checks"] > 0


def test_verify_reports_mismatch(capsys, tmp_path, monkeypatch):
    real = cli.enumerate_cycles

    def broken(g, cons, algo="johnson", **kw):
        res = real(g, cons, algo=algo, **kw)
        if algo != "tiernan":
            res.bundles = res.bundles[1:]
        return res

    monkeypatch.setattr(cli, "enumerate_cycles", broken)
    dump = tmp_path / "repro.txt"
    code, lines, _ = run(capsys, "verify", "--graphs", "20", "--dump", str(dump))
    assert code == 1
    assert lines[-1]["reproducer"] == str(dump) and dump.exists()


def test_bench_rows_and_busy_csv(capsys, tmp_path):
    csv_path = tmp_path / "busy.csv"
    code, lines, _ = run(capsys, "bench", "--gen", "exp-cycles", "--param", "n=8", "--threads-list", "1,2",
                         "--busy-csv", str(csv_path))
    assert code == 0 and [r["threads"] for r in lines] == [1, 2]
    assert all(r["edge_visits"] > 0 for r in lines)
    assert len(csv_path.read_text().splitlines()) == 1 + 1 + 2


def test_gen_writes_edge_list(capsys, tmp_path):
    out = tmp_path / "g.txt"
    code, _, _ = run(capsys, "gen", "blocked-tail", "--param", "m=2", "--param", "k=3", "-o", str(out))
    assert code == 0 and len(out.read_text().splitlines()) == 3 + 5 * 2 + 2


def test_gen_bad_param(capsys):
    code, _, err = run(capsys, "gen", "exp-cycles", "--param", "n=two")
    assert code == 2
