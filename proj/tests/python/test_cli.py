import json
import os
import shutil
import subprocess

import pytest

CLI = os.environ.get("MRFSDP_CLI") or shutil.which("mrfsdp")

pytestmark = pytest.mark.skipif(CLI is None, reason="mrfsdp executable not found")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture
def instance(tmp_path):
    path = tmp_path / "instance.json"
    truth = tmp_path / "truth.json"
    proc = run("gen", "--rows", 3, "--cols", 3, "--labels", 3, "--seed", 4,
               "--out", path, "--truth-out", truth)
    assert proc.returncode == 0, proc.stderr
    return path, truth


def test_gen_writes_a_valid_instance(instance):
    path, truth = instance
    doc = json.loads(path.read_text())
    assert doc["num_nodes"] == 9
    assert doc["num_labels"] == 3
    assert len(doc["binary"]) == 12
    assert len(json.loads(truth.read_text())["labeling"]) == 9


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("gen", "--rows", 4, "--cols", 5, "--labels", 3, "--seed", 9,
                   "--out", out).returncode == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("method", ["fuses", "dars", "icm", "exact"])
def test_solve_and_eval(instance, tmp_path, method):
    path, truth = instance
    exact = tmp_path / "exact.json"
    result = tmp_path / f"{method}.json"
    assert run("solve", "--instance", path, "--method", "exact",
               "--out", exact).returncode == 0
    proc = run("solve", "--instance", path, "--method", method, "--out", result)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    doc = json.loads(result.read_text())
    assert doc["method"] == method
    assert len(doc["labeling"]) == 9

    proc = run("eval", "--result", result, "--exact", exact, "--truth", truth)
    assert proc.returncode == 0, proc.stdout
    metrics = json.loads(proc.stdout)
    f_opt = json.loads(exact.read_text())["energy"]
    assert metrics["f_opt"] == pytest.approx(f_opt)
    assert metrics["rounding_gap_pct"] >= -1e-9
    if doc["f_relaxed"] is not None:
        assert doc["f_relaxed"] <= f_opt + 1e-9


def test_export_matrix(instance, tmp_path):
    path, _ = instance
    for encoding, dim in (("zo", 12), ("pm", 28)):
        out = tmp_path / f"{encoding}.txt"
        proc = run("export-matrix", "--instance", path, "--encoding", encoding,
                   "--out", out)
        assert proc.returncode == 0, proc.stdout
        lines = out.read_text().splitlines()
        _, rows, cols, nnz, _ = lines[0].split()
        assert (int(rows), int(cols)) == (dim, dim)
        assert int(nnz) == len(lines) - 1


def test_bench_writes_tables(tmp_path):
    out = tmp_path / "bench.csv"
    proc = run("bench", "--grids", "2x2,3x3", "--labels", "2", "--seeds", "0-1",
               "--methods", "fuses,icm", "--out", out)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert len(out.read_text().splitlines()) == 1 + 2 * 2
    assert (tmp_path / "bench_gap_vs_n.csv").exists()
    assert (tmp_path / "bench_gap_vs_k.csv").exists()


def test_invalid_input_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num_nodes": 2}')
    proc = run("solve", "--instance", bad)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["kind"] == "invalid_input"
    assert run("solve", "--instance", tmp_path / "missing.json").returncode == 2
    assert run("solve", "--no-such-flag").returncode == 2


def test_numerical_failure_exits_3(tmp_path):
    huge = tmp_path / "huge.json"
    huge.write_text(json.dumps({
        "num_nodes": 2, "num_labels": 2,
        "unary": [{"node": 0, "label": 0, "weight": 1e308},
                  {"node": 1, "label": 1, "weight": 1e308}],
        "binary": [{"i": 0, "j": 1, "weight": 1e308}],
    }))
    proc = run("solve", "--instance", huge, "--method", "fuses")
    assert proc.returncode == 3
    assert json.loads(proc.stderr)["error"]["kind"] == "numerical"


def test_size_refusal_exits_4(tmp_path):
    path = tmp_path / "big.json"
    assert run("gen", "--rows", 5, "--cols", 5, "--labels", 4,
               "--out", path).returncode == 0
    proc = run("solve", "--instance", path, "--method", "exact",
               "--exact-budget", 10)
    assert proc.returncode == 4
    assert json.loads(proc.stderr)["error"]["kind"] == "size_refusal"


def test_repeated_solves_match_except_timings(instance, tmp_path):
    path, _ = instance
    docs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert run("solve", "--instance", path, "--method", "dars", "--seed", 3,
                   "--out", out).returncode == 0
        doc = json.loads(out.read_text())
        doc.pop("timings")
        docs.append(doc)
    assert docs[0] == docs[1]
