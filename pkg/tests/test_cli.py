import json
import zlib
from pathlib import Path

import numpy as np
import pytest

from prs.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, main


def run_cli(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def encoded_dir(tmp_path):
    payload = np.random.default_rng(0).bytes(400)
    src = tmp_path / "input.bin"
    src.write_bytes(payload)
    out = tmp_path / "shards"
    rc = run_cli("encode", "--input", src, "--out-dir", out, "--m", 4,
                 "--khat", 9)
    assert rc == EXIT_OK
    return out, payload


def test_encode_writes_shards_and_manifest(encoded_dir):
    out, payload = encoded_dir
    shards = sorted(out.glob("shard_*.prs1"))
    assert len(shards) == 15
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["n"] == 15 and manifest["k_hat"] == 9
    assert manifest["payload_byte_len"] == len(payload)
    assert manifest["payload_crc32"] == f"{zlib.crc32(payload):08x}"


def test_retrieve_roundtrip(encoded_dir, tmp_path, capsys):
    out, payload = encoded_dir
    dest = tmp_path / "recovered.bin"
    rc = run_cli("retrieve", "--shard-dir", out, "--out", dest, "--seed", 7)
    assert rc == EXIT_OK
    assert dest.read_bytes() == payload
    doc = json.loads(capsys.readouterr().out)
    assert doc["outcome"] == "success"
    assert doc["nodes_accessed"] == 9


def test_retrieve_with_corruption_and_crashes(encoded_dir, tmp_path, capsys):
    out, payload = encoded_dir
    dest = tmp_path / "recovered.bin"
    rc = run_cli("retrieve", "--shard-dir", out, "--out", dest, "--seed", 3,
                 "--corrupt-list", "1,8", "--crash-list", "2")
    assert rc == EXIT_OK
    assert dest.read_bytes() == payload
    doc = json.loads(capsys.readouterr().out)
    assert doc["nodes_accessed"] <= 9 + 2 * 2  # at most one stage per corruption


def test_retrieve_all_corrupt_fails(encoded_dir, tmp_path):
    out, _ = encoded_dir
    dest = tmp_path / "recovered.bin"
    rc = run_cli("retrieve", "--shard-dir", out, "--out", dest, "--seed", 1,
                 "--corrupt-list", ",".join(str(j) for j in range(15)))
    assert rc == EXIT_FAIL
    assert not dest.exists()


def test_retrieve_too_few_shards(tmp_path, encoded_dir):
    out, _ = encoded_dir
    keep = {0, 3, 5, 7}
    sparse = tmp_path / "sparse"
    sparse.mkdir()
    for path in out.glob("shard_*.prs1"):
        pos = int(path.stem.split("_")[1])
        if pos in keep:
            (sparse / path.name).write_bytes(path.read_bytes())
    rc = run_cli("retrieve", "--shard-dir", sparse, "--out",
                 tmp_path / "x.bin", "--seed", 0)
    assert rc == EXIT_ERROR


def test_encode_validation(tmp_path):
    src = tmp_path / "input.bin"
    src.write_bytes(b"data")
    rc = run_cli("encode", "--input", src, "--out-dir", tmp_path / "o",
                 "--m", 4, "--khat", 15)  # k_hat >= n
    assert rc == EXIT_ERROR
    rc = run_cli("encode", "--input", tmp_path / "missing.bin", "--out-dir",
                 tmp_path / "o", "--m", 4, "--khat", 9)
    assert rc == EXIT_ERROR


def test_encode_empty_file(tmp_path):
    src = tmp_path / "empty.bin"
    src.write_bytes(b"")
    out = tmp_path / "shards"
    assert run_cli("encode", "--input", src, "--out-dir", out, "--m", 4,
                   "--khat", 9) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["group_count"] == 1


def test_analyze_paper_point(tmp_path, capsys):
    dest = tmp_path / "analytic.json"
    rc = run_cli("analyze", "--n", 1023, "--khat", 401, "--p", 0.01,
                 "--out", dest)
    assert rc == EXIT_OK
    doc = json.loads(dest.read_text())
    assert abs(doc["avg_accesses"] - 409.2) < 0.3
    capsys.readouterr()


def test_analyze_p_zero(capsys):
    rc = run_cli("analyze", "--n", 31, "--khat", 9, "--p", 0)
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["avg_accesses"] == pytest.approx(9.0)


def test_analyze_with_crashes(capsys):
    rc = run_cli("analyze", "--n", 31, "--khat", 9, "--p", 0.1, "--s", 6)
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["s"] == 6


def test_analyze_validation():
    assert run_cli("analyze", "--n", 15, "--khat", 20, "--p", 0.1) == EXIT_ERROR
    assert run_cli("analyze", "--n", 15, "--khat", 4, "--p", 2.0) == EXIT_ERROR


def test_simulate_json_csv_plot(tmp_path, capsys):
    dest = tmp_path / "sim.json"
    rc = run_cli("simulate", "--n", 31, "--khat", 9, "--m", 5, "--p", 0.1,
                 "--trials", 60, "--seed", 5, "--out", dest, "--check",
                 "--plot")
    assert rc == EXIT_OK
    doc = json.loads(dest.read_text())
    assert doc["trials"] == 60
    csv = (tmp_path / "sim.csv").read_text()
    assert csv.startswith("accesses,frequency")
    assert (tmp_path / "sim.png").exists()
    capsys.readouterr()


def test_simulate_rejects_bad_n():
    assert run_cli("simulate", "--n", 30, "--khat", 9, "--m", 5, "--p", 0.1,
                   "--trials", 5) == EXIT_ERROR


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for dest in (a, b):
        assert run_cli("simulate", "--n", 31, "--khat", 9, "--m", 5, "--p",
                       0.2, "--trials", 40, "--seed", 9, "--out", dest) == EXIT_OK
    assert a.read_text() == b.read_text()


def test_bench_smoke(tmp_path, capsys):
    dest = tmp_path / "bench.csv"
    rc = run_cli("bench", "--algorithms", "ird,restart,genie", "--n", 31,
                 "--khat", 9, "--m", 5, "--p", "0.1", "--trials", 3,
                 "--seed", 2, "--out", dest, "--plot")
    assert rc == EXIT_OK
    lines = dest.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert {"algorithm", "p", "elp_s", "chien_s", "inv_mat_s"} <= set(header)
    assert len(lines) == 1 + 3
    assert (tmp_path / "bench.png").exists()
    capsys.readouterr()


def test_bench_unknown_algorithm():
    assert run_cli("bench", "--algorithms", "magic", "--n", 31, "--khat", 9,
                   "--m", 5, "--p", "0.1", "--trials", 2) == EXIT_ERROR
