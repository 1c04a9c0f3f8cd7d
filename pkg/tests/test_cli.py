from __future__ import annotations

import json

import pytest

from ctqwva import __version__, cli


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _header(path):
    return [line for line in path.read_text().splitlines() if line.startswith("#")]


def test_hamming_scaling_output_and_header(tmp_path):
    cfg = _write(tmp_path, "c.json", {"n": [1, 2], "m": [3, 8]})
    assert cli.main(["hamming-scaling", "--config", cfg, "--out", str(tmp_path), "--seed", "5"]) == 0
    out = tmp_path / "hamming-scaling.csv"
    header = _header(out)
    assert f"# version={__version__}" in header and "# seed=5" in header
    assert any(h.startswith("# config_hash=") for h in header)
    rows = [line.split(",") for line in out.read_text().splitlines() if not line.startswith("#")]
    assert rows[0][:3] == ["n", "m", "prob_star"]
    assert float(rows[1][2]) == pytest.approx(1.0)
    assert all(float(r[5]) < 1e-6 for r in rows[1:])


def test_reruns_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, "c.json", {"graphs": ["hamming_3_5", "complete_128"]})
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["graph-report", "--config", cfg, "--out", str(a)]) == 0
    assert cli.main(["graph-report", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "graph-report.csv").read_bytes() == (b / "graph-report.csv").read_bytes()


def test_unknown_config_key_is_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"graphz": []})
    assert cli.main(["graph-report", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "graphz" in capsys.readouterr().err


def test_unknown_algorithm_is_config_error(tmp_path):
    cfg = _write(tmp_path, "c.json", {"algorithm": "grover"})
    assert cli.main(["run-qva", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_run_qva_writes_runs_and_states(tmp_path):
    cfg = _write(
        tmp_path,
        "c.json",
        {"algorithm": "qwoa-cs", "instance": {"synthetic": {"n": 5, "A": 1}}, "p": 1, "repeats": 2, "max_iter": 30},
    )
    assert cli.main(["run-qva", "--config", cfg, "--out", str(tmp_path), "--workers", "2"]) == 0
    runs = (tmp_path / "run-qva.csv").read_text().splitlines()
    assert len([r for r in runs if not r.startswith("#")]) == 3
    assert len(runs[-1].split(",")[-1].split()) == 3
    assert (tmp_path / "run-qva-states-p1.csv").exists()


def test_msv_sampled_records_seed(tmp_path):
    cfg = _write(tmp_path, "c.json", {"mode": "sampled", "k": 16, "instance": "ScheduleB"})
    assert cli.main(["msv", "--config", cfg, "--out", str(tmp_path), "--seed", "3"]) == 0
    body = [r for r in (tmp_path / "msv.csv").read_text().splitlines() if not r.startswith("#")]
    assert all(r.endswith(",3") for r in body[1:])


def test_ingest_prices_round_trip(tmp_path):
    prices = tmp_path / "px.csv"
    prices.write_text("date,A,B,C\n1,10,20,5\n2,11,19,5.5\n3,12,21,5.2\n")
    assert cli.main(["ingest-prices", str(prices), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "px.json").read_text())
    assert doc["type"] == "portfolio" and len(doc["r"]) == 3


def test_bad_prices_file_is_config_error(tmp_path):
    prices = tmp_path / "px.csv"
    prices.write_text("date,A\n1,10\n")
    assert cli.main(["ingest-prices", str(prices), "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_run_qva_ladder_protocol(tmp_path):
    cfg = _write(
        tmp_path, "c.json",
        {"algorithm": "qmoa", "instance": "ScheduleB", "p": [2, 1], "repeats": 1, "max_iter": 20, "protocol": "ladder"},
    )
    assert cli.main(["run-qva", "--config", cfg, "--out", str(tmp_path)]) == 0
    body = [r.split(",") for r in (tmp_path / "run-qva.csv").read_text().splitlines() if not r.startswith("#")]
    assert [r[1] for r in body[1:]] == ["1", "2"]
    bad = _write(tmp_path, "b.json", {"protocol": "ladder", "hybrid_times": "subshell"})
    assert cli.main(["run-qva", "--config", bad, "--out", str(tmp_path)]) == cli.EXIT_CONFIG
