import json
import subprocess
import sys

import pytest

from depthcore import cli


def run(argv):
    return cli.main(list(argv))


def test_no_command_is_usage_error(capsys):
    assert run([]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    assert "usage" in capsys.readouterr().out


def test_sample_roundtrip(tmp_path):
    out = tmp_path / "cloud.csv"
    assert run(["sample", "--preset", "fig1d-mixture6", "--n", "200",
                "--seed", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x0" and len(lines) == 201


def test_sample_threads_inert(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sample", "--preset", "fig2d-crater", "--n", "150", "--seed", "7"]
    assert run(base + ["--threads", "1", "--out", str(a)]) == 0
    assert run(base + ["--threads", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_bad_preset(tmp_path, capsys):
    assert run(["sample", "--preset", "fig9", "--n", "10",
                "--out", str(tmp_path / "c.csv")]) == 1
    assert "preset" in capsys.readouterr().err


def test_graph_missing_cloud(tmp_path, capsys):
    assert run(["graph", "--cloud", str(tmp_path / "nope.csv"), "--r", "0.2",
                "--out", str(tmp_path / "e.csv")]) == 1
    err = capsys.readouterr().err
    assert "error" in err


def test_graph_and_centrality_pipeline(tmp_path):
    cloud = tmp_path / "cloud.csv"
    edges = tmp_path / "edges.csv"
    scores = tmp_path / "scores.csv"
    assert run(["sample", "--preset", "fig1d-mixture6", "--n", "400",
                "--seed", "0", "--out", str(cloud)]) == 0
    assert run(["graph", "--cloud", str(cloud), "--r", "0.3",
                "--out", str(edges)]) == 0
    assert edges.read_text().splitlines()[0] == "src,dst"
    assert run(["centrality", "--cloud", str(cloud), "--r", "0.3",
                "--measure", "h_iterate(2)", "--out", str(scores)]) == 0
    lines = scores.read_text().splitlines()
    assert lines[0] == "vertex,score" and len(lines) == 401


def test_centrality_bad_measure(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(["sample", "--preset", "fig1d-mixture6", "--n", "50", "--seed", "0",
         "--out", str(cloud)])
    assert run(["centrality", "--cloud", str(cloud), "--r", "0.3",
                "--measure", "h_iterate(x)",
                "--out", str(tmp_path / "s.csv")]) == 1
    assert "measure" in capsys.readouterr().err


def test_centrality_edge_cap_resource_exit(tmp_path, capsys):
    cloud = tmp_path / "cloud.csv"
    run(["sample", "--preset", "fig1d-mixture6", "--n", "2000", "--seed", "0",
         "--out", str(cloud)])
    assert run(["centrality", "--cloud", str(cloud), "--r", "1.0",
                "--edge-cap", "10", "--out", str(tmp_path / "s.csv")]) == 3
    assert "edge" in capsys.readouterr().err


def test_continuum_c0_requires_r_sequence(tmp_path, capsys):
    assert run(["continuum", "--preset", "fig1d-mixture6", "--field", "C0",
                "--out", str(tmp_path / "f.csv")]) == 1
    assert "r-sequence" in capsys.readouterr().err


def test_continuum_bad_h(tmp_path, capsys):
    assert run(["continuum", "--preset", "fig1d-mixture6", "--field", "f_r",
                "--r", "0.2", "--h", "-1",
                "--out", str(tmp_path / "f.csv")]) == 1
    assert "h" in capsys.readouterr().err


def test_continuum_field_csv(tmp_path):
    out = tmp_path / "fr.csv"
    assert run(["continuum", "--preset", "fig1d-mixture6", "--field", "f_r",
                "--r", "0.25", "--h", "0.02", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x0,value"
    meta = json.loads((tmp_path / "fr.csv.json").read_text())
    assert meta["tag"].startswith("f_r") and meta["r"] == 0.25


def test_experiment_requires_config(tmp_path, capsys):
    assert run(["experiment", "kmax", "--out", str(tmp_path / "k.csv")]) == 1
    assert "--config" in capsys.readouterr().err


def test_experiment_kmax_tiny(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "density": {"preset": "fig1d-mixture6"}, "n_values": [60, 120],
        "r_rule": [0.3], "k_values": ["inf"], "repetitions": 2,
        "seed_base": 0, "regime": "rzero", "name": "cli-tiny"}))
    out = tmp_path / "kmax.csv"
    assert run(["experiment", "kmax", "--config", str(cfg),
                "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,r,seed,k_inf")
    assert len([ln for ln in lines if not ln.startswith("#")]) == 5


def test_selftest_command(capsys):
    assert run(["selftest"]) == 0
    assert "ok" in capsys.readouterr().out


def test_threads_env_invalid(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("DEPTHCORE_THREADS", "abc")
    assert run(["sample", "--preset", "fig1d-mixture6", "--n", "10",
                "--out", str(tmp_path / "c.csv")]) == 1
    assert "DEPTHCORE_THREADS" in capsys.readouterr().err


def test_console_script_installed():
    proc = subprocess.run(["depthcore", "selftest"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert "ok" in proc.stdout
