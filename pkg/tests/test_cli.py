import json

import pytest

from bvm_uq.cli import canonical_hash, main


def run_cli(*args):
    return main(list(args))


def write_cfg(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_missing_config_is_config_error(tmp_path):
    assert run_cli("forward", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "out")) == 2


def test_malformed_json_is_config_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run_cli("forward", "--config", str(path),
                   "--out", str(tmp_path / "out")) == 2


def test_rejects_small_alpha(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 2.0, "tau": 1.0, "J": 4},
        "sigma": 1.0,
    })
    assert run_cli("asymptotics", "--config", cfg,
                   "--out", str(tmp_path / "out")) == 2


def test_rejects_nonpositive_sigma(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 6.0, "tau": 1.0, "J": 4},
        "sigma": -2.0,
    })
    assert run_cli("sample", "--config", cfg,
                   "--out", str(tmp_path / "out")) == 2


def test_rejects_burn_in_past_length(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 6.0, "tau": 1.0, "J": 4},
        "sigma": 1.0,
        "design": {"kind": "grid", "sqrt_n": 4},
        "chain": {"S": 100, "burn_in": 100},
    })
    assert run_cli("sample", "--config", cfg,
                   "--out", str(tmp_path / "out")) == 2


def test_forward_command_outputs(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {"problem": {"m": 32}})
    out = tmp_path / "out"
    assert run_cli("forward", "--config", cfg, "--out", str(out)) == 0
    assert (out / "u_field.csv").exists()
    report = json.loads((out / "error_report.json").read_text())
    assert report["within_bound"] is True
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_hash"] == canonical_hash({"problem": {"m": 32}})
    assert "u_field.csv" in manifest["outputs"]


def test_asymptotics_command_outputs(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 6.0, "beta": 8.0, "tau": 1.0, "J": 4},
        "N_sweep": [100, 1000],
    })
    out = tmp_path / "out"
    assert run_cli("asymptotics", "--config", cfg, "--out", str(out)) == 0
    assert (out / "sweep.csv").exists()
    rep = json.loads((out / "report_N100.json").read_text())
    assert 0.0 <= rep["t_N"] < rep["s_N"]


def test_sample_command_outputs(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 6.0, "tau": 1.0, "J": 4},
        "sigma": 5.0,
        "design": {"kind": "grid", "sqrt_n": 5},
        "chain": {"S": 120, "burn_in": 20},
        "gamma": 0.05,
    })
    out = tmp_path / "out"
    assert run_cli("sample", "--config", cfg, "--out", str(out), "--seed", "7") == 0
    for name in ("states.csv", "trace.csv", "summary.json", "histogram.csv",
                 "markers.json", "manifest.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["seed"] == 7


def test_coverage_command_outputs(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "problem": {"m": 32},
        "prior": {"alpha": 6.0, "tau": 1.0, "J": 4},
        "sigma": 5.0,
        "design": {"kind": "grid", "sqrt_n": 5},
        "chain": {"S": 100, "burn_in": 20},
        "replicates": 3,
        "gamma": 0.05,
    })
    out = tmp_path / "out"
    assert run_cli("coverage", "--config", cfg, "--out", str(out)) == 0
    report = json.loads((out / "coverage.json").read_text())
    assert report["replicates"] == 3
    assert (out / "replicates.csv").exists()


def test_canonical_hash_is_order_insensitive():
    assert canonical_hash({"a": 1, "b": 2}) == canonical_hash({"b": 2, "a": 1})
    assert canonical_hash({"a": 1}) != canonical_hash({"a": 2})


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("BVM_UQ_THREADS", "not-an-int")
    cfg = write_cfg(tmp_path, "c.json", {"problem": {"m": 32}})
    with pytest.raises(ValueError):
        run_cli("forward", "--config", cfg, "--out", str(tmp_path / "out"))
