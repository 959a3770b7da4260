import hashlib
import json
import subprocess
import sys

import pytest

from qdln import cli, registry
from qdln.cli import EXIT_ERROR, EXIT_INVALID, EXIT_OK, EXIT_PARTIAL, main, shipped_config

BUDGET = str(shipped_config("efficiency_budget"))


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def budget_doc(**params):
    doc = json.loads(open(BUDGET).read())
    doc["params"].update(params)
    return doc


@pytest.mark.parametrize("name", list(registry.EXPERIMENTS))
def test_shipped_configs_validate(name, capsys):
    assert main(["validate", str(shipped_config(name))]) == EXIT_OK
    assert capsys.readouterr().out.strip() == f"ok: {name}"


def test_validate_reports_every_violation_with_path(tmp_path, capsys):
    doc = budget_doc(beta=1.7, taper="high")
    doc["bogus"] = 1
    assert main(["validate", "--config", write(tmp_path, doc)]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "params.beta" in err and "params.taper" in err and "bogus" in err
    assert len([ln for ln in err.splitlines() if ln.startswith("invalid:")]) == 3


def test_validate_unknown_experiment_lists_registered(tmp_path, capsys):
    assert main(["validate", write(tmp_path, {"experiment": "warp_drive", "params": {}})]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "warp_drive" in err and all(n in err for n in registry.EXPERIMENTS)


def test_validate_semantic_checks(tmp_path, capsys):
    doc = json.loads(shipped_config("bragg_spectrum").read_text())
    doc["params"]["radius"] = 260e-9
    assert main(["validate", write(tmp_path, doc)]) == EXIT_INVALID
    assert "params.geometry" in capsys.readouterr().err
    doc = json.loads(shipped_config("taper_sweep").read_text())
    doc["params"]["lengths"] = [5e-6, 2e-6]
    assert main(["validate", write(tmp_path, doc)]) == EXIT_INVALID
    assert "strictly increasing" in capsys.readouterr().err


def test_validate_bad_files(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "missing.json")]) == EXIT_INVALID
    p = tmp_path / "broken.json"
    p.write_text("{nope")
    assert main(["validate", str(p)]) == EXIT_INVALID
    assert "invalid JSON" in capsys.readouterr().err


def test_list_is_stable(capsys):
    main(["list"])
    first = capsys.readouterr().out
    main(["list"])
    assert capsys.readouterr().out == first
    assert [ln.split()[0] for ln in first.splitlines()] == list(registry.EXPERIMENTS)
    main(["list", "--json"])
    items = json.loads(capsys.readouterr().out)
    assert [i["name"] for i in items] == list(registry.EXPERIMENTS)
    assert all(i["description"] for i in items)


def test_budget_run_writes_artifacts(tmp_path):
    assert main(["run", BUDGET, "--out", str(tmp_path)]) == EXIT_OK
    d = tmp_path / "efficiency_budget"
    summary = json.loads((d / "summary.json").read_text())
    res = summary["results"]
    assert res["total_on_chip"] == pytest.approx(0.34085, abs=1e-15)
    assert res["total_on_chip_percent"] == "34%"
    assert res["ideal_collection_percent"] == "9%"
    assert res["excess_loss_ratio"] == pytest.approx(0.242, abs=1e-3)
    assert summary["converged"] is True
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((d / name).read_bytes()).hexdigest() == digest
    assert set(manifest["versions"]) >= {"qdln", "python", "numpy", "kernel_backend"}
    assert not list(d.glob(".*.tmp"))


def test_rerun_is_byte_identical(tmp_path):
    cfg = str(shipped_config("g2_pipeline"))
    doc = json.loads(open(cfg).read())
    doc["params"]["events"] = 200000
    p = write(tmp_path, doc)
    out = []
    for k in range(2):
        assert main(["run", p, "--out", str(tmp_path / f"r{k}")]) == EXIT_OK
        d = tmp_path / f"r{k}" / "g2_pipeline"
        out.append({f.name: f.read_bytes() for f in d.iterdir() if f.name != "manifest.json"})
    assert out[0] == out[1]
    assert {"g2_histogram.csv", "g2_histogram.json", "summary.json"} <= set(out[0])


def test_seed_override_changes_output(tmp_path):
    doc = json.loads(shipped_config("g2_pipeline").read_text())
    doc["params"]["events"] = 200000
    p = write(tmp_path, doc)
    main(["run", p, "--out", str(tmp_path / "a")])
    main(["run", p, "--out", str(tmp_path / "b"), "--seed", "7"])
    a = (tmp_path / "a" / "g2_pipeline" / "g2_histogram.csv").read_bytes()
    b = (tmp_path / "b" / "g2_pipeline" / "g2_histogram.csv").read_bytes()
    assert a != b
    m = json.loads((tmp_path / "b" / "g2_pipeline" / "manifest.json").read_text())
    assert m["config"]["seed"] == 7


def test_out_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert main(["run", BUDGET]) == EXIT_OK
    assert (tmp_path / "env" / "efficiency_budget" / "summary.json").exists()


def test_partial_result_exit_code(tmp_path, monkeypatch, capsys):
    def runner(params, ctx):
        return registry.Outcome({"x.csv": (["a"], [[1.0]])}, {"value": 1.0}, ["taper_length=1e-05"])

    exp = registry.EXPERIMENTS["efficiency_budget"]
    monkeypatch.setitem(registry.EXPERIMENTS, "efficiency_budget", registry.Experiment(exp.name, exp.description, runner))
    assert main(["run", BUDGET, "--out", str(tmp_path)]) == EXIT_PARTIAL
    assert "unconverged: taper_length=1e-05" in capsys.readouterr().err
    m = json.loads((tmp_path / "efficiency_budget" / "manifest.json").read_text())
    assert m["status"] == "partial" and m["unconverged"] == ["taper_length=1e-05"]


def test_runtime_error_names_module(tmp_path, monkeypatch, capsys):
    from qdln.experiments import ExperimentError

    def runner(params, ctx):
        raise ExperimentError("boom")

    exp = registry.EXPERIMENTS["efficiency_budget"]
    monkeypatch.setitem(registry.EXPERIMENTS, "efficiency_budget", registry.Experiment(exp.name, exp.description, runner))
    assert main(["run", BUDGET, "--out", str(tmp_path)]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert err.startswith("error: qdln.experiments") and "ExperimentError: boom" in err


def test_run_rejects_bad_overrides(tmp_path):
    assert main(["run", BUDGET, "--out", str(tmp_path), "--threads", "0"]) == EXIT_INVALID


def test_atomic_write_leaves_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "f.txt"
    cli.atomic_write(target, "old")

    def fail(*a):
        raise OSError("disk full")

    monkeypatch.setattr(cli.os, "replace", fail)
    with pytest.raises(OSError):
        cli.atomic_write(target, "new")
    assert target.read_text() == "old"
    assert list(tmp_path.iterdir()) == [target]


def test_csv_and_json_formatting():
    assert cli.csv_text(["a", "b"], [[0.1, True]]) == "a,b\n0.1,true\n"
    assert json.loads(cli.dumps({"x": float("nan")})) == {"x": None}


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "qdln.cli", "validate", BUDGET], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "ok: efficiency_budget"
