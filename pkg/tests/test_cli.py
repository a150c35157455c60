import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from qhdlab import cli, experiments
from qhdlab.errors import IntegrationError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def test_missing_group_names_field(tmp_path, capsys):
    code = cli.main(["run", _write(tmp_path, {"kind": "weyl", "d": 2})])
    assert code == 2
    assert "'group'" in capsys.readouterr().err


def test_out_of_range_parameter(tmp_path, capsys):
    code = cli.main(["run", _write(tmp_path, {"kind": "weyl", "d": 2, "group": "U1", "p": -1})])
    assert code == 2
    assert capsys.readouterr().err.startswith("config error: p:")


def test_unknown_kind_and_bad_json(tmp_path):
    assert cli.main(["run", _write(tmp_path, {"kind": "nope", "d": 1, "group": "U1"})]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2


def test_domain_problem_is_config_error(tmp_path):
    assert cli.main(["run", _write(tmp_path, {"kind": "continuity", "d": 1, "group": "U1"})]) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    def boom(cfg, workers=None):
        raise IntegrationError("step halving exhausted")

    monkeypatch.setattr(cli, "run_experiment", boom)
    assert cli.main(["run", _write(tmp_path, {"kind": "weyl", "d": 2, "group": "U1"})]) == 3
    assert "IntegrationError" in capsys.readouterr().err


def test_weyl_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["run", str(CONFIGS / "09_weyl_d2.json"), "--out-dir", str(out), "--seed", "4"])
    assert code == 0
    assert capsys.readouterr().out.startswith("PASS weyl d=2")
    rec = json.loads((out / "weyl_seed4.json").read_text(encoding="utf-8"))
    assert rec["seed"] == 4 and "timestamp" in rec and "workers" not in json.dumps(rec["config"])
    csv_bytes = (out / "weyl_seed4_ratio.csv").read_bytes()
    assert csv_bytes.startswith(b"x,y,yerr\n") and b"\r" not in csv_bytes


def test_failing_check_exit_code(tmp_path, capsys):
    code = cli.main(["run", str(CONFIGS / "10_p_criterion.json"), "--out-dir", str(tmp_path), "--quiet"])
    assert code == 1
    assert capsys.readouterr().out == ""


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write(tmp_path, {"kind": "oracle-check", "d": 1, "group": "U1", "K": 4, "N": 5000, "seed": 3})
    texts = []
    for i, w in enumerate(("1", "2")):
        out = tmp_path / f"o{i}"
        assert cli.main(["run", cfg, "--out-dir", str(out), "--workers", w, "--quiet"]) == 0
        rec = json.loads((out / "oracle-check_seed3.json").read_text(encoding="utf-8"))
        texts.append(json.dumps(experiments.canonical(rec), sort_keys=True))
    assert texts[0] == texts[1]


def test_every_config_validates():
    for path in sorted(CONFIGS.glob("*.json")):
        assert cli.validate_config(json.loads(path.read_text(encoding="utf-8"))) == [], path.name


def test_every_kind_has_schema_entry():
    kinds = set(cli.load_schema()["properties"]["kind"]["enum"])
    assert kinds == set(experiments.KINDS)


def test_module_entry_point_and_fallback_backend(tmp_path):
    env = {**os.environ, "QHDLAB_BACKEND": "python"}
    res = subprocess.run([sys.executable, "-c", "import qhdlab; print(qhdlab.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert res.stdout.strip() == "python"
    res = subprocess.run([sys.executable, "-m", "qhdlab", "run", str(CONFIGS / "02_overlap.json"),
                          "--out-dir", str(tmp_path)], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert res.stdout.startswith("PASS overlap")
