"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

from qhdlab import experiments

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
RESULTS = {}


def _config(name, **overrides):
    cfg = json.loads((CONFIGS / f"{name}.json").read_text(encoding="utf-8"))
    cfg.update(overrides)
    return cfg


def _record(n, title, passed, detail):
    line = f"[{n:2d}] {'PASS' if passed else 'FAIL'} {title}: {detail}"
    RESULTS[n] = line
    print(line)
    assert passed, line


def _summary(rec):
    return "; ".join(experiments.check_lines(rec))


def _run(name, **overrides):
    return experiments.run_experiment(_config(name, **overrides))


def test_01_abelian_oracle():
    t0 = time.perf_counter()
    rec = _run("01_oracle_check")
    took = time.perf_counter() - t0
    _record(1, "abelian holonomy oracle", rec["passed"] and took < 60, f"{_summary(rec)}; runtime {took:.1f}s")


def test_02_overlap():
    rec = _run("02_overlap")
    _record(2, "coherent overlap vs quadrature", rec["passed"], _summary(rec))


def test_03_dyson():
    rec = _run("03_dyson")
    _record(3, "Dyson remainder and term bounds", rec["passed"], _summary(rec))


def test_04_convergence():
    rec = _run("04_convergence")
    _record(4, "cutoff convergence", rec["passed"], _summary(rec))


def test_05_translation_continuity():
    rec = _run("05_translation_continuity")
    _record(5, "translation small-shift law", rec["passed"], _summary(rec))


def test_06_holonomy_continuity():
    rec = _run("06_continuity")
    _record(6, "holonomy continuity", rec["passed"], _summary(rec))


def test_07_infinitesimal():
    rec = _run("07_infinitesimal")
    _record(7, "infinitesimal consistency", rec["passed"], _summary(rec))


def test_08_energy():
    rec = _run("08_energy")
    names = {c["name"] for c in rec["checks"]}
    ok = rec["passed"] and {"worked-value", "spectral-weight-value"} <= names
    _record(8, "heat-kernel electric operator", ok, _summary(rec))


def test_09_weyl():
    recs = [_run("09_weyl_d2"), _run("09_weyl_d3")]
    _record(9, "Weyl law d=2,3", all(r["passed"] for r in recs), "; ".join(_summary(r) for r in recs))


def test_10_p_criterion():
    rec = _run("10_p_criterion")
    _record(10, "p-criterion tail", rec["passed"], _summary(rec))


def test_11_envelope():
    rec = _run("11_envelope")
    _record(11, "support envelopes", rec["passed"], _summary(rec))


def test_12_support_crossover():
    rec = _run("12_support")
    d = rec["data"]
    detail = f"{_summary(rec)}; stated threshold 2p-d = {d['stated_threshold']:g}"
    _record(12, "support crossover", rec["passed"], detail)


def test_13_conjugation():
    rec = _run("13_conjugation")
    _record(13, "conjugation relation", rec["passed"], _summary(rec))


def test_14_determinism(tmp_path):
    cases = {
        "oracle-check": {"kind": "oracle-check", "d": 1, "group": "U1", "K": 8, "N": 20000, "seed": 7},
        "conjugation": {"kind": "conjugation", "d": 2, "group": "SU2", "K": 6, "N": 9000, "seed": 7,
                        "params": {"instances": 2}},
        "support": {"kind": "support", "d": 1, "group": "U1", "p": 1.0, "N": 600, "seed": 7},
    }
    same, notes = True, []
    for name, cfg in cases.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        texts = []
        for w in (1, 3):
            out = tmp_path / f"{name}_w{w}"
            subprocess.run([sys.executable, "-m", "qhdlab", "run", str(path), "--out-dir", str(out),
                            "--workers", str(w), "--quiet"], check=False)
            rec = json.loads((out / f"{cfg['kind']}_seed7.json").read_text(encoding="utf-8"))
            texts.append(json.dumps(experiments.canonical(rec), sort_keys=True))
        same &= texts[0] == texts[1]
        notes.append(f"{name}: {'identical' if texts[0] == texts[1] else 'DIFFERENT'}")
    _record(14, "worker-count determinism", same, ", ".join(notes))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
