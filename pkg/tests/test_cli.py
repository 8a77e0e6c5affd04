"""End-to-end CLI tests on deliberately small configurations."""

import json
import os

import numpy as np
import pytest

from bolab.cli import main


def _write_ini(path, section, values):
    lines = ["[%s]" % section]
    lines += ["%s = %s" % (k, v) for k, v in values.items()]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_identities_exit_zero(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "identities",
                     {"n": 1024, "half_length": 64.0})
    out = tmp_path / "out"
    code = main(["identities", "--config", cfg, "--out", str(out),
                 "--quiet"])
    assert code == 0
    assert (out / "identities.csv").exists()
    report = json.loads((out / "identities.json").read_text())
    assert all(r["passed"] for r in report["reports"])
    manifest = json.loads((out / "identities_manifest.json").read_text())
    assert set(manifest["outputs"]) == {"identities.csv", "identities.json"}


def test_identities_unknown_key_exit_two(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "identities", {"banana": 3})
    code = main(["identities", "--config", cfg,
                 "--out", str(tmp_path / "out"), "--quiet"])
    assert code == 2


def test_identities_tiny_grid_refused(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "identities", {"n": 8})
    code = main(["identities", "--config", cfg,
                 "--out", str(tmp_path / "out"), "--quiet"])
    assert code == 2


def test_missing_config_exit_two(tmp_path):
    code = main(["identities", "--config", str(tmp_path / "absent.ini"),
                 "--out", str(tmp_path / "out"), "--quiet"])
    assert code == 2


def test_solve_gaussian_small(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "solve",
                     {"preset": "gaussian", "n": 512, "half_length": 64.0,
                      "dt": 1e-3, "t_end": 0.1, "snapshots": 5})
    out = tmp_path / "out"
    code = main(["solve", "--config", cfg, "--out", str(out), "--quiet"])
    assert code == 0
    assert (out / "norm_series.csv").exists()
    assert (out / "final_state.bof").exists()
    manifest = json.loads((out / "solve_manifest.json").read_text())
    assert manifest["conservation_drift"]["I2"] < 1e-8
    assert "first_moment_fit" in manifest


def test_solve_unstable_dt_exit_two(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "solve",
                     {"preset": "gaussian", "n": 512, "half_length": 64.0,
                      "dt": 1.0, "t_end": 1.0})
    code = main(["solve", "--config", cfg, "--out", str(tmp_path / "out"),
                 "--quiet"])
    assert code == 2


def test_persistence_small_ladder(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "persistence",
                     {"family": "gaussian", "r_list": "1.0",
                      "dt": 1e-3, "t_end": 0.02, "dx": 0.125,
                      "base_half_length": 8.0, "budgets": "false"})
    out = tmp_path / "out"
    code = main(["persistence", "--config", cfg, "--out", str(out),
                 "--ladder-levels", "3", "--quiet"])
    assert code == 0
    report = json.loads((out / "persistence_report.json").read_text())
    assert report["entries"][0]["verdict"] == "PERSISTS"


def test_weights_small_scan(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "weights",
                     {"beta_list": "0.2,0.6", "audit_caps": "16",
                      "n": 1024, "half_length": 256.0})
    out = tmp_path / "out"
    code = main(["weights", "--config", cfg, "--out", str(out), "--quiet"])
    assert code == 0
    text = (out / "a2_scan.csv").read_text()
    assert "finite" in text and "divergent" in text


def test_commutators_small(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "commutators",
                     {"n": 512, "half_length": 64.0, "trials": 5})
    out = tmp_path / "out"
    code = main(["commutators", "--config", cfg, "--out", str(out),
                 "--seed", "3", "--quiet"])
    assert code == 0
    lines = (out / "commutator_ratios.csv").read_text().splitlines()
    assert len(lines) == 7     # header + six inequality families


def test_determinism_byte_identical(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "commutators",
                     {"n": 512, "half_length": 64.0, "trials": 5})
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        code = main(["commutators", "--config", cfg, "--out", str(out),
                     "--seed", "11", "--quiet"])
        assert code == 0
        outs.append(out)
    # every data artifact is byte identical; manifests carry timestamps
    # and are excluded by design
    for name in os.listdir(outs[0]):
        if name.endswith("manifest.json"):
            continue
        b0 = (outs[0] / name).read_bytes()
        b1 = (outs[1] / name).read_bytes()
        assert b0 == b1, "artifact %s differs between identical runs" % name


def test_seed_changes_ensemble_output(tmp_path):
    cfg = _write_ini(tmp_path / "c.ini", "commutators",
                     {"n": 512, "half_length": 64.0, "trials": 5})
    digests = []
    for seed in ("1", "2"):
        out = tmp_path / ("s" + seed)
        main(["commutators", "--config", cfg, "--out", str(out),
              "--seed", seed, "--quiet"])
        digests.append((out / "commutator_ratios.csv").read_bytes())
    assert digests[0] != digests[1]
