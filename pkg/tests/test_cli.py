import json

import numpy as np
import pytest

from slabsolve.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_REFUSED, main
from slabsolve.config import parse_config
from slabsolve.experiments import run


def _write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_bratu_threshold_record(tmp_path):
    assert main(["bratu-threshold", "--out", str(tmp_path), "-q"]) == EXIT_OK
    data = json.loads((tmp_path / "bratu-threshold.json").read_text())
    assert abs(data["values"]["lambda_star_n2_half"]["value"] - 1.13429) <= 1e-4
    assert data["values"]["lambda_star_n2_half"]["provenance"].startswith("formula:")
    audit = [c for c in data["checks"] if c["name"] == "lambda_star_coefficient"][0]
    assert audit["gating"] is False and audit["label"] == "reported"
    assert any("discrepancy" in n for n in data["notes"])


def test_conformal_record_contains_threshold(tmp_path):
    cfg = _write(tmp_path, "[conformal]\nresolution = 8\n")
    assert main(["conformal", "--config", cfg, "--out", str(tmp_path), "-q"]) == EXIT_OK
    data = json.loads((tmp_path / "conformal.json").read_text())
    assert abs(data["values"]["threshold"]["value"] - 0.1452) <= 1e-3
    rows = np.loadtxt(tmp_path / "conformal.exhaustion.dat")
    assert rows.shape == (7, 3)
    assert np.all(np.diff(rows[:, 1]) >= 0)


def test_dat_header_has_config_hash(tmp_path):
    main(["bratu-solve", "--config", _write(tmp_path, "[bratu-solve]\nresolution = 100\n"),
          "--out", str(tmp_path), "-q"])
    head = (tmp_path / "bratu-solve.profile.dat").read_text().splitlines()[:3]
    digest = json.loads((tmp_path / "bratu-solve.json").read_text())["config_hash"]
    assert head[1] == f"# config-hash {digest}"
    assert head[2] == "# r u"


def test_scaling_rows(tmp_path):
    cfg = _write(tmp_path, "[sublinear-scaling]\ndims = 2, 3, 4\nresolution = 100\n")
    assert main(["sublinear-scaling", "--config", cfg, "--out", str(tmp_path), "-q"]) == EXIT_OK
    rows = np.loadtxt(tmp_path / "sublinear-scaling.scaling.dat")
    assert rows[:, 0].tolist() == [2, 3, 4]
    assert np.all(rows[:, 1] <= rows[:, 2])


def test_byte_identical_output(tmp_path):
    cfg = _write(tmp_path, "[slab]\nm_max = 2\nresolution = 8\n")
    for sub in ("a", "b"):
        assert main(["slab", "--config", cfg, "--out", str(tmp_path / sub), "-q"]) == EXIT_OK
    for name in ("slab.json", "slab.exhaustion.dat", "slab.window.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_workers_do_not_change_results(tmp_path, monkeypatch):
    cfg = parse_config("[sublinear-scaling]\ndims = 2, 3\nresolution = 80\n", "sublinear-scaling")
    serial, _ = run(cfg)
    monkeypatch.setenv("SLABSOLVE_WORKERS", "2")
    parallel, _ = run(cfg)
    assert serial.to_dict() == parallel.to_dict()


def test_refusal_exit_code(tmp_path):
    cfg = _write(tmp_path, "[bratu-solve]\nlam = 1.2\nresolution = 100\n")
    assert main(["bratu-solve", "--config", cfg, "--out", str(tmp_path), "-q"]) == EXIT_REFUSED
    assert main(["bratu-solve", "--config", cfg, "--force", "--out", str(tmp_path), "-q"]) == EXIT_OK


def test_config_error_exit_code(tmp_path, monkeypatch):
    bad = _write(tmp_path, "[bratu-solve]\nlam = x\n")
    assert main(["bratu-solve", "--config", bad, "-q"]) == EXIT_CONFIG
    assert main(["bratu-solve", "--config", str(tmp_path / "none.ini"), "-q"]) == EXIT_CONFIG
    monkeypatch.setenv("SLABSOLVE_WORKERS", "0")
    assert main(["bratu-threshold", "-q", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_check_failure_exit_code(tmp_path):
    # a scaling band of 1 cannot hold across dimensions
    cfg = _write(tmp_path, "[sublinear-scaling]\ndims = 2, 8\nresolution = 80\nband = 1.0\n")
    assert main(["sublinear-scaling", "--config", cfg, "--out", str(tmp_path), "-q"]) == EXIT_FAILED


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["bratu-threshold", "--out", str(blocker / "sub"), "-q"]) == EXIT_FAILED


def test_unknown_experiment_is_usage_error():
    with pytest.raises(SystemExit):
        main(["newton"])


def test_verify_quick(tmp_path):
    cfg = _write(tmp_path, "[verify]\nquick = true\nsamples = 6\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path), "-q"]) == EXIT_OK
