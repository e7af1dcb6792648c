import json
import os

import pytest
import yaml

import gge
from gge.cli import OUT_DIR_ENV, main


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({
        "experiment": "mbl_scan", "seed": 3, "chi_list": [1, 2],
        "sizes": [6], "h_values": [4.0], "samples": 1,
        "eigenstates_per_sample": 1,
    }))
    return str(path)


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == gge.__version__


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    names = capsys.readouterr().out.split()
    assert names == ["aklt_sweep", "mg_sweep", "haldane_grid", "mbl_scan", "mbl_scatter"]


def test_validate_config_ok(tiny_config, capsys):
    assert main(["validate-config", "--config", tiny_config]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_config_missing_file():
    with pytest.raises(SystemExit) as exc:
        main(["validate-config", "--config", "/no/such/file.yaml"])
    assert exc.value.code == 2


def test_validate_config_unknown_key(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("experiment: mg_sweep\nseed: 1\nchi_list: [1]\n"
                    "sizes: [6]\nj2_values: [0.5]\nwat: 1\n")
    with pytest.raises(SystemExit) as exc:
        main(["validate-config", "--config", str(path)])
    assert exc.value.code == 2
    assert "wat" in capsys.readouterr().err


def test_run_writes_records(tiny_config, tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(["run", "--config", tiny_config, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "mbl_scan.ndjson"))
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["seed"] == 3
    assert manifest["version"] == gge.__version__
    assert "wrote" in capsys.readouterr().out


def test_env_var_overrides_out_dir(tiny_config, tmp_path, monkeypatch):
    out = str(tmp_path / "env_out")
    monkeypatch.setenv(OUT_DIR_ENV, out)
    assert main(["run", "--config", tiny_config]) == 0
    assert os.path.exists(os.path.join(out, "mbl_scan.ndjson"))


def test_out_flag_beats_env_var(tiny_config, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "ignored"))
    out = str(tmp_path / "flag_out")
    assert main(["run", "--config", tiny_config, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "mbl_scan.ndjson"))
    assert not os.path.exists(str(tmp_path / "ignored"))


def test_run_resume_flag(tiny_config, tmp_path):
    out = str(tmp_path / "resume_out")
    assert main(["run", "--config", tiny_config, "--out", out]) == 0
    assert main(["run", "--config", tiny_config, "--out", out, "--resume"]) == 0


def test_bad_worker_count(tiny_config, tmp_path):
    assert main(["run", "--config", tiny_config, "--out", str(tmp_path / "x"),
                 "--workers", "0"]) == 2
