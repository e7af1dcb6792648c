import json
import math
import os

import numpy as np
import pytest

from gge.errors import ParameterError
from gge.harness import (
    ExperimentConfig,
    _journal_path,
    _record_line,
    aggregate_records,
    expected_records,
    run_experiment,
    run_task,
    sample_seed,
    tasks_for,
)


def tiny_mbl_dict(**overrides):
    data = {
        "experiment": "mbl_scan", "seed": 5, "chi_list": [1, 2],
        "sizes": [6], "h_values": [1.0, 6.0], "samples": 2,
        "eigenstates_per_sample": 2,
    }
    data.update(overrides)
    return data


def test_config_rejects_unknown_keys():
    with pytest.raises(ParameterError, match="bogus"):
        ExperimentConfig.from_dict(tiny_mbl_dict(bogus=1))


def test_config_requires_seed_and_grids():
    data = tiny_mbl_dict()
    del data["seed"]
    with pytest.raises(ParameterError, match="seed"):
        ExperimentConfig.from_dict(data)
    with pytest.raises(ParameterError, match="h_values"):
        ExperimentConfig.from_dict(tiny_mbl_dict(h_values=[]))
    with pytest.raises(ParameterError, match="chi_list"):
        ExperimentConfig.from_dict(tiny_mbl_dict(chi_list=[2, 1]))
    with pytest.raises(ParameterError, match="chi_list"):
        ExperimentConfig.from_dict(tiny_mbl_dict(chi_list=[2, 4]))
    with pytest.raises(ParameterError, match="experiment"):
        ExperimentConfig.from_dict(tiny_mbl_dict(experiment="nope"))


def test_config_roundtrip_and_hash_stability():
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again.sha256() == cfg.sha256()
    other = ExperimentConfig.from_dict(tiny_mbl_dict(seed=6))
    assert other.sha256() != cfg.sha256()


def test_sample_seed_deterministic_and_distinct():
    assert sample_seed(7, 0, 1, 2) == 10040511365380042851
    seeds = {sample_seed(7, a, b, c) for a in range(2) for b in range(2) for c in range(3)}
    assert len(seeds) == 12


def test_task_enumeration_order():
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    ids = [t["id"] for t in tasks_for(cfg)]
    assert ids == [
        "n=6/h=1.0/sample=0", "n=6/h=1.0/sample=1",
        "n=6/h=6.0/sample=0", "n=6/h=6.0/sample=1",
    ]
    assert expected_records(cfg, tasks_for(cfg)[0]) == 2 * (2 + 1)


def test_record_line_is_canonical_json():
    line = _record_line({"value": 0.5, "n": 6, "experiment": "mbl_scan"})
    assert json.loads(line) == {"experiment": "mbl_scan", "n": 6, "value": 0.5}
    assert line.index("experiment") < line.index('"n"') < line.index("value")


def test_mbl_records_values_and_hierarchy():
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    recs = run_task(cfg, tasks_for(cfg)[0])
    assert len(recs) == expected_records(cfg, tasks_for(cfg)[0])
    by_eig = {}
    for r in recs:
        by_eig.setdefault(r["eigenstate"], {})[(r["value_type"], r.get("chi"))] = r
    for group in by_eig.values():
        e1 = group[("E", 1)]["value"]
        e2 = group[("E", 2)]["value"]
        de = group[("dE", None)]
        assert e1 >= e2 - 1e-12
        assert de["value"] == pytest.approx(e1 - e2, abs=1e-12)
        assert 0.0 <= group[("E", 1)]["mu"] <= 1.0


def test_run_experiment_outputs(tmp_path):
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    out = str(tmp_path / "run")
    manifest = run_experiment(cfg, out)
    assert manifest["config_sha256"] == cfg.sha256()
    assert manifest["records"] == 24
    records = [json.loads(l) for l in open(os.path.join(out, "mbl_scan.ndjson"))]
    assert len(records) == 24
    with open(os.path.join(out, "mbl_scan.csv")) as fh:
        rows = fh.read().strip().split("\n")
    assert len(rows) == 25  # header + records
    on_disk = json.load(open(os.path.join(out, "manifest.json")))
    assert on_disk == manifest
    assert not os.path.exists(_journal_path(cfg, out))
    # aggregate has one row per (h, quantity)
    agg = open(os.path.join(out, "mbl_scan_aggregate.csv")).read().strip().split("\n")
    assert len(agg) == 1 + 2 * 3


def test_parallel_run_byte_identical(tmp_path):
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run_experiment(cfg, a, workers=1)
    run_experiment(cfg, b, workers=2)
    for name in ("mbl_scan.ndjson", "mbl_scan.csv", "mbl_scan_aggregate.csv", "manifest.json"):
        with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
            assert fa.read() == fb.read(), name


def test_resume_skips_journaled_tasks(tmp_path):
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    out = str(tmp_path / "resume")
    os.makedirs(out)
    task = tasks_for(cfg)[0]
    recs = run_task(cfg, task)
    recs[0] = dict(recs[0], value=0.123456789)  # sentinel proves reuse
    with open(_journal_path(cfg, out), "w") as fh:
        for r in recs:
            fh.write(_record_line(r) + "\n")
    run_experiment(cfg, out, resume=True)
    records = [json.loads(l) for l in open(os.path.join(out, "mbl_scan.ndjson"))]
    assert records[0]["value"] == 0.123456789
    assert len(records) == 24


def test_resume_recomputes_incomplete_tasks(tmp_path):
    cfg = ExperimentConfig.from_dict(tiny_mbl_dict())
    out = str(tmp_path / "partial")
    os.makedirs(out)
    task = tasks_for(cfg)[0]
    recs = run_task(cfg, task)[:2]  # fewer than expected -> incomplete
    with open(_journal_path(cfg, out), "w") as fh:
        for r in recs:
            fh.write(_record_line(dict(r, value=99.0)) + "\n")
    run_experiment(cfg, out, resume=True)
    records = [json.loads(l) for l in open(os.path.join(out, "mbl_scan.ndjson"))]
    assert all(r["value"] != 99.0 for r in records)


def test_aggregate_mean_and_stderr():
    recs = [{"n": 6, "h": 1.0, "value_type": "E", "chi": 1, "value": v}
            for v in (0.2, 0.4, 0.9)]
    rows = aggregate_records(recs)
    assert len(rows) == 1
    assert rows[0]["mean"] == pytest.approx(0.5)
    assert rows[0]["stderr"] == pytest.approx(np.std([0.2, 0.4, 0.9], ddof=1) / math.sqrt(3))
    assert rows[0]["count"] == 3


def test_ground_state_experiment_records(tmp_path):
    cfg = ExperimentConfig.from_dict({
        "experiment": "mg_sweep", "seed": 1, "chi_list": [1, 2],
        "sizes": [6], "j2_values": [0.5],
        "solver": {"max_bond": 16, "sweeps": 8},
    })
    out = str(tmp_path / "mg")
    run_experiment(cfg, out)
    records = [json.loads(l) for l in open(os.path.join(out, "mg_sweep.ndjson"))]
    assert [r["chi"] for r in records] == [1, 2]
    # Majumdar-Ghosh point: E2 vanishes for the singlet-product ground state
    assert records[1]["value"] == pytest.approx(0.0, abs=1e-8)
    assert records[0]["value"] > 0.5
    assert all(r["converged"] for r in records)
