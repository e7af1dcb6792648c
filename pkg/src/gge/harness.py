"""Experiment harness: seeded sweeps over model parameters, record files
and manifests for the AKLT sweep, Majumdar-Ghosh sweep, anisotropic-Haldane
phase grid and the MBL scans.

Records are written as newline-delimited JSON plus a flat CSV view, in a
canonical task order, so identical (config, seed) runs produce
byte-identical files regardless of worker scheduling. A journal file of
completed tasks is appended during the run and consumed by ``--resume``.
"""

import concurrent.futures
import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ParameterError
from . import hamiltonians as ham
from . import measures
from .solvers import DmrgConfig, dmrg_ground_state, sector_mid_spectrum

EXPERIMENTS = ("aklt_sweep", "mg_sweep", "haldane_grid", "mbl_scan", "mbl_scatter")

# master column order for CSV views; records omit fields they do not use
FIELD_ORDER = [
    "experiment", "task", "model", "n", "j_aklt", "j1", "j2", "j", "d", "e",
    "h", "sample", "sample_seed", "eigenstate", "mu", "energy",
    "chi", "chi_lo", "chi_hi", "value_type", "value", "raw_value",
    "fidelity", "converged",
]

_COMMON_KEYS = {"experiment", "seed", "chi_list", "sizes", "solver", "out_dir"}
_EXPERIMENT_KEYS = {
    "aklt_sweep": _COMMON_KEYS | {"j_aklt_values"},
    "mg_sweep": _COMMON_KEYS | {"j1", "j2_values"},
    "haldane_grid": _COMMON_KEYS | {"j", "d_values", "e_values"},
    "mbl_scan": _COMMON_KEYS | {"j", "h_values", "samples", "eigenstates_per_sample"},
    "mbl_scatter": _COMMON_KEYS | {"j", "h_values", "samples", "eigenstates_per_sample"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see ``from_dict`` for the schema."""

    experiment: str
    seed: int
    chi_list: tuple
    sizes: tuple
    solver: DmrgConfig
    out_dir: str | None = None
    extra: dict = field(default_factory=dict)

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ParameterError("config must be a mapping")
        exp = data.get("experiment")
        if exp not in EXPERIMENTS:
            raise ParameterError(
                f"field 'experiment' must be one of {list(EXPERIMENTS)}, got {exp!r}"
            )
        allowed = _EXPERIMENT_KEYS[exp]
        unknown = set(data) - allowed
        if unknown:
            raise ParameterError(f"unknown config keys for {exp}: {sorted(unknown)}")
        if "seed" not in data:
            raise ParameterError("field 'seed' is required (no silent nondeterminism)")
        seed = int(data["seed"])
        if "chi_list" not in data:
            raise ParameterError("field 'chi_list' is required")
        chi_list = tuple(int(c) for c in data["chi_list"])
        if not chi_list or any(c < 1 for c in chi_list):
            raise ParameterError("field 'chi_list' must be a non-empty list of positive ints")
        if list(chi_list) != sorted(set(chi_list)):
            raise ParameterError("field 'chi_list' must be strictly ascending")
        sizes = tuple(int(n) for n in data.get("sizes", ()))
        if not sizes:
            raise ParameterError("field 'sizes' must be a non-empty list")
        solver = DmrgConfig.from_dict(data.get("solver", {}))
        extra = {}
        for key in sorted(set(data) - _COMMON_KEYS):
            extra[key] = data[key]
        _validate_extra(exp, chi_list, extra)
        return ExperimentConfig(
            experiment=exp, seed=seed, chi_list=chi_list, sizes=sizes,
            solver=solver, out_dir=data.get("out_dir"), extra=extra,
        )

    def to_dict(self) -> dict:
        out = {
            "experiment": self.experiment,
            "seed": self.seed,
            "chi_list": list(self.chi_list),
            "sizes": list(self.sizes),
            "solver": self.solver.to_dict(),
        }
        if self.out_dir is not None:
            out["out_dir"] = self.out_dir
        out.update(self.extra)
        return out

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _require_list(extra, key, kind=float):
    if key not in extra:
        raise ParameterError(f"field {key!r} is required")
    values = [kind(v) for v in extra[key]]
    if not values:
        raise ParameterError(f"field {key!r} must be non-empty")
    return values


def _validate_extra(exp, chi_list, extra):
    if exp == "aklt_sweep":
        extra["j_aklt_values"] = _require_list(extra, "j_aklt_values")
    elif exp == "mg_sweep":
        extra["j2_values"] = _require_list(extra, "j2_values")
        extra["j1"] = float(extra.get("j1", 1.0))
    elif exp == "haldane_grid":
        extra["d_values"] = _require_list(extra, "d_values")
        extra["e_values"] = _require_list(extra, "e_values")
        extra["j"] = float(extra.get("j", 1.0))
    else:  # mbl_scan / mbl_scatter
        extra["h_values"] = _require_list(extra, "h_values")
        extra["j"] = float(extra.get("j", 1.0))
        for key in ("samples", "eigenstates_per_sample"):
            if key not in extra:
                raise ParameterError(f"field {key!r} is required")
            extra[key] = int(extra[key])
            if extra[key] < 1:
                raise ParameterError(f"field {key!r} must be >= 1")
        if chi_list[0] != 1:
            raise ParameterError("field 'chi_list' must start at 1 for MBL experiments")


def load_config(path: str) -> ExperimentConfig:
    import yaml

    with open(path) as fh:
        data = yaml.safe_load(fh)
    return ExperimentConfig.from_dict(data)


def sample_seed(master_seed: int, *indices) -> int:
    """Derived 64-bit seed for one disorder sample; pure function of its
    coordinates, so samples can be generated independently."""
    ss = np.random.SeedSequence([int(master_seed)] + [int(i) for i in indices])
    return int(ss.generate_state(1, np.uint64)[0])


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# task enumeration and execution

def tasks_for(cfg: ExperimentConfig) -> list:
    """Canonically ordered list of independent work units."""
    out = []
    if cfg.experiment == "aklt_sweep":
        for n in cfg.sizes:
            for j in cfg.extra["j_aklt_values"]:
                out.append({"id": f"n={n}/j_aklt={_fmt(j)}", "n": n, "j_aklt": j})
    elif cfg.experiment == "mg_sweep":
        for n in cfg.sizes:
            for j2 in cfg.extra["j2_values"]:
                out.append({"id": f"n={n}/j2={_fmt(j2)}", "n": n, "j2": j2})
    elif cfg.experiment == "haldane_grid":
        for n in cfg.sizes:
            for d in cfg.extra["d_values"]:
                for e in cfg.extra["e_values"]:
                    out.append({"id": f"n={n}/d={_fmt(d)}/e={_fmt(e)}",
                                "n": n, "d": d, "e": e})
    else:
        for n in cfg.sizes:
            for hi, h in enumerate(cfg.extra["h_values"]):
                for s in range(cfg.extra["samples"]):
                    out.append({"id": f"n={n}/h={_fmt(h)}/sample={s}",
                                "n": n, "h": h, "h_index": hi, "sample": s})
    return out


def expected_records(cfg: ExperimentConfig, task: dict) -> int:
    nchi = len(cfg.chi_list)
    if cfg.experiment in ("aklt_sweep", "mg_sweep", "haldane_grid"):
        return nchi
    k = cfg.extra["eigenstates_per_sample"]
    if cfg.experiment == "mbl_scatter":
        return k * nchi
    npairs = sum(1 for c in cfg.chi_list if c > 1)
    return k * (nchi + npairs)


def run_task(cfg: ExperimentConfig, task: dict) -> list:
    """Execute one work unit, returning its records in canonical order."""
    if cfg.experiment in ("aklt_sweep", "mg_sweep", "haldane_grid"):
        return _run_ground_state_task(cfg, task)
    return _run_mbl_task(cfg, task)


def _run_ground_state_task(cfg, task) -> list:
    n = task["n"]
    if cfg.experiment == "aklt_sweep":
        spec = ham.extended_haldane(n, task["j_aklt"])
        params = {"j_aklt": task["j_aklt"]}
    elif cfg.experiment == "mg_sweep":
        spec = ham.j1j2(n, cfg.extra["j1"], task["j2"])
        params = {"j1": cfg.extra["j1"], "j2": task["j2"]}
    else:
        spec = ham.anisotropic_haldane(n, cfg.extra["j"], task["d"], task["e"])
        params = {"j": cfg.extra["j"], "d": task["d"], "e": task["e"]}
    result = dmrg_ground_state(ham.to_mpo(spec), cfg.solver)
    records = []
    for chi in cfg.chi_list:
        ge = measures.geometric_entanglement(result.state, chi)
        rec = {"experiment": cfg.experiment, "task": task["id"], "model": spec.model,
               "n": n, **params, "chi": chi, "value_type": "E",
               "value": ge.value, "fidelity": ge.fidelity,
               "energy": result.energy, "converged": result.converged}
        records.append(rec)
    return records


def _run_mbl_task(cfg, task) -> list:
    n, h = task["n"], task["h"]
    j = cfg.extra["j"]
    seed = sample_seed(cfg.seed, cfg.sizes.index(n), task["h_index"], task["sample"])
    spec, _ = ham.disordered_heisenberg(n, j, h * j, seed)
    k = cfg.extra["eigenstates_per_sample"]
    records = []
    for idx, (mu, energy, state) in enumerate(sector_mid_spectrum(spec, k)):
        ge_by_chi = {}
        for chi in cfg.chi_list:
            ge = measures.geometric_entanglement(state, chi)
            ge_by_chi[chi] = ge
            records.append({
                "experiment": cfg.experiment, "task": task["id"],
                "model": spec.model, "n": n, "j": j, "h": h,
                "sample": task["sample"], "sample_seed": seed,
                "eigenstate": idx, "mu": mu, "energy": energy,
                "chi": chi, "value_type": "E", "value": ge.value,
                "fidelity": ge.fidelity, "converged": True,
            })
        if cfg.experiment == "mbl_scan":
            e1 = ge_by_chi[1].value
            for chi in cfg.chi_list:
                if chi == 1:
                    continue
                raw = e1 - ge_by_chi[chi].value
                records.append({
                    "experiment": cfg.experiment, "task": task["id"],
                    "model": spec.model, "n": n, "j": j, "h": h,
                    "sample": task["sample"], "sample_seed": seed,
                    "eigenstate": idx, "mu": mu, "energy": energy,
                    "chi_lo": 1, "chi_hi": chi, "value_type": "dE",
                    "value": max(raw, 0.0), "raw_value": raw, "converged": True,
                })
    return records


# ---------------------------------------------------------------------------
# record files

def _record_line(rec: dict) -> str:
    ordered = {key: rec[key] for key in FIELD_ORDER if key in rec}
    return json.dumps(ordered)


def write_outputs(cfg: ExperimentConfig, records_by_task: dict, out_dir: str) -> dict:
    """Write NDJSON, CSV, optional aggregate view and the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, cfg.experiment)
    ordered = []
    for task in tasks_for(cfg):
        ordered.extend(records_by_task[task["id"]])
    with open(base + ".ndjson", "w") as fh:
        for rec in ordered:
            fh.write(_record_line(rec) + "\n")
    columns = [key for key in FIELD_ORDER if any(key in r for r in ordered)]
    with open(base + ".csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for rec in ordered:
            writer.writerow([_fmt(rec[c]) if c in rec else "" for c in columns])
    if cfg.experiment == "mbl_scan":
        _write_aggregate(cfg, ordered, base + "_aggregate.csv")
    manifest = {
        "experiment": cfg.experiment,
        "config_sha256": cfg.sha256(),
        "seed": cfg.seed,
        "version": __version__,
        "records": len(ordered),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def aggregate_records(records) -> list:
    """Mean and standard error of E / dE grouped by (n, h, chi or pair)."""
    groups = {}
    for rec in records:
        key = (rec["n"], rec["h"], rec["value_type"],
               rec.get("chi"), rec.get("chi_lo"), rec.get("chi_hi"))
        groups.setdefault(key, []).append(rec["value"])
    rows = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        values = groups[key]
        n_vals = len(values)
        mean = sum(values) / n_vals
        var = sum((v - mean) ** 2 for v in values) / (n_vals - 1) if n_vals > 1 else 0.0
        stderr = math.sqrt(var / n_vals) if n_vals > 1 else 0.0
        rows.append({"n": key[0], "h": key[1], "value_type": key[2],
                     "chi": key[3], "chi_lo": key[4], "chi_hi": key[5],
                     "mean": mean, "stderr": stderr, "count": n_vals})
    return rows


def _write_aggregate(cfg, records, path):
    rows = aggregate_records(records)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "h", "value_type", "chi", "chi_lo", "chi_hi",
                         "mean", "stderr", "count"])
        for row in rows:
            writer.writerow([_fmt(row[c]) if row[c] is not None else ""
                             for c in ("n", "h", "value_type", "chi", "chi_lo",
                                       "chi_hi", "mean", "stderr", "count")])


# ---------------------------------------------------------------------------
# experiment driver

def _journal_path(cfg: ExperimentConfig, out_dir: str) -> str:
    return os.path.join(out_dir, cfg.experiment + ".journal.ndjson")


def _load_journal(cfg: ExperimentConfig, out_dir: str) -> dict:
    path = _journal_path(cfg, out_dir)
    done = {}
    if not os.path.exists(path):
        return done
    by_task = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            by_task.setdefault(rec["task"], []).append(rec)
    by_id = {t["id"]: t for t in tasks_for(cfg)}
    for task_id, recs in by_task.items():
        task = by_id.get(task_id)
        if task is not None and len(recs) == expected_records(cfg, task):
            done[task_id] = recs
    return done


def _worker(args):
    cfg_dict, task = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    return task["id"], run_task(cfg, task)


def run_experiment(cfg: ExperimentConfig, out_dir: str, workers: int = 1,
                   resume: bool = False) -> dict:
    """Run all tasks, journal completed ones and write canonical outputs.

    On failure the journal of completed tasks is preserved; a ``resume``
    run skips tasks whose records are already journaled.
    """
    os.makedirs(out_dir, exist_ok=True)
    done = _load_journal(cfg, out_dir) if resume else {}
    journal = _journal_path(cfg, out_dir)
    if not resume and os.path.exists(journal):
        os.remove(journal)
    todo = [t for t in tasks_for(cfg) if t["id"] not in done]
    mode = "a" if resume else "w"
    with open(journal, mode) as jf:
        def record_done(task_id, records):
            for rec in records:
                jf.write(_record_line(rec) + "\n")
            jf.flush()
            done[task_id] = records

        if workers <= 1:
            for task in todo:
                task_id, records = _worker((cfg.to_dict(), task))
                record_done(task_id, records)
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_worker, (cfg.to_dict(), t)) for t in todo]
                for fut in concurrent.futures.as_completed(futures):
                    task_id, records = fut.result()
                    record_done(task_id, records)
    manifest = write_outputs(cfg, done, out_dir)
    os.remove(journal)
    return manifest
