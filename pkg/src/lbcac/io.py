"""File formats: scenario JSON, measurement CSV, plan/path/run-log CSVs.

All server ids in files are 1-based.

Scenario file (JSON object)::

    {
      "name": "scenario2",                 # optional
      "n": 6,
      "adjacency": [[0, 1, ...], ...],     # n rows of n 0/1 entries
      "demand": [[100, 110, ...], ...],    # n rows of n numbers >= 0
      "cpu_caps": [100, ...],              # n numbers >= 0
      "mem_caps": [512, ...],              # n numbers >= 0
      "coeffs": {"alpha1": ..., "alpha2": ..., "beta1": ..., "beta2": ...},
      "weights": {"gamma": 16, "phi": 1}
    }
"""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .model import (
    CostCoefficients,
    MeasurementSample,
    ObjectiveWeights,
    ResourceCaps,
    Scenario,
    ScenarioError,
    validate_scenario,
    validate_topology,
)

NUM = "{:.9g}"


class ScenarioFileError(ScenarioError):
    pass


class DatasetFileError(ValueError):
    pass


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFileError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioFileError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _matrix(doc: dict, key: str, n: int) -> list[list[float]]:
    rows = doc.get(key)
    if not isinstance(rows, list):
        raise ScenarioFileError(f"'{key}' must be a list of {n} rows")
    if len(rows) != n:
        raise ScenarioFileError(f"'{key}' has {len(rows)} rows, expected {n}")
    out = []
    for r, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ScenarioFileError(f"'{key}' row {r}: expected {n} entries, got {got}")
        out.append([_number(v, f"'{key}' row {r}, column {c}") for c, v in enumerate(row, start=1)])
    return out


def _vector(doc: dict, key: str, n: int) -> list[float]:
    vals = doc.get(key)
    if not isinstance(vals, list) or len(vals) != n:
        raise ScenarioFileError(f"'{key}' must be a list of {n} numbers")
    return [_number(v, f"'{key}' entry {c}") for c, v in enumerate(vals, start=1)]


def _fields(doc: dict, key: str, names) -> dict[str, float]:
    obj = doc.get(key)
    if not isinstance(obj, dict):
        raise ScenarioFileError(f"'{key}' must be an object with keys {', '.join(names)}")
    missing = [k for k in names if k not in obj]
    if missing:
        raise ScenarioFileError(f"'{key}' is missing {', '.join(missing)}")
    return {k: _number(obj[k], f"'{key}.{k}'") for k in names}


def scenario_from_dict(doc: dict, name: str = "") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFileError("scenario must be a JSON object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ScenarioFileError(f"'n' must be a positive integer, got {n!r}")
    topology = validate_topology(_matrix(doc, "adjacency", n))
    demand = _matrix(doc, "demand", n)
    caps = ResourceCaps(np.array(_vector(doc, "cpu_caps", n)), np.array(_vector(doc, "mem_caps", n)))
    coeffs = CostCoefficients(**_fields(doc, "coeffs", ("alpha1", "alpha2", "beta1", "beta2")))
    weights = ObjectiveWeights(**_fields(doc, "weights", ("gamma", "phi")))
    return validate_scenario(topology, demand, caps, coeffs, weights, doc.get("name") or name)


def scenario_to_dict(scenario: Scenario) -> dict:
    co, w = scenario.coeffs, scenario.weights

    def num(x):
        x = float(x)
        return int(x) if x.is_integer() else x

    return {
        "name": scenario.name,
        "n": scenario.n,
        "adjacency": [[int(v) for v in row] for row in scenario.topology.adj],
        "demand": [[num(v) for v in row] for row in scenario.demand.demand],
        "cpu_caps": [num(v) for v in scenario.caps.cpu],
        "mem_caps": [num(v) for v in scenario.caps.mem],
        "coeffs": {"alpha1": co.alpha1, "alpha2": co.alpha2, "beta1": co.beta1, "beta2": co.beta2},
        "weights": {"gamma": w.gamma, "phi": w.phi},
    }


def bundled_scenarios() -> list[str]:
    root = resources.files("lbcac") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load a scenario file, or a bundled fixture by name (e.g. ``scenario2``)."""
    path = Path(path_or_name)
    if path.exists():
        text = path.read_text()
        name = path.stem
    else:
        ref = resources.files("lbcac") / "data" / f"{path_or_name}.json"
        if not ref.is_file():
            raise ScenarioFileError(
                f"no scenario file {str(path_or_name)!r} (bundled: {', '.join(bundled_scenarios())})"
            )
        text = ref.read_text()
        name = str(path_or_name)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc, name)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


DATASET_HEADER = ["local_calls", "relayed_calls", "cpu_used", "mem_used"]


def read_dataset(path: str | Path) -> list[MeasurementSample]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetFileError(f"{path}: empty file")
    if [h.strip() for h in rows[0]] != DATASET_HEADER:
        raise DatasetFileError(f"{path} line 1: header must be {','.join(DATASET_HEADER)}")
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise DatasetFileError(f"{path} line {lineno}: expected 4 columns, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise DatasetFileError(f"{path} line {lineno}: non-numeric entry in {row}") from None
        try:
            samples.append(MeasurementSample(*vals))
        except ValueError as exc:
            raise DatasetFileError(f"{path} line {lineno}: {exc}") from None
    if not samples:
        raise DatasetFileError(f"{path}: no samples")
    return samples


def write_dataset(samples, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATASET_HEADER)
        for s in samples:
            w.writerow([repr(s.local_calls), repr(s.relayed_calls), repr(s.cpu_used), repr(s.mem_used)])


def _fmt(x) -> str:
    return NUM.format(float(x))


def write_plan(plan, scenario: Scenario, out_dir: str | Path, paths=None, extra: dict | None = None) -> dict:
    """Write ``admitted.csv``, ``relay.csv``, ``resources.csv``, ``paths.csv`` and ``summary.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = scenario.n
    dem = scenario.demand.demand
    with open(out / "admitted.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "demanded", "admitted"])
        for i in range(n):
            for j in range(n):
                w.writerow([i + 1, j + 1, _fmt(dem[i, j]), _fmt(plan.admitted[i, j])])
    with open(out / "relay.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "k", "l", "flow"])
        for (i, j, k, l), f in sorted(plan.relay.items()):
            w.writerow([i + 1, j + 1, k + 1, l + 1, _fmt(f)])
    with open(out / "resources.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "p", "P", "m", "M"])
        for l in range(n):
            w.writerow([l + 1, _fmt(plan.cpu_use[l]), _fmt(scenario.caps.cpu[l]),
                        _fmt(plan.mem_use[l]), _fmt(scenario.caps.mem[l])])
    if paths is not None:
        write_paths(paths, out / "paths.csv")
    total = scenario.demand.total
    summary = {
        "scenario": scenario.name,
        "objective": float(plan.objective),
        "weights": {"gamma": scenario.weights.gamma, "phi": scenario.weights.phi},
        "total_demand": total,
        "total_admitted": plan.total_admitted,
        "admission_rate": plan.total_admitted / total if total > 0 else 1.0,
        "cpu_total": float(np.sum(plan.cpu_use)),
        "mem_total": float(np.sum(plan.mem_use)),
    }
    if extra:
        summary.update(extra)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def write_paths(paths, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["origin", "destination", "path", "flow"])
        for p in paths:
            w.writerow([p.commodity[0] + 1, p.commodity[1] + 1, "-".join(str(v + 1) for v in p.nodes), _fmt(p.flow)])


RUN_LOG_HEADER = ["slot", "requested", "admitted", "serviced", "blocked", "held",
                  "cpu_total", "mem_total", "objective", "compute_time"]


def write_run_log(records, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_LOG_HEADER)
        for r in records:
            w.writerow([
                r.slot_index + 1,
                r.requested,
                int(r.plan.admitted.sum()),
                int(r.serviced.sum()),
                int(r.blocked.sum()),
                int(r.held.sum()),
                _fmt(r.cpu_used.sum()),
                _fmt(r.mem_used.sum()),
                _fmt(r.plan.objective),
                f"{r.compute_time:.6f}",
            ])
