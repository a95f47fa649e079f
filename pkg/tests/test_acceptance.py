"""Acceptance suite: one PASS/FAIL line per criterion, printed at the end of the module.

Run alone with ``pytest tests/test_acceptance.py -v`` (the summary lines are
written to the terminal even without ``-s``).
"""

import csv
import time
from pathlib import Path

import numpy as np
import pytest

from _instances import ROUNDED_TOL, SWEEP_SEEDS, diamond, two_path_split, plan_from, random_instance
from lbcac import calibration
from lbcac.admission import solve_admission, verify_plan
from lbcac.cli import main, monotonic_violations, sweep_rows
from lbcac.flowpaths import decompose, round_plan
from lbcac.model import (
    DEFAULT_SWEEP,
    DEFAULT_COEFFS,
    ObjectiveWeights,
    ResourceCaps,
    reference_scenario,
    validate_scenario,
    validate_topology,
)
from lbcac.oracle import solve_path_lp

RESULTS: dict[int, tuple[bool, str]] = {}
MODULE_START = time.perf_counter()

TITLES = {
    1: "coefficient fixtures",
    2: "oracle equivalence",
    3: "loop suppression",
    4: "weight monotonicity",
    5: "single-server closed form",
    6: "two-path split fixture",
    7: "rounding feasibility",
    8: "scenario-level reproduction",
    9: "performance",
    10: "determinism",
}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = ["", "acceptance criteria"]
    for k in sorted(TITLES):
        ok, detail = RESULTS.get(k, (False, "not run"))
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] {k:>2}. {TITLES[k]}: {detail}")
    for line in lines:
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)


def record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    assert ok, f"criterion {k} ({TITLES[k]}): {detail}"


_SWEEP = {}


def sweep():
    """Arc LP and path LP on the seeded random instances (shared by criteria 2, 3 and 7)."""
    if not _SWEEP:
        t0 = time.perf_counter()
        rows = []
        for seed in SWEEP_SEEDS:
            sc = random_instance(seed)
            plan = solve_admission(sc)
            ref = solve_path_lp(sc)
            rows.append((sc, plan, ref))
        _SWEEP["rows"] = rows
        _SWEEP["seconds"] = time.perf_counter() - t0
    return _SWEEP["rows"], _SWEEP["seconds"]


def test_criterion_01_coefficients():
    t0 = time.perf_counter()
    data = calibration.generate_synthetic_dataset(DEFAULT_COEFFS, h=100, seed=0)
    cpu = calibration.estimate_cpu_coeffs(data)
    mem = calibration.estimate_mem_coeffs(data)
    elapsed = time.perf_counter() - t0
    err = max(abs(cpu.coeffs[0] - 0.074104), abs(cpu.coeffs[1] - 0.025896),
              abs(mem.coeffs[0] - 0.327393), abs(mem.coeffs[1] - 0.184607))
    sums = f"{sum(cpu.coeffs):.4f}", f"{sum(mem.coeffs):.4f}"
    ok = err <= 1e-6 and sums == ("0.1000", "0.5120") and elapsed < 1.0
    record(1, ok, f"max coefficient error {err:.2e}, sums {sums[0]} / {sums[1]}, {elapsed:.3f} s")


def test_criterion_02_oracle_equivalence():
    rows, seconds = sweep()
    gaps = [abs(plan.objective - ref.objective) for _, plan, ref in rows]
    ok = len(rows) >= 100 and max(gaps) <= 1e-6 and seconds < 120
    record(2, ok, f"{len(rows)} instances, max gap {max(gaps):.2e}, {seconds:.1f} s")


def test_criterion_03_loop_suppression():
    rows, _ = sweep()
    residual = [decompose(plan, sc.topology)[1].residual_flow for sc, plan, _ in rows]
    record(3, max(residual) <= 1e-6, f"max residual loop flow {max(residual):.2e} over {len(rows)} optima")


def test_criterion_04_monotonicity():
    problems = []
    table = []
    for k in (1, 2, 3):
        adm, _ = sweep_rows(reference_scenario(k), DEFAULT_SWEEP)
        problems += monotonic_violations(adm)
        table.append("/".join(f"{r['admitted']:.0f}" for r in adm))
    record(4, not problems, "admitted f1-f4: " + ", ".join(table) + (f"; {problems}" if problems else ""))


def test_criterion_05_single_server():
    worst = 0.0
    points = 0
    for demand in (500, 1000, 1500, 2000, 3000):
        for cpu_cap, mem_cap in ((100, 512), (50, 512), (100, 200), (200, 1000)):
            weights = ObjectiveWeights(1, 0) if points % 2 == 0 else ObjectiveWeights(16, 1)
            # admitting a call must be worth more than its resource penalty
            assert weights.gamma / demand > weights.phi * (DEFAULT_COEFFS.alpha1 / cpu_cap + DEFAULT_COEFFS.beta1 / mem_cap)
            sc = validate_scenario(validate_topology([[0]]), [[demand]], ResourceCaps.uniform(1, cpu_cap, mem_cap),
                                   DEFAULT_COEFFS, weights)
            expected = min(demand, cpu_cap / DEFAULT_COEFFS.alpha1, mem_cap / DEFAULT_COEFFS.beta1)
            worst = max(worst, abs(solve_admission(sc).admitted[0, 0] - expected))
            points += 1
    record(5, points == 20 and worst <= 1e-6, f"{points} grid points, max error {worst:.2e}")


def test_criterion_06_two_path_split():
    sc, plan = two_path_split()
    paths, report = decompose(plan, sc.topology)
    got = sorted(([v + 1 for v in p.nodes], p.flow) for p in paths)
    rounded = round_plan(plan, sc)
    rpaths, _ = decompose(rounded)
    rgot = sorted(([v + 1 for v in p.nodes], p.flow) for p in rpaths)
    ok = (got == [([1, 2, 4, 6], 16.3), ([1, 3, 5, 6], 11.2)] and report.residual_flow == 0
          and rgot == [([1, 2, 4, 6], 16.0), ([1, 3, 5, 6], 11.0)] and rounded.admitted[0, 5] == 27)
    record(6, ok, f"paths {got}, rounded {rgot}, C16={rounded.admitted[0, 5]:g}")


def test_criterion_07_rounding_feasibility():
    rows, _ = sweep()
    failures = [sc.name for sc, plan, _ in rows if not verify_plan(round_plan(plan, sc), sc, ROUNDED_TOL).feasible]
    sc, plan = diamond()
    naive = plan_from(sc, np.floor(plan.admitted), {k: float(np.floor(f)) for k, f in plan.relay.items()})
    naive_gap = verify_plan(naive, sc, ROUNDED_TOL).violations["II"]
    path_ok = verify_plan(round_plan(plan, sc), sc, ROUNDED_TOL).feasible
    ok = not failures and naive_gap > 0 and path_ok
    record(7, ok, f"{len(rows) - len(failures)}/{len(rows)} rounded optima feasible; per-arc flooring breaks "
                  f"conservation by {naive_gap:g}, path flooring feasible: {path_ok}")


def test_criterion_08_scenario_reproduction(tmp_path, capsys):
    code = main(["sweep", "--scenario", "scenario1", "--scenario", "scenario2", "--scenario", "scenario3",
                 "--out", str(tmp_path)])
    report = capsys.readouterr().out
    with capsys.disabled():
        print("\n" + report)
    with open(tmp_path / "sweep_admission.csv", newline="") as fh:
        rates = {(r["scenario"], r["label"]): float(r["admission_rate"]) for r in csv.DictReader(fh)}
    side_by_side = "57.41%" in report and "89.00%" in report and "1638" in report
    s1 = rates[("scenario1", "f4")]
    s3 = rates[("scenario3", "f4")]
    ok = code == 0 and side_by_side and s1 == pytest.approx(1.0, abs=1e-9) and s3 < 1.0
    record(8, ok, f"scenario 1 at f4: {100 * s1:.2f}% (need 100%), scenario 3 at f4: {100 * s3:.2f}% "
                  f"(need < 100%), published figures printed: {side_by_side}")


def strip_compute_time(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    drop = rows[0].index("compute_time")
    return [r[:drop] + r[drop + 1:] for r in rows]


def snapshot(root: Path):
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            rel = str(p.relative_to(root))
            out[rel] = strip_compute_time(p) if p.name == "run_log.csv" else p.read_bytes()
    return out


def run_every_command(root: Path):
    root.mkdir()
    data = root / "dataset.csv"
    commands = [
        ["generate-dataset", "--out", str(data), "--samples", "50", "--seed", "3", "--noise", "0.1"],
        ["calibrate", "--dataset", str(data), "--out", str(root / "coeffs.json")],
        ["plan", "--scenario", "scenario3", "--out", str(root / "plan"), "--rounded", "--oracle-check"],
        ["sweep", "--scenario", "scenario2", "--scenario", "scenario3", "--out", str(root / "sweep")],
        ["simulate", "--scenario", "scenario3", "--out", str(root / "sim"), "--slots", "10", "--seed", "9",
         "--overhead", "0.004", "--jitter", "0.3", "--hold-on", "--weights", "1:1"],
    ]
    return [main(c) for c in commands]


def test_criterion_10_determinism(tmp_path, capsys):
    codes = [run_every_command(tmp_path / f"run{k}") for k in (1, 2)]
    capsys.readouterr()
    a, b = snapshot(tmp_path / "run1"), snapshot(tmp_path / "run2")
    differing = sorted(k for k in a if a[k] != b.get(k))
    csvs = sum(1 for k in a if k.endswith(".csv"))
    ok = codes == [[0] * 5, [0] * 5] and a.keys() == b.keys() and not differing
    record(10, ok, f"{len(a)} files ({csvs} CSV) identical across reruns" if ok else f"differ: {differing[:5]}")


def test_criterion_09_performance():
    # runs last so the suite duration covers every other criterion
    t0 = time.perf_counter()
    solve_admission(reference_scenario(3))
    single = time.perf_counter() - t0
    suite = time.perf_counter() - MODULE_START
    record(9, single <= 5.0 and suite <= 300.0, f"n=6 plan solve {single:.3f} s, acceptance suite {suite:.1f} s")
