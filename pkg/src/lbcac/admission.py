"""Admission/routing LP over per-arc relay flows.

For every commodity (origin ``i``, destination ``j``) the LP carries one relay
variable per usable arc. Arcs that enter the origin are never created, and
local calls never relay. Each node pays ``alpha2``/``beta2`` once for every
relay arc it sits on, so a transit node pays twice per unit of flow and the
two endpoints pay once each.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import lp as lpmod
from .lp import EQ, LE, LinearProgram
from .model import AdmissionPlan, Scenario, _frozen

CLEAN_EPS = 1e-12


class InfeasibleModel(RuntimeError):
    pass


class SolverFailure(RuntimeError):
    pass


@dataclass
class VariableIndex:
    """Two-way map between LP columns and the semantic admission variables."""

    C: dict[tuple[int, int], int] = field(default_factory=dict)
    R: dict[tuple[int, int, int, int], int] = field(default_factory=dict)
    p: dict[int, int] = field(default_factory=dict)
    m: dict[int, int] = field(default_factory=dict)
    labels: list[tuple] = field(default_factory=list)

    def _add(self, lp: LinearProgram, table: dict, key, label: tuple, name: str, upper=np.inf) -> int:
        col = lp.add_variable(name, 0.0, upper)
        table[key] = col
        self.labels.append(label)
        return col

    def __len__(self) -> int:
        return len(self.labels)


def commodities(scenario: Scenario) -> list[tuple[int, int]]:
    """Outbound origin/destination pairs with positive demand."""
    dem = scenario.demand.demand
    n = scenario.n
    return [(i, j) for i in range(n) for j in range(n) if i != j and dem[i, j] > 0]


def admissible_arcs(scenario: Scenario, origin: int) -> list[tuple[int, int]]:
    return [(k, l) for k, l in scenario.topology.arcs() if l != origin]


def build_admission_lp(scenario: Scenario) -> tuple[LinearProgram, VariableIndex]:
    n = scenario.n
    dem = scenario.demand.demand
    caps = scenario.caps
    co = scenario.coeffs
    w = scenario.weights
    lp = LinearProgram()
    idx = VariableIndex()

    for i in range(n):
        for j in range(n):
            idx._add(lp, idx.C, (i, j), ("C", i, j), f"C({i + 1},{j + 1})")
    comms = commodities(scenario)
    for i, j in comms:
        for k, l in admissible_arcs(scenario, i):
            idx._add(lp, idx.R, (i, j, k, l), ("R", i, j, k, l), f"R({i + 1},{j + 1},{k + 1},{l + 1})")
    for l in range(n):
        idx._add(lp, idx.p, l, ("p", l), f"p({l + 1})")
    for l in range(n):
        idx._add(lp, idx.m, l, ("m", l), f"m({l + 1})")

    total_demand = float(dem.sum())
    obj: dict[int, float] = {}
    if total_demand > 0:
        for col in idx.C.values():
            obj[col] = w.gamma / total_demand
    cpu_total, mem_total = float(caps.cpu.sum()), float(caps.mem.sum())
    if cpu_total > 0:
        for col in idx.p.values():
            obj[col] = -w.phi / cpu_total
    if mem_total > 0:
        for col in idx.m.values():
            obj[col] = -w.phi / mem_total
    lp.set_objective(obj, lpmod.MAXIMIZE)

    # (I) admitted within demand
    for (i, j), col in idx.C.items():
        lp.add_constraint({col: 1.0}, LE, dem[i, j], f"I({i + 1},{j + 1})")

    in_arcs: dict[tuple[int, int, int], list[int]] = {}
    out_arcs: dict[tuple[int, int, int], list[int]] = {}
    for (i, j, k, l), col in idx.R.items():
        out_arcs.setdefault((i, j, k), []).append(col)
        in_arcs.setdefault((i, j, l), []).append(col)

    for i, j in comms:
        # (II) conservation at transit nodes
        for l in range(n):
            if l in (i, j):
                continue
            row: dict[int, float] = {}
            for col in in_arcs.get((i, j, l), []):
                row[col] = row.get(col, 0.0) + 1.0
            for col in out_arcs.get((i, j, l), []):
                row[col] = row.get(col, 0.0) - 1.0
            if row:
                lp.add_constraint(row, EQ, 0.0, f"II({i + 1},{j + 1},{l + 1})")
        c_col = idx.C[(i, j)]
        # (III) inflow at destination equals admitted
        row = {col: 1.0 for col in in_arcs.get((i, j, j), [])}
        row[c_col] = -1.0
        lp.add_constraint(row, EQ, 0.0, f"III({i + 1},{j + 1})")
        # (IV) outflow at origin equals admitted
        row = {col: 1.0 for col in out_arcs.get((i, j, i), [])}
        row[c_col] = -1.0
        lp.add_constraint(row, EQ, 0.0, f"IV({i + 1},{j + 1})")

    touching: dict[int, list[int]] = {l: [] for l in range(n)}
    for (i, j, k, l), col in idx.R.items():
        touching[k].append(col)
        touching[l].append(col)
    for tag, a1, a2, var in (("VII", co.alpha1, co.alpha2, idx.p), ("VIII", co.beta1, co.beta2, idx.m)):
        for l in range(n):
            row = {idx.C[(l, l)]: a1}
            for col in touching[l]:
                row[col] = row.get(col, 0.0) + a2
            row[var[l]] = -1.0
            lp.add_constraint(row, LE, 0.0, f"{tag}({l + 1})")
    for l in range(n):
        lp.add_constraint({idx.p[l]: 1.0}, LE, caps.cpu[l], f"IX({l + 1})")
    for l in range(n):
        lp.add_constraint({idx.m[l]: 1.0}, LE, caps.mem[l], f"X({l + 1})")
    return lp, idx


def resource_usage(scenario: Scenario, admitted: np.ndarray,
                   relay: Mapping[tuple[int, int, int, int], float]) -> tuple[np.ndarray, np.ndarray]:
    """CPU and memory each server spends on ``admitted`` calls and ``relay`` flows."""
    n = scenario.n
    co = scenario.coeffs
    traversals = np.zeros(n)
    for (_, _, k, l), f in sorted(relay.items()):
        traversals[k] += f
        traversals[l] += f
    local = np.diag(admitted).astype(float)
    return co.alpha1 * local + co.alpha2 * traversals, co.beta1 * local + co.beta2 * traversals


def plan_objective(scenario: Scenario, admitted: np.ndarray, cpu: np.ndarray, mem: np.ndarray) -> float:
    w = scenario.weights
    total_demand = scenario.demand.total
    value = 0.0
    if total_demand > 0:
        value += w.gamma * float(admitted.sum()) / total_demand
    cpu_total, mem_total = float(scenario.caps.cpu.sum()), float(scenario.caps.mem.sum())
    if cpu_total > 0:
        value -= w.phi * float(cpu.sum()) / cpu_total
    if mem_total > 0:
        value -= w.phi * float(mem.sum()) / mem_total
    return value


def _clean(v: float) -> float:
    return 0.0 if abs(v) < CLEAN_EPS else float(v)


def extract_plan(scenario: Scenario, solution: lpmod.LpSolution, idx: VariableIndex) -> AdmissionPlan:
    n = scenario.n
    x = solution.x
    admitted = np.zeros((n, n))
    for (i, j), col in idx.C.items():
        admitted[i, j] = _clean(x[col])
    relay = {}
    for key, col in idx.R.items():
        v = _clean(x[col])
        if v > 0:
            relay[key] = v
    cpu, mem = resource_usage(scenario, admitted, relay)
    return AdmissionPlan(_frozen(admitted), relay, _frozen(cpu), _frozen(mem), float(solution.objective_value))


def solve_admission(scenario: Scenario, backend: str | None = None) -> AdmissionPlan:
    """Optimal admission plan for ``scenario``.

    Server usages are reported at their tight values (what the admitted
    calls and relay flows actually consume), which is what the LP's usage
    variables settle at whenever resources carry a positive weight.
    """
    model, idx = build_admission_lp(scenario)
    try:
        sol = lpmod.solve(model, backend)
    except lpmod.NumericalFailure as exc:
        raise SolverFailure(str(exc)) from exc
    if sol.status is lpmod.LpStatus.INFEASIBLE:
        raise InfeasibleModel("admission LP reported infeasible; the all-zero plan is always feasible")
    if not sol.optimal:
        raise SolverFailure(f"admission LP ended with status {sol.status.value}")
    return extract_plan(scenario, sol, idx)


FAMILIES = ("I", "II", "III", "IV", "V", "VI", "L", "NN", "VII", "VIII", "IX", "X")


@dataclass(frozen=True)
class VerificationReport:
    violations: dict[str, float]
    tolerances: dict[str, float]

    @property
    def feasible(self) -> bool:
        return all(self.violations[f] <= self.tolerances[f] for f in FAMILIES)

    @property
    def max_violation(self) -> float:
        return max(self.violations.values())

    def failed(self) -> list[str]:
        return [f for f in FAMILIES if self.violations[f] > self.tolerances[f]]


def verify_plan(plan: AdmissionPlan, scenario: Scenario, tol: float | Mapping[str, float] = 1e-6) -> VerificationReport:
    """Largest violation of each constraint family.

    Families ``I``-``X`` follow the LP; ``L`` flags flow on non-links and
    ``NN`` negative values. ``tol`` may be a float or a per-family mapping
    (missing families default to 0).
    """
    n = scenario.n
    dem = scenario.demand.demand
    adj = scenario.topology.adj
    C = plan.admitted
    v = dict.fromkeys(FAMILIES, 0.0)
    v["I"] = float(max(np.max(C - dem), 0.0))
    v["NN"] = float(max(-np.min(C), -np.min(plan.cpu_use), -np.min(plan.mem_use), 0.0))

    inflow = np.zeros((n, n, n))
    outflow = np.zeros((n, n, n))
    for (i, j, k, l), f in plan.relay.items():
        if i == j:
            v["V"] = max(v["V"], abs(f))
        if l == i:
            v["VI"] = max(v["VI"], abs(f))
        if adj[k, l] != 1:
            v["L"] = max(v["L"], abs(f))
        if f < 0:
            v["NN"] = max(v["NN"], -f)
        outflow[i, j, k] += f
        inflow[i, j, l] += f
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v["III"] = max(v["III"], abs(inflow[i, j, j] - C[i, j]))
            v["IV"] = max(v["IV"], abs(outflow[i, j, i] - C[i, j]))
            for l in range(n):
                if l not in (i, j):
                    v["II"] = max(v["II"], abs(inflow[i, j, l] - outflow[i, j, l]))

    cpu, mem = resource_usage(scenario, C, plan.relay)
    v["VII"] = float(max(np.max(cpu - plan.cpu_use), 0.0))
    v["VIII"] = float(max(np.max(mem - plan.mem_use), 0.0))
    v["IX"] = float(max(np.max(plan.cpu_use - scenario.caps.cpu), 0.0))
    v["X"] = float(max(np.max(plan.mem_use - scenario.caps.mem), 0.0))
    if isinstance(tol, Mapping):
        tols = {f: float(tol.get(f, 0.0)) for f in FAMILIES}
    else:
        tols = dict.fromkeys(FAMILIES, float(tol))
    return VerificationReport(v, tols)
