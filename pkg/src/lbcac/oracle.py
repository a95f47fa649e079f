"""Reference admission optimum over explicitly enumerated simple paths.

Instead of per-arc relay variables this LP carries one flow variable per
loop-free route. Any arc-flow solution that contains a cycle is weakly
dominated by the same solution with the cycle removed (the cycle consumes
CPU and memory but admits nothing), so both formulations share the same
optimal objective once every simple path is enumerated (``max_hops >= n-1``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp as lpmod
from .flowpaths import SignalingPath, paths_to_relay
from .lp import LE, LinearProgram
from .model import AdmissionPlan, Scenario, Topology, _frozen

DEFAULT_PATH_CAP = 10**6


class PathExplosion(RuntimeError):
    pass


def enumerate_simple_paths(topology: Topology, i: int, j: int, max_hops: int | None = None,
                           cap: int = DEFAULT_PATH_CAP) -> list[tuple[int, ...]]:
    """All simple ``i -> j`` paths with at most ``max_hops`` arcs.

    Ordered shortest first, then lexicographically by node sequence.
    """
    if i == j:
        raise ValueError("origin and destination must differ")
    if max_hops is None:
        max_hops = topology.n - 1
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    found: list[tuple[int, ...]] = []
    path = [i]
    on_path = {i}

    def walk(node: int) -> None:
        for nxt in topology.neighbors(node):
            if nxt in on_path:
                continue
            if nxt == j:
                found.append((*path, j))
                if len(found) > cap:
                    raise PathExplosion(f"more than {cap} simple paths from {i} to {j}")
                continue
            if len(path) < max_hops:
                path.append(nxt)
                on_path.add(nxt)
                walk(nxt)
                path.pop()
                on_path.discard(nxt)

    walk(i)
    found.sort(key=lambda p: (len(p), p))
    return found


@dataclass(frozen=True)
class PathLpResult:
    objective: float
    paths: list[SignalingPath]
    local: np.ndarray
    cpu_use: np.ndarray
    mem_use: np.ndarray
    num_paths: int

    def to_plan(self) -> AdmissionPlan:
        """Arc-level plan equivalent to the path flows."""
        admitted = np.diag(self.local).astype(float)
        for p in self.paths:
            admitted[p.commodity] += p.flow
        return AdmissionPlan(_frozen(admitted), paths_to_relay(self.paths), _frozen(self.cpu_use),
                             _frozen(self.mem_use), self.objective)


def solve_path_lp(scenario: Scenario, max_hops: int | None = None, path_cap: int = DEFAULT_PATH_CAP,
                  backend: str | None = None) -> PathLpResult:
    n = scenario.n
    dem = scenario.demand.demand
    co, w, caps = scenario.coeffs, scenario.weights, scenario.caps
    lp = LinearProgram()

    local = [lp.add_variable(f"C({i + 1},{i + 1})") for i in range(n)]
    routes: list[tuple[tuple[int, int], tuple[int, ...], int]] = []
    total_paths = 0
    for i in range(n):
        for j in range(n):
            if i == j or dem[i, j] <= 0:
                continue
            found = enumerate_simple_paths(scenario.topology, i, j, max_hops, path_cap)
            total_paths += len(found)
            if total_paths > path_cap:
                raise PathExplosion(f"path count exceeds cap {path_cap}")
            for nodes in found:
                col = lp.add_variable("f(" + "-".join(str(v + 1) for v in nodes) + ")")
                routes.append(((i, j), nodes, col))
    p = [lp.add_variable(f"p({l + 1})") for l in range(n)]
    m = [lp.add_variable(f"m({l + 1})") for l in range(n)]

    total_demand = float(dem.sum())
    obj: dict[int, float] = {}
    if total_demand > 0:
        for col in local + [col for _, _, col in routes]:
            obj[col] = w.gamma / total_demand
    if caps.cpu.sum() > 0:
        obj.update({col: -w.phi / float(caps.cpu.sum()) for col in p})
    if caps.mem.sum() > 0:
        obj.update({col: -w.phi / float(caps.mem.sum()) for col in m})
    lp.set_objective(obj)

    for i in range(n):
        lp.add_constraint({local[i]: 1.0}, LE, dem[i, i])
    by_commodity: dict[tuple[int, int], list[int]] = {}
    for comm, _, col in routes:
        by_commodity.setdefault(comm, []).append(col)
    for (i, j), cols in by_commodity.items():
        lp.add_constraint({col: 1.0 for col in cols}, LE, dem[i, j])

    # every node on a route pays once per incident route arc
    touches = [dict() for _ in range(n)]
    for _, nodes, col in routes:
        for pos, v in enumerate(nodes):
            touches[v][col] = 1.0 if pos in (0, len(nodes) - 1) else 2.0
    for l in range(n):
        cpu_row = {local[l]: co.alpha1, p[l]: -1.0}
        mem_row = {local[l]: co.beta1, m[l]: -1.0}
        for col, t in touches[l].items():
            cpu_row[col] = co.alpha2 * t
            mem_row[col] = co.beta2 * t
        lp.add_constraint(cpu_row, LE, 0.0)
        lp.add_constraint(mem_row, LE, 0.0)
        lp.add_constraint({p[l]: 1.0}, LE, caps.cpu[l])
        lp.add_constraint({m[l]: 1.0}, LE, caps.mem[l])

    sol = lpmod.solve(lp, backend)
    if not sol.optimal:
        raise lpmod.NumericalFailure(f"path LP ended with status {sol.status.value}")
    x = sol.x
    paths = [SignalingPath(comm, nodes, float(x[col])) for comm, nodes, col in routes if x[col] > 1e-12]
    return PathLpResult(
        float(sol.objective_value),
        paths,
        np.array([max(x[c], 0.0) for c in local]),
        np.array([x[c] for c in p]),
        np.array([x[c] for c in m]),
        len(routes),
    )
