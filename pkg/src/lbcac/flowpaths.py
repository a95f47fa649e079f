"""Signaling-path decomposition, loop detection and integer rounding of plans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .admission import plan_objective, resource_usage
from .model import AdmissionPlan, Scenario, Topology, _frozen

FLOW_EPS = 1e-9
SNAP = 1e-9
RESIDUAL_TOL = 1e-6


class NegativeFlow(ValueError):
    pass


class UndecomposableResidual(ValueError):
    pass


@dataclass(frozen=True)
class SignalingPath:
    commodity: tuple[int, int]
    nodes: tuple[int, ...]
    flow: float


@dataclass(frozen=True)
class Loop:
    commodity: tuple[int, int]
    nodes: tuple[int, ...]  # closed: first node repeated at the end
    flow: float


@dataclass
class LoopReport:
    source_loops: list[Loop] = field(default_factory=list)
    non_source_loops: list[Loop] = field(default_factory=list)
    dangling_flow: float = 0.0

    @property
    def residual_flow(self) -> float:
        """Flow left after stripping origin-to-destination paths."""
        return sum(c.flow for c in self.source_loops) + sum(c.flow for c in self.non_source_loops) + self.dangling_flow

    @property
    def loop_free(self) -> bool:
        return not self.source_loops and not self.non_source_loops and self.dangling_flow <= FLOW_EPS


def _find_path(flows, src: int, dst: int) -> list[int] | None:
    out: dict[int, list[int]] = {}
    for k, l in sorted(flows):
        out.setdefault(k, []).append(l)

    path = [src]
    on_path = {src}

    def dfs(node: int) -> bool:
        if node == dst:
            return True
        for nxt in out.get(node, ()):
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            if dfs(nxt):
                return True
            path.pop()
            on_path.discard(nxt)
        return False

    return path if dfs(src) else None


def _strip(flows: dict, nodes, amount: float) -> None:
    for arc in zip(nodes, nodes[1:]):
        flows[arc] -= amount
        if flows[arc] <= FLOW_EPS:
            del flows[arc]


def decompose_commodity(origin: int, dest: int, arc_flows: dict[tuple[int, int], float],
                        report: LoopReport | None = None) -> tuple[list[SignalingPath], LoopReport]:
    """Greedy decomposition of one commodity's arc flows.

    Simple ``origin -> dest`` paths are stripped first, choosing the
    lowest-index next hop at every branch; whatever remains is walked into
    cycles (source loops if they touch the origin, otherwise non-source).
    """
    report = report if report is not None else LoopReport()
    flows = {}
    for arc, f in arc_flows.items():
        if f < -FLOW_EPS:
            raise NegativeFlow(f"commodity ({origin},{dest}) arc {arc} carries {f}")
        if f > FLOW_EPS:
            flows[arc] = float(f)
    commodity = (origin, dest)
    paths = []
    while (nodes := _find_path(flows, origin, dest)) is not None:
        amount = min(flows[arc] for arc in zip(nodes, nodes[1:]))
        _strip(flows, nodes, amount)
        paths.append(SignalingPath(commodity, tuple(nodes), amount))

    while flows:
        k, l = min(flows)
        walk = [k, l]
        while True:
            nexts = sorted(e for (a, e) in flows if a == walk[-1])
            if not nexts:
                # not closable into a cycle: input violated conservation
                report.dangling_flow += flows.pop((k, l))
                break
            e = nexts[0]
            if e in walk:
                cycle = walk[walk.index(e):] + [e]
                amount = min(flows[arc] for arc in zip(cycle, cycle[1:]))
                _strip(flows, cycle, amount)
                loop = Loop(commodity, tuple(cycle), amount)
                (report.source_loops if origin in cycle else report.non_source_loops).append(loop)
                break
            walk.append(e)
    return paths, report


def decompose(plan: AdmissionPlan, topology: Topology | None = None) -> tuple[list[SignalingPath], LoopReport]:
    """Decompose every commodity of ``plan``; commodities are visited in index order.

    With ``topology`` given, relay flow on a non-link raises ``ValueError``.
    """
    if topology is not None:
        for (i, j, k, l), f in plan.relay.items():
            if f > FLOW_EPS and topology.adj[k, l] != 1:
                raise ValueError(f"commodity ({i},{j}) routes {f} over non-link ({k},{l})")
    by_commodity: dict[tuple[int, int], dict[tuple[int, int], float]] = {}
    for (i, j, k, l), f in sorted(plan.relay.items()):
        by_commodity.setdefault((i, j), {})[(k, l)] = f
    paths: list[SignalingPath] = []
    report = LoopReport()
    for (i, j), arcs in sorted(by_commodity.items()):
        p, _ = decompose_commodity(i, j, arcs, report)
        paths.extend(p)
    return paths, report


def paths_to_relay(paths) -> dict[tuple[int, int, int, int], float]:
    relay: dict[tuple[int, int, int, int], float] = {}
    for p in paths:
        if p.flow <= 0:
            continue
        i, j = p.commodity
        for k, l in zip(p.nodes, p.nodes[1:]):
            relay[(i, j, k, l)] = relay.get((i, j, k, l), 0.0) + p.flow
    return dict(sorted(relay.items()))


def _floor(x: float) -> float:
    return float(math.floor(x + SNAP))


def round_plan(plan: AdmissionPlan, scenario: Scenario) -> AdmissionPlan:
    """Integer plan obtained by flooring every signaling path.

    Flooring whole paths (instead of single arcs) keeps flow conservation
    exact, and every constraint left-hand side can only shrink, so a
    feasible plan stays feasible.
    """
    paths, report = decompose(plan, scenario.topology)
    if report.residual_flow > RESIDUAL_TOL:
        raise UndecomposableResidual(
            f"plan carries {report.residual_flow:.6g} units of loop flow; inspect decompose() first"
        )
    n = scenario.n
    dem = scenario.demand.demand
    admitted = np.zeros((n, n))
    for i in range(n):
        admitted[i, i] = min(_floor(plan.admitted[i, i]), math.floor(dem[i, i]))

    rounded: list[SignalingPath] = []
    by_commodity: dict[tuple[int, int], list[SignalingPath]] = {}
    for p in paths:
        by_commodity.setdefault(p.commodity, []).append(p)
    for (i, j), group in by_commodity.items():
        flows = [_floor(p.flow) for p in group]
        limit = math.floor(dem[i, j])
        k = len(flows) - 1
        while sum(flows) > limit and k >= 0:
            cut = min(flows[k], sum(flows) - limit)
            flows[k] -= cut
            k -= 1
        admitted[i, j] = sum(flows)
        rounded.extend(SignalingPath(p.commodity, p.nodes, f) for p, f in zip(group, flows) if f > 0)

    relay = paths_to_relay(rounded)
    cpu, mem = resource_usage(scenario, admitted, relay)
    return AdmissionPlan(_frozen(admitted), relay, _frozen(cpu), _frozen(mem),
                         plan_objective(scenario, admitted, cpu, mem))
