"""Domain types shared across the package, plus scenario validation.

Indices are 0-based here; file formats and reports use 1-based server ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ScenarioError(ValueError):
    """Base class for invalid scenario inputs."""


class EmptyMatrix(ScenarioError):
    pass


class NotSquare(ScenarioError):
    pass


class NotSymmetric(ScenarioError):
    pass


class NonZeroDiagonal(ScenarioError):
    pass


class NonBinaryEntry(ScenarioError):
    pass


class DimensionMismatch(ScenarioError):
    pass


class NegativeEntry(ScenarioError):
    pass


class DegenerateWeights(ScenarioError):
    pass


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Topology:
    n: int
    adj: np.ndarray

    def arcs(self) -> list[tuple[int, int]]:
        """Directed arcs ``(k, l)`` with ``adj[k, l] == 1`` in row-major order."""
        return [(int(k), int(l)) for k, l in zip(*np.nonzero(self.adj))]

    def neighbors(self, k: int) -> list[int]:
        return [int(l) for l in np.flatnonzero(self.adj[k])]

    def degree(self, k: int) -> int:
        return int(self.adj[k].sum())

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            k = stack.pop()
            for l in self.neighbors(k):
                if l not in seen:
                    seen.add(l)
                    stack.append(l)
        return len(seen) == self.n


@dataclass(frozen=True)
class DemandMatrix:
    demand: np.ndarray

    @property
    def total(self) -> float:
        return float(self.demand.sum())


@dataclass(frozen=True)
class ResourceCaps:
    cpu: np.ndarray
    mem: np.ndarray

    @classmethod
    def uniform(cls, n: int, cpu: float, mem: float) -> ResourceCaps:
        return cls(_frozen([cpu] * n), _frozen([mem] * n))


@dataclass(frozen=True)
class CostCoefficients:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        vals = (self.alpha1, self.alpha2, self.beta1, self.beta2)
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise NegativeEntry(f"cost coefficients must be finite and >= 0, got {vals}")
        if self.alpha1 + self.alpha2 <= 0 and self.beta1 + self.beta2 <= 0:
            raise ScenarioError("cost model is entirely free (all coefficients zero)")


@dataclass(frozen=True)
class ObjectiveWeights:
    gamma: float
    phi: float

    def __post_init__(self):
        if self.gamma < 0 or self.phi < 0:
            raise NegativeEntry(f"weights must be >= 0, got gamma={self.gamma}, phi={self.phi}")
        if self.gamma + self.phi <= 0:
            raise DegenerateWeights("gamma + phi must be positive")

    @property
    def ratio(self) -> float:
        return math.inf if self.phi == 0 else self.gamma / self.phi


@dataclass(frozen=True)
class AdmissionPlan:
    admitted: np.ndarray
    relay: dict[tuple[int, int, int, int], float]
    cpu_use: np.ndarray
    mem_use: np.ndarray
    objective: float

    @property
    def n(self) -> int:
        return self.admitted.shape[0]

    @property
    def total_admitted(self) -> float:
        return float(self.admitted.sum())

    def commodity_flows(self, i: int, j: int) -> dict[tuple[int, int], float]:
        return {(k, l): f for (a, b, k, l), f in self.relay.items() if a == i and b == j}


@dataclass(frozen=True)
class MeasurementSample:
    local_calls: float
    relayed_calls: float
    cpu_used: float
    mem_used: float

    def __post_init__(self):
        if min(self.local_calls, self.relayed_calls, self.cpu_used, self.mem_used) < 0:
            raise NegativeEntry(f"measurement entries must be >= 0: {self}")


@dataclass(frozen=True)
class DutyCycleTiming:
    tau: float = 3.0
    t_gather: float = 0.5
    t_compute: float = 0.0
    t_notify: float = 0.5
    t_idle: float = 2.0

    def __post_init__(self):
        parts = (self.t_gather, self.t_compute, self.t_notify, self.t_idle)
        if min(parts) < 0 or self.tau < 0:
            raise NegativeEntry("duty-cycle phases must be >= 0")
        if abs(sum(parts) - self.tau) > 1e-9:
            raise ScenarioError(f"phases sum to {sum(parts)}, expected tau={self.tau}")

    @classmethod
    def with_compute(cls, t_compute: float, tau: float = 3.0, t_gather: float = 0.5,
                     t_notify: float = 0.5) -> DutyCycleTiming:
        """Timing for a measured compute phase; idle absorbs the remainder (never below 0)."""
        idle = tau - t_gather - t_notify - t_compute
        if idle < 0:
            tau = t_gather + t_notify + t_compute
            idle = 0.0
        return cls(tau, t_gather, t_compute, t_notify, idle)


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    demand: DemandMatrix
    caps: ResourceCaps
    coeffs: CostCoefficients
    weights: ObjectiveWeights
    name: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.topology.n

    def with_weights(self, weights: ObjectiveWeights) -> Scenario:
        return Scenario(self.topology, self.demand, self.caps, self.coeffs, weights, self.name)

    def with_demand(self, demand) -> Scenario:
        return validate_scenario(self.topology, demand, self.caps, self.coeffs, self.weights, self.name)


def validate_topology(adj) -> Topology:
    arr = np.array(adj, dtype=float)
    if arr.size == 0:
        raise EmptyMatrix("adjacency matrix is empty")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquare(f"adjacency matrix must be square, got shape {arr.shape}")
    bad = np.argwhere((arr != 0) & (arr != 1))
    if bad.size:
        i, j = bad[0]
        raise NonBinaryEntry(f"adjacency entry at row {i + 1}, column {j + 1} is {arr[i, j]!r}")
    diag = np.flatnonzero(np.diag(arr))
    if diag.size:
        i = diag[0]
        raise NonZeroDiagonal(f"adjacency diagonal at row {i + 1}, column {i + 1} is nonzero")
    asym = np.argwhere(arr != arr.T)
    if asym.size:
        i, j = asym[0]
        raise NotSymmetric(f"adjacency[{i + 1}][{j + 1}] != adjacency[{j + 1}][{i + 1}]")
    return Topology(arr.shape[0], _frozen(arr, dtype=np.int64))


def _vector(name: str, values, n: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (n,):
        raise DimensionMismatch(f"{name} must have length {n}, got shape {arr.shape}")
    neg = np.flatnonzero(~(arr >= 0))
    if neg.size:
        raise NegativeEntry(f"{name}[{neg[0] + 1}] = {arr[neg[0]]} is negative or not a number")
    return _frozen(arr)


def validate_scenario(topology: Topology, demand, caps: ResourceCaps, coeffs: CostCoefficients,
                      weights: ObjectiveWeights, name: str = "") -> Scenario:
    n = topology.n
    dem = demand.demand if isinstance(demand, DemandMatrix) else demand
    dem = np.array(dem, dtype=float)
    if dem.shape != (n, n):
        raise DimensionMismatch(f"demand must be {n}x{n}, got shape {dem.shape}")
    neg = np.argwhere(~(dem >= 0))
    if neg.size:
        i, j = neg[0]
        raise NegativeEntry(f"demand at row {i + 1}, column {j + 1} is {dem[i, j]}")
    if not np.all(np.isfinite(dem)):
        raise NegativeEntry("demand entries must be finite")
    caps = ResourceCaps(_vector("cpu_caps", caps.cpu, n), _vector("mem_caps", caps.mem, n))
    if weights.gamma + weights.phi <= 0:
        raise DegenerateWeights("gamma + phi must be positive")
    return Scenario(topology, DemandMatrix(_frozen(dem)), caps, coeffs, weights, name)


# Measured testbed coefficients (CPU per local / relayed call, memory likewise) and server caps.
DEFAULT_COEFFS = CostCoefficients(alpha1=0.074104, alpha2=0.025896, beta1=0.327393, beta2=0.184607)
DEFAULT_CPU_CAP = 100.0
DEFAULT_MEM_CAP = 512.0


def _undirected(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n), dtype=np.int64)
    for a, b in edges:
        adj[a - 1, b - 1] = adj[b - 1, a - 1] = 1
    return adj


# Stand-in for the unpublished six-server test topology; it contains both
# reported signaling paths 1-3-5-6 and 1-2-4-6.
CANONICAL_6_EDGES = ((1, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 5), (4, 6), (5, 6))
CANONICAL_6 = validate_topology(_undirected(6, CANONICAL_6_EDGES))

REFERENCE_DEMANDS = {
    1: [
        [10, 20, 4, 30, 60, 8],
        [10, 50, 20, 10, 4, 10],
        [0, 0, 100, 30, 40, 12],
        [10, 20, 30, 46, 50, 14],
        [50, 6, 30, 20, 10, 20],
        [6, 40, 25, 40, 10, 15],
    ],
    2: [
        [100, 110, 64, 65, 96, 58],
        [60, 95, 70, 70, 92, 90],
        [40, 65, 120, 80, 110, 92],
        [50, 80, 70, 86, 110, 94],
        [90, 76, 60, 50, 70, 80],
        [46, 95, 70, 94, 70, 85],
    ],
    3: [
        [110, 120, 84, 80, 105, 65],
        [70, 105, 80, 75, 100, 98],
        [50, 75, 125, 90, 120, 98],
        [60, 90, 80, 95, 115, 100],
        [100, 86, 80, 60, 74, 80],
        [66, 105, 80, 104, 78, 85],
    ],
}

# Weight presets (gamma, phi) labelled f1-f4 after the published cases, whose
# actual values were never released; these are local choices.
DEFAULT_SWEEP = (
    ("f1", ObjectiveWeights(0.25, 1.0)),
    ("f2", ObjectiveWeights(1.0, 1.0)),
    ("f3", ObjectiveWeights(4.0, 1.0)),
    ("f4", ObjectiveWeights(16.0, 1.0)),
)


def reference_scenario(number: int, weights: ObjectiveWeights | None = None) -> Scenario:
    """One of the three load scenarios on ``CANONICAL_6`` with the default caps and coefficients."""
    return validate_scenario(
        CANONICAL_6,
        REFERENCE_DEMANDS[number],
        ResourceCaps.uniform(6, DEFAULT_CPU_CAP, DEFAULT_MEM_CAP),
        DEFAULT_COEFFS,
        weights or DEFAULT_SWEEP[-1][1],
        name=f"scenario{number}",
    )
