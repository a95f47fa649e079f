import numpy as np
import pytest

from lbcac.model import (
    CANONICAL_6,
    CANONICAL_6_EDGES,
    DEFAULT_COEFFS,
    REFERENCE_DEMANDS,
    CostCoefficients,
    DegenerateWeights,
    DimensionMismatch,
    DutyCycleTiming,
    EmptyMatrix,
    MeasurementSample,
    NegativeEntry,
    NonBinaryEntry,
    NonZeroDiagonal,
    NotSquare,
    NotSymmetric,
    ObjectiveWeights,
    ResourceCaps,
    ScenarioError,
    reference_scenario,
    validate_scenario,
    validate_topology,
)


def test_linked_pair():
    topo = validate_topology([[0, 1], [1, 0]])
    assert topo.n == 2
    assert topo.arcs() == [(0, 1), (1, 0)]


@pytest.mark.parametrize("adj, err, where", [
    ([[0, 1], [0, 0]], NotSymmetric, "[1][2]"),
    ([[1, 0], [0, 0]], NonZeroDiagonal, "row 1, column 1"),
    ([[0, 2], [2, 0]], NonBinaryEntry, "row 1, column 2"),
    ([], EmptyMatrix, ""),
    ([[0, 1, 0], [1, 0, 1]], NotSquare, ""),
])
def test_topology_errors(adj, err, where):
    with pytest.raises(err) as exc:
        validate_topology(adj)
    assert where in str(exc.value)


def test_validation_does_not_mutate_input():
    adj = np.array([[0, 1], [1, 0]])
    topo = validate_topology(adj)
    assert not topo.adj.flags.writeable
    adj[0, 1] = 0
    assert topo.adj[0, 1] == 1


def test_canonical_topology():
    assert CANONICAL_6.n == 6
    assert CANONICAL_6.is_connected()
    assert len(CANONICAL_6.arcs()) == 2 * len(CANONICAL_6_EDGES) == 16
    for path in ([1, 3, 5, 6], [1, 2, 4, 6]):
        for a, b in zip(path, path[1:]):
            assert CANONICAL_6.adj[a - 1, b - 1] == 1


def test_table1_sums():
    assert {k: int(np.sum(v)) for k, v in REFERENCE_DEMANDS.items()} == {1: 860, 2: 2853, 3: 3188}


def test_scenario2_validates():
    sc = reference_scenario(2)
    assert sc.n == 6 and sc.demand.total == 2853
    assert np.all(sc.caps.cpu == 100) and np.all(sc.caps.mem == 512)


def test_scenario_errors():
    caps = ResourceCaps.uniform(2, 10, 10)
    topo = validate_topology([[0, 1], [1, 0]])
    w = ObjectiveWeights(1, 1)
    with pytest.raises(NegativeEntry, match="row 2, column 1"):
        validate_scenario(topo, [[0, 0], [-1, 0]], caps, DEFAULT_COEFFS, w)
    with pytest.raises(DimensionMismatch):
        validate_scenario(topo, np.zeros((3, 3)), caps, DEFAULT_COEFFS, w)
    with pytest.raises(DimensionMismatch):
        validate_scenario(topo, np.zeros((2, 2)), ResourceCaps.uniform(3, 1, 1), DEFAULT_COEFFS, w)
    with pytest.raises(NegativeEntry):
        validate_scenario(topo, np.zeros((2, 2)), ResourceCaps(np.array([1, -1]), np.ones(2)), DEFAULT_COEFFS, w)
    with pytest.raises(DegenerateWeights):
        ObjectiveWeights(0, 0)


def test_value_object_errors():
    with pytest.raises(ScenarioError):
        CostCoefficients(0, 0, 0, 0)
    with pytest.raises(NegativeEntry):
        CostCoefficients(-0.1, 0, 1, 0)
    with pytest.raises(NegativeEntry):
        MeasurementSample(1, -1, 0, 0)


def test_duty_cycle_timing():
    t = DutyCycleTiming()
    assert (t.tau, t.t_gather, t.t_notify, t.t_idle) == (3.0, 0.5, 0.5, 2.0)
    t = DutyCycleTiming.with_compute(0.95)
    assert t.t_idle == pytest.approx(1.05)
    assert t.t_gather + t.t_compute + t.t_notify + t.t_idle == pytest.approx(t.tau, abs=1e-9)
    long = DutyCycleTiming.with_compute(4.0)
    assert long.t_idle == 0 and long.tau == pytest.approx(5.0)
    with pytest.raises(ScenarioError):
        DutyCycleTiming(3.0, 1.0, 1.0, 1.0, 1.0)


def test_validation_is_pure():
    a = reference_scenario(1)
    b = reference_scenario(1)
    assert np.array_equal(a.demand.demand, b.demand.demand)
    assert np.array_equal(a.topology.adj, b.topology.adj)
    assert a.coeffs == b.coeffs and a.weights == b.weights
