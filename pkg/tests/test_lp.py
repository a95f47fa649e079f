import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbcac import lp
from lbcac.lp import simplex
from lbcac.lp._backend import KERNELS
from lbcac.lp.program import EQ, GE, LE, MINIMIZE, LinearProgram, LpStatus, NumericalFailure, to_lp_text


def small_lp():
    m = LinearProgram()
    a = m.add_variable("a")
    b = m.add_variable("b")
    m.add_constraint({a: 1, b: 1}, LE, 4)
    m.add_constraint({a: 1, b: 3}, LE, 6)
    m.set_objective({a: 3, b: 2})
    return m


def test_single_bound(backend):
    m = LinearProgram()
    x = m.add_variable("x")
    m.add_constraint({x: 1}, LE, 5)
    m.set_objective({x: 1})
    sol = lp.solve(m, backend)
    assert sol.status == LpStatus.OPTIMAL
    assert sol.x[0] == pytest.approx(5)
    assert sol.objective_value == pytest.approx(5)


def test_infeasible(backend):
    m = LinearProgram()
    x = m.add_variable("x")
    m.add_constraint({x: 1}, LE, -1)
    m.set_objective({x: 1})
    assert lp.solve(m, backend).status == LpStatus.INFEASIBLE


def test_two_vertex_example(backend):
    sol = lp.solve(small_lp(), backend)
    assert sol.optimal
    assert sol.x == pytest.approx([4, 0], abs=1e-12)
    assert sol.objective_value == pytest.approx(12)


def test_unbounded(backend):
    m = LinearProgram()
    x = m.add_variable("x")
    y = m.add_variable("y")
    m.add_constraint({x: 1, y: -1}, LE, 1)
    m.set_objective({y: 1})
    sol = lp.solve(m, backend)
    assert sol.status == LpStatus.UNBOUNDED
    assert sol.objective_value == math.inf


def test_equality_ge_and_minimize(backend):
    m = LinearProgram()
    x = m.add_variable("x")
    y = m.add_variable("y")
    m.add_constraint({x: 1, y: 1}, EQ, 10)
    m.add_constraint({x: 1}, GE, 3)
    m.set_objective({x: 2, y: 5}, MINIMIZE)
    sol = lp.solve(m, backend)
    assert sol.x == pytest.approx([10, 0])
    assert sol.objective_value == pytest.approx(20)


def test_bounds_and_free_variables(backend):
    m = LinearProgram()
    x = m.add_variable("x", lower=-3, upper=2)
    y = m.add_variable("y", lower=-math.inf)
    z = m.add_variable("z", lower=-math.inf, upper=-1)
    m.add_constraint({y: 1, x: 1}, LE, 1)
    m.add_constraint({y: 1}, GE, -7)
    m.set_objective({x: -1, y: -1, z: 1}, "max")
    sol = lp.solve(m, backend)
    # x at its lower bound, y at -7, z at its upper bound
    assert sol.x == pytest.approx([-3, -7, -1])


def test_redundant_equalities(backend):
    m = LinearProgram()
    x = m.add_variable("x")
    y = m.add_variable("y")
    m.add_constraint({x: 1, y: 1}, EQ, 2)
    m.add_constraint({x: 2, y: 2}, EQ, 4)
    m.set_objective({x: 1})
    sol = lp.solve(m, backend)
    assert sol.optimal and sol.x == pytest.approx([2, 0])


def test_zero_rows_and_empty_program(backend):
    m = LinearProgram()
    m.add_variable("x", upper=3)
    m.set_objective({0: 1})
    assert lp.solve(m, backend).objective_value == pytest.approx(3)
    empty = LinearProgram()
    sol = lp.solve(empty, backend)
    assert sol.optimal and sol.objective_value == 0


def test_invalid_programs_rejected():
    m = LinearProgram()
    m.add_variable("x")
    with pytest.raises(IndexError):
        m.add_constraint({3: 1.0}, LE, 1)
    with pytest.raises(ValueError):
        m.add_variable("y", lower=2, upper=1)


def test_iteration_cap_raises(monkeypatch):
    def stalled(T, basis, ncols, budget, *tols):
        return 2, budget

    monkeypatch.setattr(simplex, "get_kernel", lambda name=None: stalled)
    with pytest.raises(NumericalFailure, match="iteration cap"):
        lp.solve(small_lp())


def test_deterministic_and_backends_agree():
    from lbcac.admission import build_admission_lp
    from lbcac.model import reference_scenario

    model, _ = build_admission_lp(reference_scenario(2))
    runs = [lp.solve(model, b) for b in sorted(KERNELS) for _ in range(2)]
    for r in runs[1:]:
        assert np.array_equal(r.x, runs[0].x)
        assert r.objective_value == runs[0].objective_value
        assert r.iterations == runs[0].iterations


def test_lp_text_dump():
    m = small_lp()
    m.add_variable("free var", lower=-math.inf)
    text = to_lp_text(m)
    lines = text.splitlines()
    assert lines[0] == "Maximize"
    assert " obj: 3 a + 2 b" in lines
    assert "Subject To" in lines and "Bounds" in lines and lines[-1] == "End"
    assert any("free_var free" in ln for ln in lines)


# ---- independent oracle: brute-force vertex enumeration in 2-D ----

def vertex_optimum(A, b, c):
    rows = [(np.asarray(a, float), float(r)) for a, r in zip(A, b)]
    rows += [(np.array([-1.0, 0.0]), 0.0), (np.array([0.0, -1.0]), 0.0)]
    best = -math.inf
    for (a1, r1), (a2, r2) in itertools.combinations(rows, 2):
        M = np.vstack([a1, a2])
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        v = np.linalg.solve(M, [r1, r2])
        if all(a @ v <= r + 1e-9 for a, r in rows):
            best = max(best, float(np.dot(c, v)))
    return best


coef = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))
pos = st.floats(0.5, 20, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def bounded_2d_lp(draw):
    k = draw(st.integers(1, 5))
    A = [[draw(coef), draw(coef)] for _ in range(k)]
    b = [draw(pos) for _ in range(k)]
    A += [[1.0, 0.0], [0.0, 1.0]]  # keep the region bounded
    b += [draw(pos), draw(pos)]
    c = [draw(coef), draw(coef)]
    return A, b, c


def to_program(A, b, c, scale=1.0):
    m = LinearProgram()
    m.add_variable("a")
    m.add_variable("b")
    for row, r in zip(A, b):
        m.add_constraint({0: row[0], 1: row[1]}, LE, r)
    m.set_objective({0: scale * c[0], 1: scale * c[1]})
    return m


@settings(max_examples=150, deadline=None)
@given(bounded_2d_lp())
def test_matches_vertex_enumeration(case):
    A, b, c = case
    sol = lp.solve(to_program(A, b, c))
    assert sol.optimal
    assert sol.objective_value == pytest.approx(vertex_optimum(A, b, c), abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(bounded_2d_lp(), st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=5))
def test_weak_duality_spot_check(case, probes):
    A, b, c = case
    m = to_program(A, b, c)
    sol = lp.solve(m)
    # the origin is feasible (b > 0); shrink each probe toward it until feasible
    for u, v in probes:
        pt = np.array([u, v]) * 20
        while m.max_violation(pt) > 0:
            pt = pt / 2
        assert m.evaluate(pt) <= sol.objective_value + 1e-7


@settings(max_examples=100, deadline=None)
@given(bounded_2d_lp(), st.floats(0.01, 1000))
def test_scaling_equivariance(case, factor):
    A, b, c = case
    base = lp.solve(to_program(A, b, c))
    scaled_model = to_program(A, b, c, factor)
    scaled = lp.solve(scaled_model)
    assert scaled_model.max_violation(scaled.x) <= 1e-9 * max(1, max(b))
    assert scaled.objective_value == pytest.approx(factor * base.objective_value, rel=1e-7, abs=1e-7 * factor)
