"""Compare the compiled and numpy pivot kernels on the admission LPs.

Two tables: end-to-end ``lp.solve`` (includes standard-form construction
and LU refactorizations shared by both backends) and the bare phase-one
pivot loop on an identical starting tableau.

    python benchmarks/bench_pivot.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from lbcac import lp
from lbcac.admission import build_admission_lp
from lbcac.lp._backend import KERNELS
from lbcac.lp.simplex import OPT_TOL, PIV_TOL, TIE_TOL, _Driver, _StandardForm
from lbcac.model import (
    DEFAULT_COEFFS,
    ObjectiveWeights,
    ResourceCaps,
    reference_scenario,
    validate_scenario,
    validate_topology,
)


def complete_graph_case(n, seed=0):
    rng = np.random.default_rng(seed)
    adj = np.ones((n, n), dtype=int) - np.eye(n, dtype=int)
    return validate_scenario(
        validate_topology(adj),
        rng.uniform(0, 50, (n, n)),
        ResourceCaps(rng.uniform(5, 40, n), rng.uniform(20, 200, n)),
        DEFAULT_COEFFS,
        ObjectiveWeights(10.0, 1.0),
        name=f"K{n}",
    )


def phase_one_tableau(model):
    sf = _StandardForm(model)
    drv = _Driver(sf, None, 0)
    cost = np.zeros(sf.N)
    cost[sf.art_start:] = -1.0
    drv.set_costs(cost)
    return drv.T, drv.basis, sf.N


def kernel_only(model, repeat):
    T0, basis0, ncols = phase_one_tableau(model)
    out = {}
    for name, kernel in KERNELS.items():
        best = float("inf")
        for _ in range(repeat):
            T, basis = T0.copy(), basis0.copy()
            t0 = time.perf_counter()
            status, iters = kernel(T, basis, ncols, 10**6, OPT_TOL, PIV_TOL, TIE_TOL)
            best = min(best, time.perf_counter() - t0)
        out[name] = (best, iters, T)
    first = next(iter(out.values()))[2]
    for name, (_, _, T) in out.items():
        if not np.array_equal(T, first):
            raise SystemExit(f"kernel {name} produced a different tableau")
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    cases = [reference_scenario(2, ObjectiveWeights(1.0, 1.0)), reference_scenario(3), complete_graph_case(6),
             complete_graph_case(8)]
    print(f"{'case':<12} {'vars':>6} {'rows':>6} " + " ".join(f"{k + ' [ms]':>14}" for k in KERNELS) + "  speedup")
    for sc in cases:
        model, _ = build_admission_lp(sc)
        timings = {}
        objs = {}
        for name in KERNELS:
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                sol = lp.solve(model, name)
                best = min(best, time.perf_counter() - t0)
            timings[name] = best
            objs[name] = sol.objective_value
        if len(set(objs.values())) != 1:
            raise SystemExit(f"backends disagree on {sc.name}: {objs}")
        speed = timings["python"] / timings["cython"] if "cython" in timings else float("nan")
        print(f"{sc.name:<12} {model.num_vars:>6} {model.num_constraints:>6} "
              + " ".join(f"{1000 * timings[k]:>14.1f}" for k in KERNELS) + f"  {speed:6.2f}x")

    print()
    print("phase-one pivot loop only")
    print(f"{'case':<12} {'pivots':>6} " + " ".join(f"{k + ' [ms]':>14}" for k in KERNELS) + "  speedup")
    for sc in cases:
        model, _ = build_admission_lp(sc)
        res = kernel_only(model, args.repeat)
        iters = next(iter(res.values()))[1]
        speed = res["python"][0] / res["cython"][0] if "cython" in res else float("nan")
        print(f"{sc.name:<12} {iters:>6} " + " ".join(f"{1000 * res[k][0]:>14.1f}" for k in KERNELS)
              + f"  {speed:6.2f}x")


if __name__ == "__main__":
    main()
