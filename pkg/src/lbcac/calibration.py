"""Fit per-call CPU and memory cost coefficients from measurements.

Each fit is a small LP: minimize the total one-sided shortfall between the
measured usage and the linear prediction ``c1 * local + c2 * relayed``,
with ``c1 + c2`` pinned to ``max(usage) / max(local)``. Over-prediction is
free, under-prediction costs its size.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import lp as lpmod
from .lp import EQ, GE, MINIMIZE, LinearProgram
from .model import CostCoefficients, MeasurementSample


class CalibrationError(ValueError):
    pass


class EmptyDataset(CalibrationError):
    pass


class ZeroLocalCalls(CalibrationError):
    pass


class InvalidNoise(CalibrationError):
    pass


@dataclass(frozen=True)
class CalibrationResult:
    coeffs: tuple[float, float]
    residuals: np.ndarray
    objective: float
    pinned_sum: float


def _fit(local: np.ndarray, relayed: np.ndarray, usage: np.ndarray, label: str) -> CalibrationResult:
    if local.size == 0:
        raise EmptyDataset("calibration needs at least one sample")
    max_local = float(local.max())
    if max_local <= 0:
        raise ZeroLocalCalls("max local call count is zero; the coefficient sum is undefined")
    pinned = float(usage.max()) / max_local

    lp = LinearProgram()
    c1 = lp.add_variable(f"{label}1")
    c2 = lp.add_variable(f"{label}2")
    slack = [lp.add_variable(f"s{q + 1}") for q in range(local.size)]
    lp.set_objective({s: 1.0 for s in slack}, MINIMIZE)
    for q, s in enumerate(slack):
        lp.add_constraint({c1: local[q], c2: relayed[q], s: 1.0}, GE, usage[q], f"fit{q + 1}")
    lp.add_constraint({c1: 1.0, c2: 1.0}, EQ, pinned, "pin")
    sol = lpmod.solve(lp)
    if not sol.optimal:
        raise lpmod.NumericalFailure(f"calibration LP ended with status {sol.status.value}")

    a, b = float(sol.x[c1]), float(sol.x[c2])
    fitted = a * local + b * relayed
    residuals = np.maximum(usage - fitted, 0.0)
    return CalibrationResult((a, b), residuals, float(residuals.sum()), pinned)


def _columns(dataset: Sequence[MeasurementSample]):
    local = np.array([s.local_calls for s in dataset], dtype=float)
    relayed = np.array([s.relayed_calls for s in dataset], dtype=float)
    return local, relayed


def estimate_cpu_coeffs(dataset: Sequence[MeasurementSample]) -> CalibrationResult:
    local, relayed = _columns(dataset)
    return _fit(local, relayed, np.array([s.cpu_used for s in dataset], dtype=float), "alpha")


def estimate_mem_coeffs(dataset: Sequence[MeasurementSample]) -> CalibrationResult:
    local, relayed = _columns(dataset)
    return _fit(local, relayed, np.array([s.mem_used for s in dataset], dtype=float), "beta")


def estimate_coeffs(dataset: Sequence[MeasurementSample]) -> CostCoefficients:
    cpu = estimate_cpu_coeffs(dataset)
    mem = estimate_mem_coeffs(dataset)
    return CostCoefficients(*cpu.coeffs, *mem.coeffs)


def generate_synthetic_dataset(true_coeffs: CostCoefficients, h: int = 100, seed: int = 0,
                               noise_level: float = 0.0, max_calls: int = 1000) -> list[MeasurementSample]:
    """Synthetic measurements from known coefficients.

    The first sample is a noiseless anchor with ``max_calls`` local and
    relayed calls; every other sample stays within that count, so the pinned
    coefficient sum equals the true one. Noise is one-sided: each usage is
    inflated by ``noise_level * U(0, 1)`` times its exact value.
    """
    if h < 1:
        raise CalibrationError("h must be >= 1")
    if noise_level < 0:
        raise InvalidNoise(f"noise_level must be >= 0, got {noise_level}")
    co = true_coeffs
    rng = np.random.default_rng(seed)
    samples = [
        MeasurementSample(
            float(max_calls),
            float(max_calls),
            co.alpha1 * max_calls + co.alpha2 * max_calls,
            co.beta1 * max_calls + co.beta2 * max_calls,
        )
    ]
    for _ in range(h - 1):
        local = float(rng.integers(0, max_calls + 1))
        relayed = float(rng.integers(0, max_calls + 1))
        cpu = co.alpha1 * local + co.alpha2 * relayed
        mem = co.beta1 * local + co.beta2 * relayed
        cpu += noise_level * rng.random() * cpu
        mem += noise_level * rng.random() * mem
        samples.append(MeasurementSample(local, relayed, cpu, mem))
    return samples
