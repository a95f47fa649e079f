"""Load-balanced call admission control for networks of SIP servers.

Build and solve the admission/routing LP over a server topology, calibrate
per-call CPU and memory costs, split admitted flow into signaling paths,
round plans to whole calls, and simulate the slotted controller.
"""

from .admission import build_admission_lp, solve_admission, verify_plan
from .calibration import estimate_cpu_coeffs, estimate_mem_coeffs, generate_synthetic_dataset
from .flowpaths import decompose, round_plan
from .lp import BACKEND as LP_BACKEND
from .model import (
    CANONICAL_6,
    DEFAULT_COEFFS,
    AdmissionPlan,
    CostCoefficients,
    DemandMatrix,
    DutyCycleTiming,
    MeasurementSample,
    ObjectiveWeights,
    ResourceCaps,
    Scenario,
    Topology,
    reference_scenario,
    validate_scenario,
    validate_topology,
)
from .oracle import enumerate_simple_paths, solve_path_lp

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_6",
    "LP_BACKEND",
    "DEFAULT_COEFFS",
    "AdmissionPlan",
    "CostCoefficients",
    "DemandMatrix",
    "DutyCycleTiming",
    "MeasurementSample",
    "ObjectiveWeights",
    "ResourceCaps",
    "Scenario",
    "Topology",
    "build_admission_lp",
    "decompose",
    "enumerate_simple_paths",
    "estimate_cpu_coeffs",
    "estimate_mem_coeffs",
    "generate_synthetic_dataset",
    "round_plan",
    "solve_admission",
    "verify_plan",
    "solve_path_lp",
    "reference_scenario",
    "validate_scenario",
    "validate_topology",
]
