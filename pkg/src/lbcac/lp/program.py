"""Linear program container and the LP-format text dump."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

LE, EQ, GE = "<=", "=", ">="
MAXIMIZE, MINIMIZE = "max", "min"


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class NumericalFailure(RuntimeError):
    """Raised when the simplex cannot reach a trustworthy answer."""


@dataclass
class Constraint:
    coeffs: dict[int, float]
    rel: str
    rhs: float
    name: str = ""


@dataclass
class LinearProgram:
    """A linear program with sparse constraint rows and simple bounds.

    Build it incrementally with :meth:`add_variable`, :meth:`add_constraint`
    and :meth:`set_objective`, then pass it to :func:`lbcac.lp.solve`.
    """

    sense: str = MAXIMIZE
    objective: dict[int, float] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    var_names: list[str] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str = "", lower: float = 0.0, upper: float = math.inf) -> int:
        if lower > upper:
            raise ValueError(f"variable {name!r}: lower bound {lower} exceeds upper bound {upper}")
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.var_names.append(name or f"x{len(self.lower) - 1}")
        return len(self.lower) - 1

    def add_constraint(self, coeffs: dict[int, float], rel: str, rhs: float, name: str = "") -> int:
        if rel not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {rel!r}")
        for j in coeffs:
            if not 0 <= j < self.num_vars:
                raise IndexError(f"constraint {name!r} references variable {j}")
        row = {j: float(a) for j, a in coeffs.items() if a != 0.0}
        self.constraints.append(Constraint(row, rel, float(rhs), name or f"c{len(self.constraints)}"))
        return len(self.constraints) - 1

    def set_objective(self, coeffs: dict[int, float], sense: str = MAXIMIZE) -> None:
        if sense not in (MAXIMIZE, MINIMIZE):
            raise ValueError(f"unknown sense {sense!r}")
        for j in coeffs:
            if not 0 <= j < self.num_vars:
                raise IndexError(f"objective references variable {j}")
        self.objective = {j: float(a) for j, a in coeffs.items() if a != 0.0}
        self.sense = sense

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for j, a in self.objective.items():
            c[j] = a
        return c

    def evaluate(self, x) -> float:
        return float(sum(a * x[j] for j, a in self.objective.items()))

    def max_violation(self, x) -> float:
        """Largest constraint or bound violation of point ``x``."""
        worst = 0.0
        for con in self.constraints:
            lhs = sum(a * x[j] for j, a in con.coeffs.items())
            if con.rel == LE:
                v = lhs - con.rhs
            elif con.rel == GE:
                v = con.rhs - lhs
            else:
                v = abs(lhs - con.rhs)
            worst = max(worst, v)
        for j in range(self.num_vars):
            worst = max(worst, self.lower[j] - x[j], x[j] - self.upper[j])
        return worst


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective_value: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


_NAME_OK = re.compile(r"[^A-Za-z0-9_.()\[\],]")


def _lp_name(name: str) -> str:
    name = _NAME_OK.sub("_", name)
    return name if name and not name[0].isdigit() else f"_{name}"


def _terms(coeffs: dict[int, float], names: list[str]) -> str:
    if not coeffs:
        return "0"
    out = []
    for j in sorted(coeffs):
        a = coeffs[j]
        sign = "-" if a < 0 else "+"
        out.append(f"{sign} {abs(a):.17g} {names[j]}")
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else text


def to_lp_text(lp: LinearProgram) -> str:
    """Render ``lp`` in the CPLEX LP text format.

    Variable and constraint names are sanitized to the LP-format character
    set. The listing can be fed to any external solver for cross-checking.
    """
    names = [_lp_name(n) for n in lp.var_names]
    lines = ["Maximize" if lp.sense == MAXIMIZE else "Minimize"]
    lines.append(f" obj: {_terms(lp.objective, names)}")
    lines.append("Subject To")
    for con in lp.constraints:
        rel = {LE: "<=", GE: ">=", EQ: "="}[con.rel]
        lines.append(f" {_lp_name(con.name)}: {_terms(con.coeffs, names)} {rel} {con.rhs:.17g}")
    lines.append("Bounds")
    for j, name in enumerate(names):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo == -math.inf and hi == math.inf:
            lines.append(f" {name} free")
        elif hi == math.inf:
            lines.append(f" {name} >= {lo:.17g}" if lo != -math.inf else f" -inf <= {name}")
        else:
            lo_txt = "-inf" if lo == -math.inf else f"{lo:.17g}"
            lines.append(f" {lo_txt} <= {name} <= {hi:.17g}")
    lines.append("End")
    return "\n".join(lines) + "\n"
