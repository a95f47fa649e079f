"""Slot-by-slot simulation of the controller duty cycle.

Each slot gathers the demand matrix (plus any held calls), solves and
rounds the admission plan, thins admitted calls by a seeded service-failure
draw, and books serviced and blocked calls. Calls last exactly one slot.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .admission import solve_admission
from .flowpaths import round_plan
from .model import AdmissionPlan, DutyCycleTiming, Scenario


@dataclass(frozen=True)
class SlotRecord:
    slot_index: int
    demands: np.ndarray
    plan: AdmissionPlan
    serviced: np.ndarray
    blocked: np.ndarray
    held: np.ndarray
    cpu_used: np.ndarray
    mem_used: np.ndarray
    compute_time: float
    timing: DutyCycleTiming
    oldest_wait: int = 0

    @property
    def requested(self) -> int:
        return int(np.floor(self.demands).sum())


class HoldQueue:
    """Per-commodity FIFO of call cohorts waiting for a later slot."""

    def __init__(self, n: int):
        self.n = n
        self.cohorts: dict[tuple[int, int], deque] = {}

    def pending(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.int64)
        for key, q in self.cohorts.items():
            out[key] = sum(c for _, c in q)
        return out

    def settle(self, slot: int, arrivals: np.ndarray, serviced: np.ndarray) -> int:
        """Serve oldest calls first; unserved calls (old and new) stay queued.

        Returns the age in slots of the oldest call still waiting.
        """
        oldest = 0
        for i in range(self.n):
            for j in range(self.n):
                q = self.cohorts.setdefault((i, j), deque())
                if arrivals[i, j] > 0:
                    q.append((slot, int(arrivals[i, j])))
                budget = int(serviced[i, j])
                while q and budget > 0:
                    born, count = q[0]
                    take = min(count, budget)
                    budget -= take
                    if take == count:
                        q.popleft()
                    else:
                        q[0] = (born, count - take)
                if q:
                    oldest = max(oldest, slot - q[0][0] + 1)
        return oldest


def _serviced_usage(scenario: Scenario, plan: AdmissionPlan, serviced: np.ndarray):
    co = scenario.coeffs
    n = scenario.n
    traversals = np.zeros(n)
    for (i, j, k, l), f in sorted(plan.relay.items()):
        share = serviced[i, j] / plan.admitted[i, j] if plan.admitted[i, j] > 0 else 0.0
        traversals[k] += f * share
        traversals[l] += f * share
    local = np.diag(serviced).astype(float)
    return co.alpha1 * local + co.alpha2 * traversals, co.beta1 * local + co.beta2 * traversals


def run(scenario: Scenario, timing: DutyCycleTiming | None = None, num_slots: int = 1, seed: int = 0,
        overhead_factor: float = 0.0, hold_on: bool = False, demand_jitter: float = 0.0,
        backend: str | None = None) -> list[SlotRecord]:
    """Simulate ``num_slots`` duty cycles; deterministic for a given ``seed``.

    ``demand_jitter`` perturbs every demand entry by a uniform relative
    factor in ``[-jitter, +jitter]`` per slot (0 keeps the matrix constant).
    ``overhead_factor`` is the per-call probability that an admitted call
    fails in service.
    """
    if num_slots < 1:
        raise ValueError("num_slots must be >= 1")
    if not 0.0 <= overhead_factor <= 1.0:
        raise ValueError("overhead_factor must lie in [0, 1]")
    if demand_jitter < 0:
        raise ValueError("demand_jitter must be >= 0")
    template = timing or DutyCycleTiming()
    demand_ss, failure_ss = np.random.SeedSequence(seed).spawn(2)
    demand_rng = np.random.default_rng(demand_ss)
    failure_rng = np.random.default_rng(failure_ss)
    n = scenario.n
    base = scenario.demand.demand
    queue = HoldQueue(n)
    records = []
    for slot in range(num_slots):
        fresh = np.array(base, dtype=float)
        if demand_jitter > 0:
            fresh = np.maximum(fresh * (1.0 + demand_jitter * demand_rng.uniform(-1.0, 1.0, fresh.shape)), 0.0)
        carried = queue.pending() if hold_on else np.zeros((n, n), dtype=np.int64)
        observed = fresh + carried

        t0 = time.perf_counter()
        plan = round_plan(solve_admission(scenario.with_demand(observed), backend), scenario.with_demand(observed))
        compute_time = time.perf_counter() - t0

        admitted = plan.admitted.astype(np.int64)
        failures = failure_rng.binomial(admitted, overhead_factor) if overhead_factor > 0 else 0
        serviced = admitted - failures
        requested = np.floor(observed).astype(np.int64)
        blocked = requested - serviced
        oldest = 0
        held = np.zeros((n, n), dtype=np.int64)
        if hold_on:
            oldest = queue.settle(slot, np.floor(fresh).astype(np.int64), serviced)
            held = queue.pending()
        cpu, mem = _serviced_usage(scenario, plan, serviced)
        records.append(SlotRecord(
            slot_index=slot,
            demands=observed,
            plan=plan,
            serviced=serviced,
            blocked=blocked,
            held=held,
            cpu_used=cpu,
            mem_used=mem,
            compute_time=compute_time,
            timing=DutyCycleTiming.with_compute(compute_time, template.tau, template.t_gather, template.t_notify),
            oldest_wait=oldest,
        ))
    return records


def hold_on_accounting(record: SlotRecord) -> int:
    """Calls carried from ``record``'s slot into the next one."""
    return int(record.held.sum())
