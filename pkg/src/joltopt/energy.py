"""Device assignment, energy decomposition, objective evaluation, and the
nine-constraint checker.

Constraint names follow the model statement:
  C1 binary incidence, C2 one stop per device, C3 per-stop capacity,
  C4 full coverage (with the companion lower bound: every stop point serves
  at least one device), C5/C6 stop coordinates inside the area, C7 stop
  count within [k_min, k_max], C8 the visiting order is a permutation,
  C9 every phase shift drawn from the discrete level set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import array_responses, link_budget, quantize_phases, rate_matrix
from .errors import (
    ConstraintViolationError,
    InvalidPermutationError,
    UnreachableDeviceError,
)
from .scenario import Scenario, tour_length

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Deployment:
    """Variable-length set of stop-point coordinates; altitude comes from
    the scenario."""

    stops: np.ndarray  # (K, 2)

    def __post_init__(self):
        stops = np.atleast_2d(np.asarray(self.stops, dtype=float))
        object.__setattr__(self, "stops", stops)

    @property
    def k(self) -> int:
        return len(self.stops)

    def validate(self, scenario: Scenario) -> None:
        """C5-C7 feasibility gate."""
        if np.any(self.stops[:, 0] < scenario.area.x_min) or np.any(
            self.stops[:, 0] > scenario.area.x_max
        ):
            raise ConstraintViolationError("C5", "stop x-coordinate outside area bounds")
        if np.any(self.stops[:, 1] < scenario.area.y_min) or np.any(
            self.stops[:, 1] > scenario.area.y_max
        ):
            raise ConstraintViolationError("C6", "stop y-coordinate outside area bounds")
        if not (scenario.k_min <= self.k <= scenario.k_max):
            raise ConstraintViolationError(
                "C7",
                f"stop count {self.k} outside [{scenario.k_min}, {scenario.k_max}]",
            )


@dataclass(frozen=True)
class Assignment:
    incidence: np.ndarray  # (N, K) 0/1
    rates: np.ndarray  # (N, K) bits/s, quantized phases
    phase_levels: np.ndarray  # (N, K, M) level indices
    levels: int  # size of the discrete phase set

    @property
    def device_to_stop(self) -> np.ndarray:
        return np.argmax(self.incidence, axis=1)


@dataclass(frozen=True)
class EnergyReport:
    e_iot_j: np.ndarray  # per-device transmit energy, joules
    e_iot: float
    hover_times: np.ndarray  # per-stop hover time, seconds
    e_hov: float
    tour_length_m: float
    e_fly: float
    objective: float

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "e_iot_j": [float(v) for v in self.e_iot_j],
            "e_iot": float(self.e_iot),
            "hover_times_s": [float(v) for v in self.hover_times],
            "e_hov": float(self.e_hov),
            "tour_length_m": float(self.tour_length_m),
            "e_fly": float(self.e_fly),
            "objective": float(self.objective),
        }


def assign_devices(scenario: Scenario, deployment: Deployment) -> Assignment:
    """Rate-greedy assignment with capacity repair.

    Every device first goes to its maximum-rate stop point. Overloaded
    columns then shed surplus devices one at a time: the device losing the
    least rate (smallest gap to its best under-capacity alternative) moves
    first, ties broken by device index. A stop point left without any device
    makes the deployment infeasible; the caller's search discards it.
    """
    n = scenario.n_devices
    k = deployment.k
    cap = scenario.capacity
    if n > k * cap:
        raise ConstraintViolationError(
            "C3", f"{n} devices exceed total capacity {k}x{cap}"
        )
    if k > n:
        raise ConstraintViolationError(
            "C4", f"{k} stop points cannot each serve one of only {n} devices"
        )
    rates, _, levels = rate_matrix(scenario, deployment.stops)
    assigned = np.argmax(rates, axis=1)
    load = np.bincount(assigned, minlength=k)

    for j in range(k):
        while load[j] > cap:
            members = np.flatnonzero(assigned == j)
            open_cols = np.flatnonzero(load < cap)
            # For each member, its best alternative among open columns and
            # the rate sacrificed by moving there.
            alt_rates = rates[np.ix_(members, open_cols)]
            best_alt = np.argmax(alt_rates, axis=1)
            gaps = rates[members, j] - alt_rates[np.arange(len(members)), best_alt]
            mover = int(np.argmin(gaps))  # first minimum = smallest device index
            device = int(members[mover])
            target = int(open_cols[best_alt[mover]])
            assigned[device] = target
            load[j] -= 1
            load[target] += 1

    if np.any(load == 0):
        empty = int(np.flatnonzero(load == 0)[0])
        raise ConstraintViolationError(
            "C4", f"stop point {empty} serves no device after assignment repair"
        )
    incidence = np.zeros((n, k), dtype=np.int8)
    incidence[np.arange(n), assigned] = 1
    return Assignment(
        incidence=incidence,
        rates=rates,
        phase_levels=levels,
        levels=scenario.radio.phase_levels,
    )


def _assigned_times(scenario: Scenario, assignment: Assignment) -> np.ndarray:
    """Per-device transfer time on the assigned link."""
    picked = assignment.device_to_stop
    rates = assignment.rates[np.arange(scenario.n_devices), picked]
    if np.any(rates <= 0.0):
        bad = int(np.flatnonzero(rates <= 0.0)[0])
        raise UnreachableDeviceError(
            f"device {bad} has zero rate on its assigned link"
        )
    return scenario.data_bits / rates


def transmission_energy(scenario: Scenario, assignment: Assignment) -> tuple[np.ndarray, float]:
    times = _assigned_times(scenario, assignment)
    per_device = scenario.radio.tx_power_w * times
    return per_device, float(per_device.sum())


def hover_energy(scenario: Scenario, assignment: Assignment) -> tuple[np.ndarray, float]:
    """The UAV hovers at each stop until its slowest assigned upload ends."""
    times = _assigned_times(scenario, assignment)
    k = assignment.incidence.shape[1]
    hover = np.zeros(k)
    picked = assignment.device_to_stop
    np.maximum.at(hover, picked, times)
    return hover, float(scenario.power.hover_power_w * hover.sum())


def flight_energy(scenario: Scenario, deployment: Deployment, tour) -> tuple[float, float]:
    try:
        length = tour_length(deployment.stops, tour)
    except InvalidPermutationError:
        raise
    return length, float(scenario.power.flight_power_w * length)


def measure(scenario: Scenario, deployment: Deployment, tour, assignment: Assignment | None = None):
    """Full evaluation pipeline; returns (assignment, report)."""
    deployment.validate(scenario)
    if assignment is None:
        assignment = assign_devices(scenario, deployment)
    order = np.asarray(tour, dtype=int)
    if sorted(order.tolist()) != list(range(deployment.k)):
        raise ConstraintViolationError(
            "C8", f"tour is not a permutation of 0..{deployment.k - 1}"
        )
    e_iot_j, e_iot = transmission_energy(scenario, assignment)
    hover_times, e_hov = hover_energy(scenario, assignment)
    length, e_fly = flight_energy(scenario, deployment, order)
    objective = e_iot + scenario.power.weight_hover * e_hov + scenario.power.weight_fly * e_fly
    report = EnergyReport(
        e_iot_j=e_iot_j,
        e_iot=e_iot,
        hover_times=hover_times,
        e_hov=e_hov,
        tour_length_m=length,
        e_fly=e_fly,
        objective=float(objective),
    )
    return assignment, report


def evaluate(scenario: Scenario, deployment: Deployment, tour) -> EnergyReport:
    """Objective of one candidate solution.

    Any constraint failure raises ConstraintViolationError naming the
    constraint instead of returning numbers.
    """
    _, report = measure(scenario, deployment, tour)
    return report


def check_solution(
    scenario: Scenario,
    deployment: Deployment,
    assignment: Assignment,
    tour,
    report: EnergyReport | None = None,
) -> None:
    """Independent validation of C1-C9 on a finished solution.

    Recomputes rates through the scalar channel path (the production
    assignment uses the vectorized one) and re-derives every constraint from
    first principles. Raises ConstraintViolationError on the first failure.
    """
    n = scenario.n_devices
    k = deployment.k
    inc = np.asarray(assignment.incidence)
    if not np.all((inc == 0) | (inc == 1)):
        raise ConstraintViolationError("C1", "incidence contains non-binary entries")
    if inc.shape != (n, k):
        raise ConstraintViolationError("C1", f"incidence shape {inc.shape} != ({n}, {k})")
    if not np.all(inc.sum(axis=1) == 1):
        raise ConstraintViolationError("C2", "some device is not assigned to exactly one stop")
    col = inc.sum(axis=0)
    if np.any(col > scenario.capacity):
        raise ConstraintViolationError("C3", "a stop point exceeds its device capacity")
    if int(inc.sum()) != n:
        raise ConstraintViolationError("C4", "total assignments != device count")
    if np.any(col < 1):
        raise ConstraintViolationError("C4", "a stop point serves no device")
    if np.any(deployment.stops[:, 0] < scenario.area.x_min) or np.any(
        deployment.stops[:, 0] > scenario.area.x_max
    ):
        raise ConstraintViolationError("C5", "stop x-coordinate outside area bounds")
    if np.any(deployment.stops[:, 1] < scenario.area.y_min) or np.any(
        deployment.stops[:, 1] > scenario.area.y_max
    ):
        raise ConstraintViolationError("C6", "stop y-coordinate outside area bounds")
    if not (scenario.k_min <= k <= scenario.k_max):
        raise ConstraintViolationError("C7", "stop count outside bounds")
    order = np.asarray(tour, dtype=int)
    if sorted(order.tolist()) != list(range(k)):
        raise ConstraintViolationError("C8", "tour is not a permutation of the stops")
    levels = assignment.phase_levels
    if np.any(levels < 0) or np.any(levels >= assignment.levels):
        raise ConstraintViolationError("C9", "phase level index outside the discrete set")

    # Cross-check assigned-link rates and phases against the scalar path.
    for i in range(n):
        j = int(np.argmax(inc[i]))
        stop3 = (
            deployment.stops[j, 0],
            deployment.stops[j, 1],
            scenario.uav_altitude_m,
        )
        resp_u, resp_d = array_responses(
            stop3, scenario.device_xy[i], scenario.irs_position, scenario.radio
        )
        phases = quantize_phases(resp_u, resp_d, scenario.radio.phase_levels)
        if not np.array_equal(phases.level_indices, levels[i, j]):
            raise ConstraintViolationError("C9", f"stored phases for link ({i},{j}) are not the quantized selection")
        budget = link_budget(stop3, scenario.device_xy[i], scenario.irs_position, scenario.radio, phases)
        stored = assignment.rates[i, j]
        if not math.isclose(budget.rate_bps, stored, rel_tol=1e-9, abs_tol=1e-12):
            raise ConstraintViolationError(
                "C1", f"stored rate for link ({i},{j}) deviates from the channel model"
            )
    if report is not None:
        recomposed = (
            report.e_iot
            + scenario.power.weight_hover * report.e_hov
            + scenario.power.weight_fly * report.e_fly
        )
        if not math.isclose(recomposed, report.objective, rel_tol=1e-9, abs_tol=1e-12):
            raise ConstraintViolationError("C1", "objective does not recompose from components")


def report_to_json(report: EnergyReport, assignment: Assignment, tour) -> str:
    doc = report.to_json_dict()
    doc["assignment_row_form"] = [int(j) for j in assignment.device_to_stop]
    doc["tour"] = [int(j) for j in np.asarray(tour, dtype=int)]
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


__all__ = [
    "Assignment",
    "Deployment",
    "EnergyReport",
    "assign_devices",
    "check_solution",
    "evaluate",
    "flight_energy",
    "hover_energy",
    "measure",
    "report_to_json",
    "transmission_energy",
]
