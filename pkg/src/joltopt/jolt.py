"""Outer joint-optimization loop.

Keeps one incumbent deployment and, per iteration, asks the whale-style
candidate generator for a same-length candidate Q, derives three neighbor
deployments from it (insert one individual of Q, replace one individual by
Q's, delete one individual), evaluates the feasible neighbors end to end
(device assignment with quantized phase shifts, ring-learned tour, energy
objective) and accepts the best strictly improving one. The raw candidate
Q itself is never evaluated; only its insert/replace/delete offspring are.

Randomness is split from one master seed into four named streams
(initialization, candidate generation, neighbor moves, tour learning) so
that runs are reproducible and components can be swapped without
perturbing each other's draws. Every tour-learning call gets a fresh child
seed from the fourth stream.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .awoa import AwoaConfig, SearchState, awoa_step, fresh_chaos
from .energy import (
    Assignment,
    Deployment,
    EnergyReport,
    assign_devices,
    check_solution,
    measure,
)
from .errors import (
    ConstraintViolationError,
    InitializationError,
    ParameterError,
    UnreachableDeviceError,
)
from .ersom import ErsomConfig, Tour, run_ersom
from .scenario import SCHEMA_VERSION, Scenario, make_rng

DEFAULT_INIT_ATTEMPTS = 10_000


@dataclass(frozen=True)
class JoltConfig:
    t_max: int = 200
    awoa: AwoaConfig = field(default_factory=AwoaConfig)
    ersom: ErsomConfig = field(default_factory=ErsomConfig)
    max_init_attempts: int = DEFAULT_INIT_ATTEMPTS

    def __post_init__(self):
        if self.t_max < 0:
            raise ParameterError(f"t_max must be >= 0, got {self.t_max}")
        if self.max_init_attempts < 1:
            raise ParameterError("max_init_attempts must be >= 1")


@dataclass(frozen=True)
class Incumbent:
    """Accepted solution bundle; report matches (deployment, assignment,
    tour) exactly."""

    deployment: Deployment
    assignment: Assignment
    tour: Tour
    report: EnergyReport
    iteration: int  # iteration of acceptance, 0 for the initial solution

    @property
    def objective(self) -> float:
        return self.report.objective


@dataclass(frozen=True)
class Neighbor:
    move: str  # "insert" | "replace" | "delete"
    stops: np.ndarray
    feasible: bool
    reason: str | None = None  # violated constraint tag when infeasible


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    objective: float
    k: int
    move: str  # "init" | "insert" | "replace" | "delete" | "none"


@dataclass(frozen=True)
class JoltResult:
    incumbent: Incumbent
    trace: tuple[TraceRow, ...]
    evaluations: int  # full objective evaluations, including the initial one


def _tag(move: str, stops: np.ndarray, scenario: Scenario) -> Neighbor:
    try:
        deployment = Deployment(stops)
        deployment.validate(scenario)
        assign_devices(scenario, deployment)
    except ConstraintViolationError as exc:
        return Neighbor(move, stops, False, exc.constraint)
    except UnreachableDeviceError:
        return Neighbor(move, stops, False, "unreachable")
    return Neighbor(move, stops, True, None)


def propose_neighbors(stops, q, rng: np.random.Generator, scenario: Scenario) -> list[Neighbor]:
    """Insert/replace/delete neighbors of the incumbent, feasibility-tagged.

    Draw order is part of the contract: insert pick, replace index, delete
    pick, each drawn only when its move is produced. Insert is skipped at
    K = k_max, delete at K = k_min, so K stays inside [k_min, k_max] by
    construction (C7 is still re-checked by the tag).
    """
    stops = np.atleast_2d(np.asarray(stops, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    k = len(stops)
    if len(q) != k:
        raise ParameterError(f"candidate length {len(q)} != population length {k}")
    neighbors = []
    if k < scenario.k_max:
        pick = int(rng.integers(k))
        neighbors.append(_tag("insert", np.vstack([stops, q[pick : pick + 1]]), scenario))
    idx = int(rng.integers(k))
    replaced = np.array(stops)
    replaced[idx] = q[idx]
    neighbors.append(_tag("replace", replaced, scenario))
    if k > scenario.k_min:
        drop = int(rng.integers(k))
        neighbors.append(_tag("delete", np.delete(stops, drop, axis=0), scenario))
    return neighbors


def random_feasible_deployment(
    scenario: Scenario,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_INIT_ATTEMPTS,
    k_cap: int | None = None,
) -> tuple[Deployment, Assignment]:
    """Rejection-sample a deployment that passes the assignment gate.

    Each attempt draws K uniformly from [k_min, min(k_max, N, k_cap)] and K
    uniform positions. Most rejections come from the capacity repair
    failing at small K or from K exceeding the device count.
    """
    k_hi = min(scenario.k_max, scenario.n_devices)
    if k_cap is not None:
        k_hi = min(k_hi, k_cap)
    if k_hi < scenario.k_min:
        raise InitializationError(
            f"no admissible stop count: k_min={scenario.k_min} exceeds cap {k_hi}"
        )
    area = scenario.area
    for _ in range(max_attempts):
        k = int(rng.integers(scenario.k_min, k_hi + 1))
        stops = np.column_stack(
            [
                rng.uniform(area.x_min, area.x_max, k),
                rng.uniform(area.y_min, area.y_max, k),
            ]
        )
        try:
            deployment = Deployment(stops)
            deployment.validate(scenario)
            assignment = assign_devices(scenario, deployment)
        except (ConstraintViolationError, UnreachableDeviceError):
            continue
        return deployment, assignment
    raise InitializationError(f"no feasible deployment within {max_attempts} attempts")


def evaluate_stops(
    scenario: Scenario,
    stops,
    ersom_config: ErsomConfig,
    ersom_seed,
) -> tuple[Deployment, Assignment, Tour, EnergyReport]:
    """Assignment -> tour -> energy for one stop set; raises on infeasibility."""
    deployment = Deployment(stops)
    deployment.validate(scenario)
    assignment = assign_devices(scenario, deployment)
    tour = run_ersom(deployment.stops, ersom_config, seed=ersom_seed)
    _, report = measure(scenario, deployment, tour.order, assignment=assignment)
    return deployment, assignment, tour, report


def jolt_run(
    scenario: Scenario,
    config: JoltConfig | None = None,
    seed=0,
    initial_deployment=None,
) -> JoltResult:
    """Full optimization run; returns the final incumbent plus its trace.

    `initial_deployment` bypasses rejection sampling (it must still pass
    the assignment gate). The trace has one row per iteration plus the
    initial row; its objective column is non-increasing because only strict
    improvements are accepted, and the best of the improving neighbors wins
    on ties of availability (steepest descent). Accepted incumbents are
    re-validated through the independent constraint checker.
    """
    config = config or JoltConfig()
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    init_ss, awoa_ss, moves_ss, ersom_parent = root.spawn(4)
    init_rng = make_rng(init_ss)
    awoa_rng = make_rng(awoa_ss)
    moves_rng = make_rng(moves_ss)

    def ersom_rng():
        return make_rng(ersom_parent.spawn(1)[0])

    if initial_deployment is not None:
        deployment = (
            initial_deployment
            if isinstance(initial_deployment, Deployment)
            else Deployment(initial_deployment)
        )
        deployment.validate(scenario)
        assignment = assign_devices(scenario, deployment)
    else:
        deployment, assignment = random_feasible_deployment(
            scenario, init_rng, config.max_init_attempts, k_cap=config.awoa.pop_size
        )
    tour = run_ersom(deployment.stops, config.ersom, seed=ersom_rng())
    _, report = measure(scenario, deployment, tour.order, assignment=assignment)
    incumbent = Incumbent(deployment, assignment, tour, report, iteration=0)
    trace = [TraceRow(0, report.objective, deployment.k, "init")]
    evaluations = 1

    if config.t_max == 0:
        return JoltResult(incumbent, tuple(trace), evaluations)

    state = SearchState(
        population=deployment.stops,
        best=deployment.stops,
        best_objective=report.objective,
        t_max=config.t_max,
        rng=awoa_rng,
        bounds=scenario.area,
        w_c=fresh_chaos(awoa_rng),
    )
    for _ in range(config.t_max):
        t = state.start_iteration()
        q = awoa_step(state, config.awoa)
        neighbors = propose_neighbors(incumbent.deployment.stops, q, moves_rng, scenario)
        best_new = None
        used = 0
        for nb in neighbors:
            if not nb.feasible:
                continue
            try:
                parts = evaluate_stops(scenario, nb.stops, config.ersom, ersom_rng())
            except (ConstraintViolationError, UnreachableDeviceError):
                continue  # the tag is a pre-check; the full pipeline has the final say
            used += 1
            if parts[3].objective < incumbent.objective and (
                best_new is None or parts[3].objective < best_new[1][3].objective
            ):
                best_new = (nb.move, parts)
        assert used <= 3  # three neighbors max per iteration
        evaluations += used
        if best_new is not None:
            move, (deployment, assignment, tour, report) = best_new
            check_solution(scenario, deployment, assignment, tour.order, report)
            incumbent = Incumbent(deployment, assignment, tour, report, iteration=t)
            state.population = deployment.stops
            state.best = deployment.stops
            state.best_objective = report.objective
            state.record(True)
            trace.append(TraceRow(t, report.objective, deployment.k, move))
        else:
            state.record(False)
            trace.append(TraceRow(t, incumbent.objective, incumbent.deployment.k, "none"))
    return JoltResult(incumbent, tuple(trace), evaluations)


# ---------------------------------------------------------------------------
# Run artifacts


def resolved_config_dict(scenario: Scenario, config: JoltConfig, seed) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": int(seed) if not isinstance(seed, np.random.SeedSequence) else None,
        "t_max": config.t_max,
        "max_init_attempts": config.max_init_attempts,
        "awoa": asdict(config.awoa),
        "ersom": asdict(config.ersom),
        "scenario": json.loads(scenario.to_json()),
    }


def solution_dict(incumbent: Incumbent) -> dict:
    doc = incumbent.report.to_json_dict()
    served = incumbent.assignment.device_to_stop
    doc["stops"] = [[float(x), float(y)] for x, y in incumbent.deployment.stops]
    doc["k"] = incumbent.deployment.k
    doc["tour"] = [int(j) for j in incumbent.tour.order]
    doc["assignment_row_form"] = [int(j) for j in served]
    # per-device phase-shift levels at its serving stop
    doc["phase_level_count"] = int(incumbent.assignment.levels)
    doc["phases"] = [
        [int(m) for m in incumbent.assignment.phase_levels[i, served[i]]]
        for i in range(len(served))
    ]
    doc["accepted_iteration"] = incumbent.iteration
    return doc


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "objective", "k", "move"])
        for row in trace:
            writer.writerow([row.iteration, repr(float(row.objective)), row.k, row.move])


def read_trace_csv(path) -> tuple[TraceRow, ...]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return tuple(
            TraceRow(int(r["iteration"]), float(r["objective"]), int(r["k"]), r["move"])
            for r in reader
        )


def write_run_artifacts(out_dir, scenario: Scenario, config: JoltConfig, seed, result: JoltResult) -> Path:
    """config.json + trace.csv + solution.json, byte-stable for a fixed seed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = resolved_config_dict(scenario, config, seed)
    (out / "config.json").write_text(json.dumps(cfg, sort_keys=True, indent=2) + "\n")
    write_trace_csv(out / "trace.csv", result.trace)
    sol = solution_dict(result.incumbent)
    (out / "solution.json").write_text(json.dumps(sol, sort_keys=True, indent=2) + "\n")
    return out


__all__ = [
    "DEFAULT_INIT_ATTEMPTS",
    "Incumbent",
    "JoltConfig",
    "JoltResult",
    "Neighbor",
    "TraceRow",
    "evaluate_stops",
    "jolt_run",
    "propose_neighbors",
    "random_feasible_deployment",
    "read_trace_csv",
    "resolved_config_dict",
    "solution_dict",
    "write_run_artifacts",
    "write_trace_csv",
]
