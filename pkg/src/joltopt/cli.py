"""Command-line front end.

Five subcommands: `generate` (write a scenario file), `run` (one full
optimization with artifacts), `tsp-bench` (tour-solver table over bundled
instances), `compare` (paired candidate-generator comparison on random
scenarios), `stability` (learning-rate sweep on instance-derived
scenarios).

Configuration comes from defaults, then an optional JSON config file, then
flags; later layers win and unknown keys are rejected. The resolved map is
persisted next to the results. The only environment variable honored is
JOLTOPT_OUT (default output root).

Exit codes: 0 success, 2 configuration error, 3 infeasible problem,
4 I/O error.

Benchmark CSVs regenerate byte-identically for a fixed seed except for
wall-clock columns, which are informational only; run artifacts
(config.json, trace.csv, solution.json) are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .awoa import AwoaConfig, woa_preset
from .errors import (
    ConstraintViolationError,
    InitializationError,
    InstanceLookupError,
    ParameterError,
    SizeLimitError,
    TsplibParseError,
    UnreachableDeviceError,
)
from .ersom import ErsomConfig, brute_force_tour, run_ersom, run_rsom
from .jolt import JoltConfig, jolt_run, write_run_artifacts
from .scenario import (
    Scenario,
    bundled_instances,
    generate_scenario,
    load_bundled,
    load_tsplib,
    make_rng,
    scenario_from_points,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

OUT_ENV_VAR = "JOLTOPT_OUT"


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ENV_VAR, "."))


# ---------------------------------------------------------------------------
# Config resolution


def _merge_config(defaults: dict, file_cfg: dict | None, flags: dict) -> dict:
    """defaults < config file < explicit flags; unknown keys rejected."""
    cfg = dict(defaults)
    if file_cfg is not None:
        if not isinstance(file_cfg, dict):
            raise ParameterError("config file must hold a JSON object")
        unknown = sorted(set(file_cfg) - set(defaults))
        if unknown:
            raise ParameterError(f"unknown config keys: {unknown}")
        cfg.update(file_cfg)
    for key, value in flags.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _load_config_file(path: str | None) -> dict | None:
    if path is None:
        return None
    with open(path) as fh:
        return json.load(fh)


def _parse_set_entries(entries) -> dict:
    """--set key=value pairs; values parse as JSON scalars, else strings."""
    out = {}
    for entry in entries or []:
        key, sep, raw = entry.partition("=")
        if not sep or not key:
            raise ParameterError(f"--set expects key=value, got {entry!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _csv_list(text: str) -> list[str]:
    return [item for item in (part.strip() for part in text.split(",")) if item]


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in _csv_list(text)]
    except ValueError as exc:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from exc


def _dataclass_config(cls, mapping: dict, label: str):
    try:
        return cls(**mapping)
    except TypeError as exc:
        raise ParameterError(f"bad {label} config: {exc}") from exc


def _build_jolt_config(cfg: dict, algorithm: str) -> JoltConfig:
    awoa = _dataclass_config(AwoaConfig, dict(cfg.get("awoa") or {}), "awoa")
    if algorithm == "woa":
        awoa = woa_preset(awoa)
    elif algorithm != "awoa":
        raise ParameterError(f"unknown algorithm {algorithm!r} (expected awoa or woa)")
    ersom = dict(cfg.get("ersom") or {})
    if cfg.get("epochs") is not None:
        ersom["g_max"] = cfg["epochs"]
    if cfg.get("beta") is not None:
        ersom["beta"] = cfg["beta"]
    return JoltConfig(
        t_max=int(cfg["t_max"]),
        awoa=awoa,
        ersom=_dataclass_config(ErsomConfig, ersom, "ersom"),
        max_init_attempts=int(cfg["max_init_attempts"]),
    )


def _resolve_instance(name: str):
    if name in bundled_instances():
        return load_bundled(name)
    if os.path.exists(name):
        return load_tsplib(name)
    raise InstanceLookupError(name, bundled_instances())


# ---------------------------------------------------------------------------
# Row types and CSV round-trip helpers


@dataclass(frozen=True)
class BenchmarkRow:
    """One summary line: a solver/algorithm on one instance."""

    instance: str
    algorithm: str
    reps: int
    mean_metric: float
    relative_error: float | None  # (mean - optimum)/optimum when known
    rel_std: float  # population std / mean
    mean_wall_clock_s: float


@dataclass(frozen=True)
class StabilityRow:
    instance: str
    beta: float
    reps: int
    mean_objective: float
    rel_std: float
    mean_wall_clock_s: float


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


BENCHMARK_HEADER = [
    "instance", "algorithm", "reps", "mean_metric",
    "relative_error", "rel_std", "mean_wall_clock_s",
]
STABILITY_HEADER = [
    "instance", "beta", "reps", "mean_objective", "rel_std", "mean_wall_clock_s",
]


def write_benchmark_csv(path, rows: list[BenchmarkRow]) -> None:
    _write_csv(
        path,
        BENCHMARK_HEADER,
        [
            (r.instance, r.algorithm, r.reps, r.mean_metric,
             r.relative_error, r.rel_std, r.mean_wall_clock_s)
            for r in rows
        ],
    )


def load_benchmark_csv(path) -> list[BenchmarkRow]:
    with open(path, newline="") as fh:
        return [
            BenchmarkRow(
                instance=r["instance"],
                algorithm=r["algorithm"],
                reps=int(r["reps"]),
                mean_metric=float(r["mean_metric"]),
                relative_error=float(r["relative_error"]) if r["relative_error"] else None,
                rel_std=float(r["rel_std"]),
                mean_wall_clock_s=float(r["mean_wall_clock_s"]),
            )
            for r in csv.DictReader(fh)
        ]


def write_stability_csv(path, rows: list[StabilityRow]) -> None:
    _write_csv(
        path,
        STABILITY_HEADER,
        [
            (r.instance, r.beta, r.reps, r.mean_objective, r.rel_std, r.mean_wall_clock_s)
            for r in rows
        ],
    )


def load_stability_csv(path) -> list[StabilityRow]:
    with open(path, newline="") as fh:
        return [
            StabilityRow(
                instance=r["instance"],
                beta=float(r["beta"]),
                reps=int(r["reps"]),
                mean_objective=float(r["mean_objective"]),
                rel_std=float(r["rel_std"]),
                mean_wall_clock_s=float(r["mean_wall_clock_s"]),
            )
            for r in csv.DictReader(fh)
        ]


def _print_table(header: list[str], rows) -> None:
    cells = [header] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())


def _rel_std(values: np.ndarray) -> float:
    mean = float(np.mean(values))
    if mean == 0.0:
        return 0.0
    return float(np.std(values) / mean)


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# generate


GENERATE_DEFAULTS = {
    "devices": 100,
    "seed": 0,
    "overrides": {},
    "out": None,
}


def cmd_generate(args) -> int:
    cfg = _merge_config(
        GENERATE_DEFAULTS,
        _load_config_file(args.config),
        {"devices": args.devices, "seed": args.seed, "out": args.out},
    )
    cfg["overrides"] = {**cfg["overrides"], **_parse_set_entries(args.set)}
    scenario = generate_scenario(int(cfg["devices"]), int(cfg["seed"]), cfg["overrides"])
    out = Path(cfg["out"]) if cfg["out"] else _out_root() / f"scenario_n{cfg['devices']}_s{cfg['seed']}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(scenario.to_json())
    print(f"wrote {out} ({scenario.n_devices} devices)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# run


RUN_DEFAULTS = {
    "scenario": None,
    "devices": 100,
    "seed": 0,
    "t_max": 200,
    "algorithm": "awoa",
    "awoa": {},
    "ersom": {},
    "epochs": None,
    "beta": None,
    "max_init_attempts": 10_000,
    "overrides": {},
    "out": None,
}


def cmd_run(args) -> int:
    flags = {
        "scenario": args.scenario,
        "devices": args.devices,
        "seed": args.seed,
        "t_max": args.t_max,
        "algorithm": args.algorithm,
        "epochs": args.epochs,
        "beta": args.beta,
        "max_init_attempts": args.max_init_attempts,
        "out": args.out,
    }
    cfg = _merge_config(RUN_DEFAULTS, _load_config_file(args.config), flags)
    cfg["overrides"] = {**cfg["overrides"], **_parse_set_entries(args.set)}
    seed = int(cfg["seed"])
    if cfg["scenario"]:
        scenario = Scenario.from_json(Path(cfg["scenario"]).read_text())
    else:
        scenario = generate_scenario(int(cfg["devices"]), seed, cfg["overrides"])
    config = _build_jolt_config(cfg, cfg["algorithm"])
    result = jolt_run(scenario, config, seed=seed)
    out = Path(cfg["out"]) if cfg["out"] else _out_root() / f"run_s{seed}"
    write_run_artifacts(out, scenario, config, seed, result)
    resolved = {k: cfg[k] for k in sorted(cfg) if k != "out"}
    (out / "run_config.json").write_text(json.dumps(resolved, sort_keys=True, indent=2) + "\n")
    inc = result.incumbent
    print(f"objective={inc.objective!r} k={inc.deployment.k} tour_m={inc.report.tour_length_m!r}")
    print(f"artifacts in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# tsp-bench


TSP_DEFAULTS = {
    "instances": ["att48", "eil101", "tsp225"],
    "solvers": ["ersom", "rsom"],
    "reps": 10,
    "seed": 0,
    "epochs": 1000,
    "beta": 0.1,
    "t_r": 5,
    "zeta": 3,
    "workers": 1,
    "out": None,
}

_TSP_SOLVERS = ("ersom", "rsom", "brute")


def _tsp_task(task):
    name, points, solver, rep, master_seed, cfg_kw, inst_idx = task
    start = time.perf_counter()
    if solver == "brute":
        tour = brute_force_tour(points)
    else:
        rng = make_rng(np.random.SeedSequence([master_seed, inst_idx, rep]))
        config = ErsomConfig(**cfg_kw)
        runner = run_ersom if solver == "ersom" else run_rsom
        tour = runner(points, config, seed=rng)
    return (name, solver, rep, tour.length, time.perf_counter() - start)


def tsp_bench(
    instances: list[str],
    solvers: list[str],
    reps: int,
    seed: int,
    ersom_kw: dict | None = None,
    workers: int = 1,
):
    """Per-rep and summary rows for tour solvers on named instances.

    Rep r of every solver shares the seed stream (master, instance_index,
    r), so solver columns are paired. Returns (summary BenchmarkRows,
    per-rep tuples).
    """
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    for solver in solvers:
        if solver not in _TSP_SOLVERS:
            raise ParameterError(f"unknown solver {solver!r} (expected one of {_TSP_SOLVERS})")
    kw = {"g_max": 1000, "beta": 0.1, "t_r": 5, "zeta": 3}
    kw.update(ersom_kw or {})
    loaded = [(name, _resolve_instance(name)) for name in instances]
    for name, points in loaded:
        if "brute" in solvers and len(points) > 11:
            raise SizeLimitError(f"brute solver needs K <= 11, {name} has {len(points)}")
    tasks = []
    for ii, (name, points) in enumerate(loaded):
        for solver in solvers:
            for rep in range(reps):
                tasks.append((name, points, solver, rep, seed, kw, ii))
    results = sorted(_run_tasks(_tsp_task, tasks, workers), key=lambda r: (r[0], r[1], r[2]))
    summary = []
    for name, points in loaded:
        for solver in solvers:
            lengths = np.array([r[3] for r in results if r[0] == name and r[1] == solver])
            walls = np.array([r[4] for r in results if r[0] == name and r[1] == solver])
            mean = float(lengths.mean())
            opt = points.known_optimum
            summary.append(
                BenchmarkRow(
                    instance=name,
                    algorithm=solver,
                    reps=reps,
                    mean_metric=mean,
                    relative_error=(mean - opt) / opt if opt else None,
                    rel_std=_rel_std(lengths),
                    mean_wall_clock_s=float(walls.mean()),
                )
            )
    return summary, results


def cmd_tsp_bench(args) -> int:
    flags = {
        "instances": _csv_list(args.instances) if args.instances else None,
        "solvers": _csv_list(args.solvers) if args.solvers else None,
        "reps": args.reps,
        "seed": args.seed,
        "epochs": args.epochs,
        "beta": args.beta,
        "workers": args.workers,
        "out": args.out,
    }
    cfg = _merge_config(TSP_DEFAULTS, _load_config_file(args.config), flags)
    ersom_kw = {
        "g_max": int(cfg["epochs"]),
        "beta": float(cfg["beta"]),
        "t_r": int(cfg["t_r"]),
        "zeta": int(cfg["zeta"]),
    }
    summary, per_rep = tsp_bench(
        cfg["instances"], cfg["solvers"], int(cfg["reps"]), int(cfg["seed"]),
        ersom_kw, int(cfg["workers"]),
    )
    out = Path(cfg["out"]) if cfg["out"] else _out_root() / f"tsp_bench_s{cfg['seed']}"
    out.mkdir(parents=True, exist_ok=True)
    write_benchmark_csv(out / "summary.csv", summary)
    _write_csv(
        out / "reps.csv",
        ["instance", "solver", "rep", "length", "wall_clock_s"],
        per_rep,
    )
    resolved = {k: cfg[k] for k in sorted(cfg) if k != "out"}
    (out / "bench_config.json").write_text(json.dumps(resolved, sort_keys=True, indent=2) + "\n")
    _print_table(
        BENCHMARK_HEADER,
        [(r.instance, r.algorithm, r.reps, r.mean_metric, r.relative_error,
          r.rel_std, r.mean_wall_clock_s) for r in summary],
    )
    print(f"tables in {out}")
    return EXIT_OK


def load_tsp_reps_csv(path):
    with open(path, newline="") as fh:
        return [
            (r["instance"], r["solver"], int(r["rep"]), float(r["length"]), float(r["wall_clock_s"]))
            for r in csv.DictReader(fh)
        ]


# ---------------------------------------------------------------------------
# compare


COMPARE_DEFAULTS = {
    "devices": 100,
    "algorithms": ["awoa", "woa"],
    "reps": 10,
    "seed": 0,
    "t_max": 200,
    "awoa": {},
    "ersom": {},
    "epochs": None,
    "beta": None,
    "max_init_attempts": 10_000,
    "overrides": {},
    "workers": 1,
    "out": None,
}


def _compare_task(task):
    algorithm, rep, scenario, config, jolt_seed = task
    start = time.perf_counter()
    result = jolt_run(scenario, config, seed=jolt_seed)
    wall = time.perf_counter() - start
    inc = result.incumbent
    return (algorithm, rep, inc.objective, inc.deployment.k, result.evaluations, wall)


def compare_algorithms(
    devices: int,
    algorithms: list[str],
    reps: int,
    seed: int,
    t_max: int,
    overrides: dict | None = None,
    awoa_kw: dict | None = None,
    ersom_kw: dict | None = None,
    max_init_attempts: int = 10_000,
    workers: int = 1,
):
    """Paired comparison: rep r of every algorithm shares one scenario and
    one optimizer seed, so per-rep objectives are directly comparable.
    Returns (summary BenchmarkRows, per-rep tuples)."""
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    if not algorithms:
        raise ParameterError("need at least one algorithm")
    base_cfg = {
        "t_max": t_max,
        "awoa": awoa_kw or {},
        "ersom": ersom_kw or {},
        "epochs": None,
        "beta": None,
        "max_init_attempts": max_init_attempts,
    }
    tasks = []
    for rep in range(reps):
        scenario = generate_scenario(
            devices, np.random.SeedSequence([seed, rep, 0]), overrides
        )
        jolt_seed = np.random.SeedSequence([seed, rep, 1])
        for algorithm in algorithms:
            config = _build_jolt_config(base_cfg, algorithm)
            tasks.append((algorithm, rep, scenario, config, jolt_seed))
    results = sorted(_run_tasks(_compare_task, tasks, workers), key=lambda r: (r[0], r[1]))
    summary = []
    label = f"random{devices}"
    for algorithm in algorithms:
        objs = np.array([r[2] for r in results if r[0] == algorithm])
        walls = np.array([r[5] for r in results if r[0] == algorithm])
        summary.append(
            BenchmarkRow(
                instance=label,
                algorithm=algorithm,
                reps=reps,
                mean_metric=float(objs.mean()),
                relative_error=None,
                rel_std=_rel_std(objs),
                mean_wall_clock_s=float(walls.mean()),
            )
        )
    return summary, results


def cmd_compare(args) -> int:
    flags = {
        "devices": args.devices,
        "algorithms": _csv_list(args.algorithms) if args.algorithms else None,
        "reps": args.reps,
        "seed": args.seed,
        "t_max": args.t_max,
        "epochs": args.epochs,
        "beta": args.beta,
        "max_init_attempts": args.max_init_attempts,
        "workers": args.workers,
        "out": args.out,
    }
    cfg = _merge_config(COMPARE_DEFAULTS, _load_config_file(args.config), flags)
    cfg["overrides"] = {**cfg["overrides"], **_parse_set_entries(args.set)}
    ersom_kw = dict(cfg["ersom"])
    if cfg["epochs"] is not None:
        ersom_kw["g_max"] = int(cfg["epochs"])
    if cfg["beta"] is not None:
        ersom_kw["beta"] = float(cfg["beta"])
    summary, per_rep = compare_algorithms(
        int(cfg["devices"]), cfg["algorithms"], int(cfg["reps"]), int(cfg["seed"]),
        int(cfg["t_max"]), cfg["overrides"], cfg["awoa"], ersom_kw,
        int(cfg["max_init_attempts"]), int(cfg["workers"]),
    )
    out = Path(cfg["out"]) if cfg["out"] else _out_root() / f"compare_s{cfg['seed']}"
    out.mkdir(parents=True, exist_ok=True)
    write_benchmark_csv(out / "summary.csv", summary)
    _write_csv(
        out / "reps.csv",
        ["algorithm", "rep", "objective", "k", "evaluations", "wall_clock_s"],
        per_rep,
    )
    resolved = {k: cfg[k] for k in sorted(cfg) if k != "out"}
    (out / "compare_config.json").write_text(json.dumps(resolved, sort_keys=True, indent=2) + "\n")
    _print_table(
        BENCHMARK_HEADER,
        [(r.instance, r.algorithm, r.reps, r.mean_metric, r.relative_error,
          r.rel_std, r.mean_wall_clock_s) for r in summary],
    )
    print(f"tables in {out}")
    return EXIT_OK


def load_compare_reps_csv(path):
    with open(path, newline="") as fh:
        return [
            (r["algorithm"], int(r["rep"]), float(r["objective"]), int(r["k"]),
             int(r["evaluations"]), float(r["wall_clock_s"]))
            for r in csv.DictReader(fh)
        ]


# ---------------------------------------------------------------------------
# stability


STABILITY_DEFAULTS = {
    "instances": ["eil101"],
    "betas": [0.02, 0.1, 0.5],
    "reps": 10,
    "seed": 0,
    "t_max": 200,
    "epochs": 300,
    "awoa": {},
    "max_init_attempts": 10_000,
    "overrides": {},
    "workers": 1,
    "out": None,
}


def _stability_task(task):
    name, beta, rep, scenario, config, jolt_seed = task
    start = time.perf_counter()
    result = jolt_run(scenario, config, seed=jolt_seed)
    wall = time.perf_counter() - start
    inc = result.incumbent
    return (name, beta, rep, inc.objective, inc.deployment.k, wall)


def stability_sweep(
    instances: list[str],
    betas: list[float],
    reps: int,
    seed: int,
    t_max: int,
    epochs: int = 300,
    overrides: dict | None = None,
    awoa_kw: dict | None = None,
    max_init_attempts: int = 10_000,
    workers: int = 1,
):
    """Learning-rate sweep on instance-derived scenarios.

    The scenario is fixed per instance (seed stream (master, instance));
    rep r uses optimizer seed (master, instance, r) shared across betas, so
    beta columns are paired. Returns (StabilityRows, per-rep tuples)."""
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    for beta in betas:
        if not (0.0 < beta <= 1.0):
            raise ParameterError(f"beta values must be in (0, 1], got {beta}")
    tasks = []
    for ii, name in enumerate(instances):
        points = _resolve_instance(name)
        scenario = scenario_from_points(points, np.random.SeedSequence([seed, ii]), overrides)
        for beta in betas:
            config = _build_jolt_config(
                {
                    "t_max": t_max,
                    "awoa": awoa_kw or {},
                    "ersom": {"beta": beta, "g_max": epochs},
                    "epochs": None,
                    "beta": None,
                    "max_init_attempts": max_init_attempts,
                },
                "awoa",
            )
            for rep in range(reps):
                jolt_seed = np.random.SeedSequence([seed, ii, rep])
                tasks.append((name, beta, rep, scenario, config, jolt_seed))
    results = sorted(_run_tasks(_stability_task, tasks, workers), key=lambda r: (r[0], r[1], r[2]))
    rows = []
    for name in instances:
        for beta in betas:
            objs = np.array([r[3] for r in results if r[0] == name and r[1] == beta])
            walls = np.array([r[5] for r in results if r[0] == name and r[1] == beta])
            rows.append(
                StabilityRow(
                    instance=name,
                    beta=beta,
                    reps=reps,
                    mean_objective=float(objs.mean()),
                    rel_std=_rel_std(objs),
                    mean_wall_clock_s=float(walls.mean()),
                )
            )
    return rows, results


def cmd_stability(args) -> int:
    flags = {
        "instances": _csv_list(args.instances) if args.instances else None,
        "betas": _float_list(args.betas) if args.betas else None,
        "reps": args.reps,
        "seed": args.seed,
        "t_max": args.t_max,
        "epochs": args.epochs,
        "max_init_attempts": args.max_init_attempts,
        "workers": args.workers,
        "out": args.out,
    }
    cfg = _merge_config(STABILITY_DEFAULTS, _load_config_file(args.config), flags)
    cfg["overrides"] = {**cfg["overrides"], **_parse_set_entries(args.set)}
    rows, per_rep = stability_sweep(
        cfg["instances"], [float(b) for b in cfg["betas"]], int(cfg["reps"]),
        int(cfg["seed"]), int(cfg["t_max"]), int(cfg["epochs"]),
        cfg["overrides"], cfg["awoa"], int(cfg["max_init_attempts"]), int(cfg["workers"]),
    )
    out = Path(cfg["out"]) if cfg["out"] else _out_root() / f"stability_s{cfg['seed']}"
    out.mkdir(parents=True, exist_ok=True)
    write_stability_csv(out / "summary.csv", rows)
    _write_csv(
        out / "reps.csv",
        ["instance", "beta", "rep", "objective", "k", "wall_clock_s"],
        per_rep,
    )
    resolved = {k: cfg[k] for k in sorted(cfg) if k != "out"}
    (out / "stability_config.json").write_text(json.dumps(resolved, sort_keys=True, indent=2) + "\n")
    _print_table(
        STABILITY_HEADER,
        [(r.instance, r.beta, r.reps, r.mean_objective, r.rel_std, r.mean_wall_clock_s)
         for r in rows],
    )
    print(f"tables in {out}")
    return EXIT_OK


def load_stability_reps_csv(path):
    with open(path, newline="") as fh:
        return [
            (r["instance"], float(r["beta"]), int(r["rep"]), float(r["objective"]),
             int(r["k"]), float(r["wall_clock_s"]))
            for r in csv.DictReader(fh)
        ]


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="joltopt",
        description="Energy-minimizing stop-point deployment, phase shifts and tours.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help=f"output path (default under ${OUT_ENV_VAR} or .)")

    p = sub.add_parser("generate", help="write a scenario JSON file")
    common(p)
    p.add_argument("--devices", type=int, default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="scenario parameter override, repeatable")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="one optimization run with artifacts")
    common(p)
    p.add_argument("--scenario", help="scenario JSON file (else generated from --devices)")
    p.add_argument("--devices", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=int, default=None)
    p.add_argument("--algorithm", choices=("awoa", "woa"), default=None)
    p.add_argument("--epochs", type=int, default=None, help="tour-learning epochs per evaluation")
    p.add_argument("--beta", type=float, default=None, help="tour-learning rate")
    p.add_argument("--max-init-attempts", dest="max_init_attempts", type=int, default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tsp-bench", help="tour-solver benchmark on TSP instances")
    common(p)
    p.add_argument("--instances", help="comma-separated bundled names or .tsp paths")
    p.add_argument("--solvers", help="comma-separated subset of ersom,rsom,brute")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_tsp_bench)

    p = sub.add_parser("compare", help="paired candidate-generator comparison")
    common(p)
    p.add_argument("--devices", type=int, default=None)
    p.add_argument("--algorithms", help="comma-separated subset of awoa,woa")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--max-init-attempts", dest="max_init_attempts", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stability", help="tour learning-rate sweep on derived scenarios")
    common(p)
    p.add_argument("--instances", help="comma-separated instance names")
    p.add_argument("--betas", help="comma-separated learning rates")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--max-init-attempts", dest="max_init_attempts", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_stability)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, TsplibParseError, InstanceLookupError, SizeLimitError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"configuration error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InitializationError, ConstraintViolationError, UnreachableDeviceError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
