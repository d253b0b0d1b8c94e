"""Whale-style stochastic search over variable-length stop-point sets.

Each individual in the population is one stop point (x, y); the whole
population is one deployment. A step moves every individual either toward
the best-known deployment (encircling or log-spiral) or toward a random
individual of the current population (global search), with the branch
chosen by the coefficient magnitude |A| and a coin flip p.

The adaptive variant replaces the linear decay of the control parameter
``a`` with a slow-start cosine-weighted cubic and adds a chaotic partial
mutation that fires once the best objective has stagnated for ``tau``
iterations. The plain baseline is the same machinery with the linear
schedule and mutation disabled.

Candidate populations are generated here but never evaluated here; the
outer optimization loop owns evaluation and acceptance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .scenario import AreaBounds


@dataclass(frozen=True)
class AwoaConfig:
    pop_size: int = 100  # cap on the initial stop-point count draw
    b: float = 1.0  # spiral shape constant
    tau: int = 30  # stagnation threshold before mutation fires
    rho: float = 1.0  # mutation scale
    mu: float = 4.0  # logistic-map control factor
    mutation_fraction: float = 0.3
    schedule: str = "nonlinear"  # "nonlinear" | "linear"
    mutation_enabled: bool = True

    def __post_init__(self):
        if self.pop_size < 1:
            raise ParameterError(f"pop_size must be >= 1, got {self.pop_size}")
        if self.tau < 1:
            raise ParameterError(f"tau must be >= 1, got {self.tau}")
        if self.rho < 0.0:
            raise ParameterError(f"rho must be >= 0, got {self.rho}")
        if not (0.0 <= self.mutation_fraction <= 1.0):
            raise ParameterError(f"mutation_fraction must be in [0, 1], got {self.mutation_fraction}")
        if self.schedule not in ("nonlinear", "linear"):
            raise ParameterError(f"schedule must be 'nonlinear' or 'linear', got {self.schedule!r}")


def woa_preset(base: AwoaConfig | None = None) -> AwoaConfig:
    """Baseline configuration: linear schedule, no mutation."""
    return replace(base or AwoaConfig(), schedule="linear", mutation_enabled=False)


def nonlinear_a(t: int, t_max: int) -> float:
    """Slow-start decay (2 - 2 t^3/t_max^3) cos(pi t / (2 t_max)), from 2 to 0."""
    if t_max < 1:
        raise ParameterError(f"t_max must be >= 1, got {t_max}")
    if not 0 <= t <= t_max:
        raise ParameterError(f"t must be in [0, {t_max}], got {t}")
    frac = t / t_max
    return (2.0 - 2.0 * frac**3) * math.cos(0.5 * math.pi * frac)


def linear_a(t: int, t_max: int) -> float:
    """Classic linear decay 2 (1 - t/t_max)."""
    if t_max < 1:
        raise ParameterError(f"t_max must be >= 1, got {t_max}")
    if not 0 <= t <= t_max:
        raise ParameterError(f"t must be in [0, {t_max}], got {t}")
    return 2.0 * (1.0 - t / t_max)


@dataclass(frozen=True)
class CoefficientSet:
    """One individual's draw of the step coefficients."""

    a: float
    A: np.ndarray  # (2,) 2a*r - a, so |A| <= a componentwise
    C: np.ndarray  # (2,) 2*r'
    p: float
    l: float
    b: float


def sample_coefficients(a: float, b: float, rng: np.random.Generator) -> CoefficientSet:
    """Draw order is part of the contract: r (2), r' (2), p, l."""
    r = rng.random(2)
    r_prime = rng.random(2)
    p = float(rng.random())
    l = 2.0 * float(rng.random()) - 1.0
    return CoefficientSet(a=a, A=2.0 * a * r - a, C=2.0 * r_prime, p=p, l=l, b=b)


@dataclass
class SearchState:
    """Single-owner mutable search bookkeeping.

    population is the current deployment (one row per stop point), best the
    incumbent; both may differ in length. iteration runs 1..t_max, advanced
    by start_iteration(); record() maintains the stagnation counter.
    """

    population: np.ndarray
    best: np.ndarray
    best_objective: float
    t_max: int
    rng: np.random.Generator
    bounds: AreaBounds
    iteration: int = 0
    stagnation: int = 0
    w_c: float = 0.7

    def __post_init__(self):
        self.population = np.atleast_2d(np.asarray(self.population, dtype=float))
        self.best = np.atleast_2d(np.asarray(self.best, dtype=float))
        if self.t_max < 1:
            raise ParameterError(f"t_max must be >= 1, got {self.t_max}")

    def start_iteration(self) -> int:
        if self.iteration >= self.t_max:
            raise ParameterError("iteration budget exhausted")
        self.iteration += 1
        return self.iteration

    def record(self, improved: bool) -> None:
        if improved:
            self.stagnation = 0
        else:
            self.stagnation += 1


def move_individual(
    x: np.ndarray,
    x_star: np.ndarray,
    population: np.ndarray,
    coeffs: CoefficientSet,
    rng: np.random.Generator,
) -> np.ndarray:
    """One individual's raw (unclamped) move.

    |A| (max norm) > 1: step off a random individual of the current
    population (global search; this is the only branch that draws more
    randomness). Otherwise p < 0.5 encircles the best, else the log-spiral
    wraps it; the spiral keeps C inside the modulus.
    """
    if float(np.max(np.abs(coeffs.A))) > 1.0:
        x_rand = population[int(rng.integers(len(population)))]
        return x_rand - coeffs.A * np.abs(coeffs.C * x_rand - x)
    if coeffs.p < 0.5:
        return x_star - coeffs.A * np.abs(coeffs.C * x_star - x)
    spiral = math.exp(coeffs.b * coeffs.l) * math.cos(2.0 * math.pi * coeffs.l)
    return np.abs(coeffs.C * x_star - x) * spiral + x_star


def woa_update(state: SearchState, a: float, b: float = 1.0) -> np.ndarray:
    """Candidate population: per-individual coefficient draws and moves.

    Individual j pairs with row min(j, K*-1) of the best deployment (the
    two can differ in length); output is clamped to the area bounds.
    """
    pop = state.population
    k_best = len(state.best)
    out = np.empty_like(pop)
    for j in range(len(pop)):
        coeffs = sample_coefficients(a, b, state.rng)
        x_star = state.best[min(j, k_best - 1)]
        out[j] = move_individual(pop[j], x_star, pop, coeffs, state.rng)
    return state.bounds.clamp(out)


# fixed points / pre-periodic points of w -> 4w(1-w); orbits starting here
# collapse, so the state is reseeded away from them
DEGENERATE_CHAOS = (0.0, 0.25, 0.5, 0.75, 1.0)


def fresh_chaos(rng: np.random.Generator) -> float:
    while True:
        w = float(rng.random())
        if 0.0 < w < 1.0 and w not in DEGENERATE_CHAOS:
            return w


def advance_chaos(w: float, rng: np.random.Generator, mu: float = 4.0) -> float:
    """One logistic-map step with reseeding away from degenerate orbits.

    Guarded on entry (a stored degenerate value) and on exit (rounding can
    land exactly on 1.0 when w is within ~1e-8 of 0.5).
    """
    if not (0.0 < w < 1.0) or w in DEGENERATE_CHAOS:
        w = fresh_chaos(rng)
    w = mu * w * (1.0 - w)
    if not (0.0 < w < 1.0) or w in DEGENERATE_CHAOS:
        w = fresh_chaos(rng)
    return w


def partial_mutation(
    state: SearchState,
    fraction: float,
    rho: float,
    mu: float = 4.0,
    positions: np.ndarray | None = None,
) -> np.ndarray:
    """Perturb a random ceil(fraction*K) subset by the same chaotic scalar.

    Operates on `positions` when given (the freshly generated candidate),
    else on the current population; never in place. The chaotic state
    advances exactly once per call, before the subset draw, and persists on
    the state. Both coordinates of a selected individual shift by
    rho * w_c.
    """
    base = state.population if positions is None else positions
    out = np.array(base, dtype=float)
    state.w_c = advance_chaos(state.w_c, state.rng, mu)
    m = math.ceil(fraction * len(out))
    chosen = state.rng.permutation(len(out))[:m]
    out[chosen] += rho * state.w_c
    return out


def awoa_step(state: SearchState, config: AwoaConfig) -> np.ndarray:
    """One candidate generation at the state's current iteration.

    Schedule -> per-individual moves -> (if stagnated >= tau and enabled)
    partial mutation. Returns Q unevaluated; the population length never
    changes here.
    """
    sched = nonlinear_a if config.schedule == "nonlinear" else linear_a
    a = sched(state.iteration, state.t_max)
    q = woa_update(state, a, config.b)
    if config.mutation_enabled and state.stagnation >= config.tau:
        q = partial_mutation(state, config.mutation_fraction, config.rho, config.mu, positions=q)
        q = state.bounds.clamp(q)
    assert len(q) == len(state.population)
    return q


__all__ = [
    "AwoaConfig",
    "CoefficientSet",
    "DEGENERATE_CHAOS",
    "SearchState",
    "advance_chaos",
    "awoa_step",
    "fresh_chaos",
    "linear_a",
    "move_individual",
    "nonlinear_a",
    "partial_mutation",
    "sample_coefficients",
    "woa_preset",
    "woa_update",
]
