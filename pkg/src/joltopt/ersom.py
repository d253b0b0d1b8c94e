"""Elastic-ring self-organizing map for closed-tour construction.

A ring of neural cells stretches over the stop points by competitive
learning: each presented stop pulls its nearest cell and that cell's two
ring neighbors. Cells that win often mark crowded regions, so a new cell is
spliced next to the busiest cell every few epochs; cells that never win are
deleted (only while the ring holds more than twice as many cells as stops).
The final tour reads the stops off in ring order of their matched cells.

Disabling deletion gives the plain growing-ring baseline used for
comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import ParameterError, SizeLimitError
from .scenario import PointSet, make_rng, tour_length

BRUTE_FORCE_LIMIT = 11


@dataclass(frozen=True)
class ErsomConfig:
    beta: float = 0.1  # learning rate
    t_r: int = 5  # insertion period, epochs
    zeta: int = 3  # deletion period = zeta * t_r epochs
    g_max: int = 300  # training epochs
    deletion_enabled: bool = True

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ParameterError(f"beta must be in (0, 1], got {self.beta}")
        if self.t_r < 1 or self.zeta < 1 or self.g_max < 1:
            raise ParameterError("t_r, zeta and g_max must be positive")


@dataclass
class Ring:
    """Ordered circular list of cells; index order is ring order."""

    weights: np.ndarray  # (n, 2)
    counters: np.ndarray  # (n,) win counts

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.counters = np.asarray(self.counters, dtype=np.int64)
        if len(self.weights) < 3:
            raise ParameterError("a ring needs at least 3 cells")
        if len(self.weights) != len(self.counters):
            raise ParameterError("weights/counters length mismatch")

    @property
    def size(self) -> int:
        return len(self.weights)

    def successor(self, i: int) -> int:
        return (i + 1) % self.size

    def predecessor(self, i: int) -> int:
        return (i - 1) % self.size


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: float


def init_ring(stops: np.ndarray, k: int) -> Ring:
    """Cells on a circle around the stop centroid.

    max(3, ceil(K/2)) cells; radius 25% of the stop bounding-box diagonal
    (zero-extent stop sets collapse the circle onto the centroid).
    """
    n0 = max(3, math.ceil(k / 2))
    centroid = stops.mean(axis=0)
    span = stops.max(axis=0) - stops.min(axis=0)
    radius = 0.25 * math.hypot(span[0], span[1])
    angles = 2.0 * np.pi * np.arange(n0) / n0
    weights = centroid[None, :] + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return Ring(weights=weights, counters=np.zeros(n0, dtype=np.int64))


def find_winner(ring: Ring, stop) -> int:
    """Nearest cell; ties resolve to the smallest ring index."""
    diff = ring.weights - np.asarray(stop, dtype=float)
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def update_weights(ring: Ring, winner: int, stop, beta: float) -> None:
    """Pull the winner and its two ring neighbors toward the stop; count
    the win on the winner only.

    Scalar arithmetic on the three cells: this sits in the innermost loop
    and the indices are distinct for any ring of 3 or more cells.
    """
    w = ring.weights
    sx, sy = float(stop[0]), float(stop[1])
    n = len(w)
    for i in (winner - 1 if winner else n - 1, winner, winner + 1 if winner < n - 1 else 0):
        w[i, 0] += beta * (sx - w[i, 0])
        w[i, 1] += beta * (sy - w[i, 1])
    ring.counters[winner] += 1


def insert_cell(ring: Ring, rng) -> int:
    """Split the busiest cell's longer adjacent edge with a fresh cell.

    The busiest cell p is the counter argmax (ties broken uniformly at
    random). The new cell sits at the midpoint of the edge toward whichever
    neighbor is farther (the predecessor on exact ties) and starts with a
    zero counter. Returns the new cell's ring index.
    """
    top = np.flatnonzero(ring.counters == ring.counters.max())
    p = int(top[0]) if len(top) == 1 else int(top[rng.integers(len(top))])
    prev_i, next_i = ring.predecessor(p), ring.successor(p)
    d_prev = np.linalg.norm(ring.weights[prev_i] - ring.weights[p])
    d_next = np.linalg.norm(ring.weights[next_i] - ring.weights[p])
    if d_prev >= d_next:
        midpoint = 0.5 * (ring.weights[prev_i] + ring.weights[p])
        pos = p  # between p-1 and p
    else:
        midpoint = 0.5 * (ring.weights[p] + ring.weights[next_i])
        pos = p + 1  # between p and p+1
    ring.weights = np.insert(ring.weights, pos, midpoint, axis=0)
    ring.counters = np.insert(ring.counters, pos, 0)
    return pos


def delete_cell(ring: Ring, k_stops: int) -> bool:
    """Remove the min-counter cell (smallest index on ties) while the ring
    exceeds twice the stop count. Returns False (no-op) when at or under
    the ceiling."""
    # floor of 3 keeps circular adjacency meaningful when k_stops == 1
    if ring.size <= max(2 * k_stops, 3):
        return False
    d = int(np.argmin(ring.counters))
    ring.weights = np.delete(ring.weights, d, axis=0)
    ring.counters = np.delete(ring.counters, d)
    return True


def extract_tour(ring: Ring, stops: np.ndarray) -> tuple[int, ...]:
    """Stops sorted by their matched cells' ring positions.

    Shared matches (and coincident stops) order by stop index, so the
    output is always a permutation.
    """
    matches = np.array([find_winner(ring, s) for s in stops])
    return tuple(int(i) for i in np.lexsort((np.arange(len(stops)), matches)))


def run_ersom(
    stops,
    config: ErsomConfig | None = None,
    seed=0,
    observer=None,
) -> Tour:
    """Train the ring on the stop set and read off the closed tour.

    Stops are presented in fixed index order every epoch. Insertion runs
    every `t_r` epochs; the deletion checkpoint every `zeta * t_r` epochs
    trims min-counter cells until the ring is back at 2K (skipped entirely
    for the no-deletion baseline, making both variants trajectory-identical
    until the first checkpoint past the ceiling).

    `observer(epoch, ring)` is invoked once on the initial ring (epoch 0)
    and after every epoch; it must not mutate the ring.
    """
    pts = stops.points if isinstance(stops, PointSet) else np.atleast_2d(np.asarray(stops, dtype=float))
    config = config or ErsomConfig()
    k = len(pts)
    if k < 1:
        raise ParameterError("need at least one stop")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    ring = init_ring(pts, k)
    if observer is not None:
        observer(0, ring)
    for epoch in range(1, config.g_max + 1):
        for j in range(k):
            winner = find_winner(ring, pts[j])
            update_weights(ring, winner, pts[j], config.beta)
        if epoch % config.t_r == 0:
            insert_cell(ring, rng)
        if config.deletion_enabled and epoch % (config.zeta * config.t_r) == 0:
            while delete_cell(ring, k):
                pass
        if observer is not None:
            observer(epoch, ring)
    order = extract_tour(ring, pts)
    return Tour(order=order, length=tour_length(pts, order))


def run_rsom(stops, config: ErsomConfig | None = None, seed=0, observer=None) -> Tour:
    """Growing-ring baseline: identical dynamics with deletion disabled."""
    config = config or ErsomConfig()
    base = ErsomConfig(
        beta=config.beta,
        t_r=config.t_r,
        zeta=config.zeta,
        g_max=config.g_max,
        deletion_enabled=False,
    )
    return run_ersom(stops, base, seed=seed, observer=observer)


def brute_force_tour(stops) -> Tour:
    """Exact minimum closed tour by enumeration; K <= 11 only.

    Fixes stop 0 and skips reversed duplicates, i.e. (K-1)!/2 candidates.
    """
    pts = stops.points if isinstance(stops, PointSet) else np.atleast_2d(np.asarray(stops, dtype=float))
    k = len(pts)
    if k > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force limited to K <= {BRUTE_FORCE_LIMIT}, got {k}")
    if k == 1:
        return Tour(order=(0,), length=0.0)
    if k == 2:
        return Tour(order=(0, 1), length=tour_length(pts, (0, 1)))
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    d = dist.tolist()
    best_len = math.inf
    best_order: tuple[int, ...] = ()
    for perm in permutations(range(1, k)):
        if perm[0] > perm[-1]:
            continue
        total = d[0][perm[0]]
        prev = perm[0]
        for node in perm[1:]:
            total += d[prev][node]
            if total >= best_len:
                break
            prev = node
        else:
            total += d[prev][0]
            if total < best_len:
                best_len = total
                best_order = (0,) + perm
    return Tour(order=best_order, length=float(best_len))


def ring_snapshot_rows(epoch: int, ring: Ring) -> list[tuple[int, int, float, float, int]]:
    """Rows (epoch, cell index, x, y, counter) for CSV export."""
    return [
        (epoch, i, float(ring.weights[i, 0]), float(ring.weights[i, 1]), int(ring.counters[i]))
        for i in range(ring.size)
    ]


__all__ = [
    "BRUTE_FORCE_LIMIT",
    "ErsomConfig",
    "Ring",
    "Tour",
    "brute_force_tour",
    "delete_cell",
    "extract_tour",
    "find_winner",
    "init_ring",
    "insert_cell",
    "ring_snapshot_rows",
    "run_ersom",
    "run_rsom",
    "update_weights",
]
