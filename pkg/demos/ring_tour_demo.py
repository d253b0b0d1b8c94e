"""Watch the elastic ring organize into a visiting order.

Trains the self-organizing ring on a small random stop set, logging how
the cell count breathes (insertions every t_r epochs, deletions pruning
back to the 2K ceiling) and how the induced closed tour shortens. The
final tour is checked against exhaustive enumeration, which is tractable
at this size.
"""

from __future__ import annotations

import numpy as np

from joltopt.ersom import ErsomConfig, brute_force_tour, extract_tour, run_ersom
from joltopt.scenario import make_rng, tour_length


def main() -> None:
    """Train the ring on ten stops and compare against the optimum."""
    rng = make_rng(7)
    stops = rng.uniform(0.0, 1000.0, size=(10, 2))
    cfg = ErsomConfig(beta=0.1, t_r=5, zeta=3, g_max=120)

    print(f"stops: {len(stops)}   epochs: {cfg.g_max}   beta: {cfg.beta}")
    print()
    print("epoch  ring cells  tour length (m)")

    snapshots = {0, 5, 15, 30, 60, 90, cfg.g_max}

    def observer(epoch: int, ring) -> None:
        if epoch not in snapshots:
            return
        order = extract_tour(ring, stops)
        length = tour_length(stops, order)
        print(f"{epoch:5d}  {len(ring.weights):10d}  {length:15.1f}")

    tour = run_ersom(stops, cfg, seed=3, observer=observer)
    best = brute_force_tour(stops)

    print()
    print(f"learned tour:  {tour.order}")
    print(f"optimal tour:  {best.order}")
    print(f"learned length: {tour.length:10.1f} m")
    print(f"optimal length: {best.length:10.1f} m")
    print(f"excess: {100.0 * (tour.length / best.length - 1.0):.2f}%")


if __name__ == "__main__":
    main()
