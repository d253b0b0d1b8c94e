"""Compare the elastic ring against its no-deletion ancestor on TSPLIB data.

Runs both tour learners on att48 for a handful of seeds and prints mean
tour length, gap to the published optimum, and wall-clock time. The
baseline keeps every inserted cell, so it drags an ever-growing ring
through every epoch; the elastic version prunes idle cells back to the
2K ceiling, reaching equally good tours with less work per epoch.
"""

from __future__ import annotations

from joltopt.cli import tsp_bench
from joltopt.scenario import KNOWN_OPTIMA


def main() -> None:
    """Benchmark both ring variants on att48."""
    instance = "att48"
    reps = 3
    epochs = 2000
    print(f"instance: {instance}   published optimum: {KNOWN_OPTIMA[instance]:.0f}")
    print(f"reps per solver: {reps}   epochs: {epochs}")
    print()

    summary, _ = tsp_bench(
        [instance], ["ersom", "rsom"], reps=reps, seed=1, ersom_kw={"g_max": epochs}
    )

    print("solver  mean length  gap to opt  rel std   mean wall (s)")
    for row in summary:
        gap = f"{100 * row.relative_error:9.2f}%" if row.relative_error is not None else "       n/a"
        print(
            f"{row.algorithm:<6s}  {row.mean_metric:11.1f}  {gap}"
            f"  {row.rel_std:7.4f}  {row.mean_wall_clock_s:13.3f}"
        )

    ersom = next(r for r in summary if r.algorithm == "ersom")
    rsom = next(r for r in summary if r.algorithm == "rsom")
    print()
    print(
        f"deletion changes tour length by "
        f"{100 * (ersom.mean_metric / rsom.mean_metric - 1):+.2f}% and cuts wall"
        f" clock to {100 * ersom.mean_wall_clock_s / rsom.mean_wall_clock_s:.0f}%"
        " of the baseline"
    )


if __name__ == "__main__":
    main()
