"""A miniature version of the benchmark sweep, written to CSV.

The full protocol runs 50 trials for each grid side and each k in
{0.25c, 0.5c, 0.75c, c} across the four storage/retrieval variant pairs.
This demo shrinks that to something that finishes in seconds, writes the
same CSV schema, and prints a small aggregate table.  The TypeScript
frontend under ../frontend renders heatmaps and line plots from these CSVs.
"""

import statistics
from collections import defaultdict

from gridstore.experiments import (
    ExperimentConfig,
    rows_to_csv,
    run_ablation,
    run_experiment,
    write_ablation_csv,
)

OUT_ROWS = "demo_trials.csv"
OUT_ABLATION = "demo_ablation.csv"


def main() -> None:
    config = ExperimentConfig(
        grid_sides=(7, 9),
        k_fractions=(0.25, 0.5, 0.75, 1.0),
        trials=10,
        seed=2024,
        variants=(("BaseS", "BaseR"), ("ImpS", "ImpR")),
    )
    rows = run_experiment(config)
    with open(OUT_ROWS, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    print(f"wrote {len(rows)} trial rows to {OUT_ROWS}\n")

    groups = defaultdict(list)
    for row in rows:
        groups[(row.r, row.k_requested, row.storage_algo, row.retrieval_algo)].append(row)
    print("side  k   variant        relocations     io-usage")
    for (side, k, storage, retrieval), bucket in sorted(groups.items()):
        reloc = statistics.mean(r.relocations for r in bucket)
        io = statistics.mean(r.io_usage for r in bucket)
        print(f"{side:3d} {k:3d}   {storage}+{retrieval}   {reloc:8.1f}     {io:8.1f}")

    ablation = run_ablation([9], range(0, 6), trials=20, seed=77)
    write_ablation_csv(ablation, OUT_ABLATION)
    print(f"\nwrote {len(ablation)} ablation rows to {OUT_ABLATION}")


if __name__ == "__main__":
    main()
