"""Seeded experiment harness: storage/retrieval variant sweeps to CSV.

Each trial draws a random arrival order and a seeded departure stream for a
square grid at 100% density, runs one storage algorithm and one retrieval
policy, and reports the episode counters as one CSV row.  Instance
randomness depends only on (master seed, side, fraction index, trial index),
never on the variant, so variant comparisons are matched pairs by
construction.  Wall-clock timing columns are measured but excluded from the
determinism guarantee; everything else is a pure function of the config.
"""

from __future__ import annotations

import csv
import io
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .grid import Action, GridSpec, StorageError
from .retrieval import run_episode
from .sequences import OnlinePerturbationStream
from .solvers import (
    DEFAULT_BACKTRACK_BUDGET,
    SolverConfig,
    base_storage,
    find_robust_arrangement,
    find_robust_enhanced,
    max_k_search,
)

STORAGE_ALGOS = ("BaseS", "ImpS")
RETRIEVAL_ALGOS = ("BaseR", "ImpR")
ALL_VARIANTS = tuple((s, r) for s in STORAGE_ALGOS for r in RETRIEVAL_ALGOS)
DEFAULT_VARIANTS = (("BaseS", "BaseR"), ("ImpS", "ImpR"))
DEFAULT_FRACTIONS = (0.25, 0.5, 0.75, 1.0)
WORKERS_ENV = "GRIDSTORE_WORKERS"

_MASK = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Deterministic 64-bit mix of integers (splitmix64 finalizer per part)."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h = (h ^ (p & _MASK)) & _MASK
        h = (h * 0xBF58476D1CE4E5B9) & _MASK
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK
        h ^= h >> 31
    return h


@dataclass(frozen=True)
class ExperimentConfig:
    grid_sides: tuple[int, ...]
    k_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    trials: int = 50
    seed: int = 0
    variants: tuple[tuple[str, str], ...] = DEFAULT_VARIANTS
    output_path: str | None = None
    workers: int = 0  # 0: take GRIDSTORE_WORKERS, default 1
    keep_logs: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid_sides", tuple(self.grid_sides))
        object.__setattr__(self, "k_fractions", tuple(self.k_fractions))
        object.__setattr__(self, "variants", tuple(tuple(v) for v in self.variants))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not all(0 < f <= 1 for f in self.k_fractions):
            raise ValueError("k fractions must lie in (0, 1]")
        for storage, retrieval in self.variants:
            if storage not in STORAGE_ALGOS or retrieval not in RETRIEVAL_ALGOS:
                raise ValueError(f"unknown variant {storage}+{retrieval}")


CSV_COLUMNS = [
    "r",
    "c",
    "kRequested",
    "kAchieved",
    "trialIndex",
    "seed",
    "storageAlgo",
    "retrievalAlgo",
    "relocations",
    "ioUsage",
    "totalDistance",
    "distanceSubopt",
    "storageTimeMs",
    "retrievalTimeMs",
    "robustFound",
]


@dataclass
class TrialRow:
    r: int
    c: int
    k_requested: int
    k_achieved: int
    trial_index: int
    seed: int
    storage_algo: str
    retrieval_algo: str
    relocations: int
    io_usage: int
    total_distance: int
    distance_subopt: int
    storage_time_ms: float
    retrieval_time_ms: float
    robust_found: bool
    log: list[Action] | None = None

    def csv_values(self) -> list[str]:
        return [
            str(self.r),
            str(self.c),
            str(self.k_requested),
            str(self.k_achieved),
            str(self.trial_index),
            str(self.seed),
            self.storage_algo,
            self.retrieval_algo,
            str(self.relocations),
            str(self.io_usage),
            str(self.total_distance),
            str(self.distance_subopt),
            f"{self.storage_time_ms:.3f}",
            f"{self.retrieval_time_ms:.3f}",
            "true" if self.robust_found else "false",
        ]


def requested_k(fraction: float, cols: int) -> int:
    return math.floor(fraction * cols)


def sample_arrival(n: int, seed: int) -> list[int]:
    arrival = list(range(1, n + 1))
    random.Random(seed).shuffle(arrival)
    return arrival


def run_trial(
    side: int,
    k: int,
    storage_algo: str,
    retrieval_algo: str,
    trial_index: int,
    instance_seed: int,
    keep_log: bool = False,
    budget: int = DEFAULT_BACKTRACK_BUDGET,
) -> TrialRow:
    spec = GridSpec(side, side)
    n = spec.capacity
    arrival = sample_arrival(n, mix64(instance_seed, 0xA221))
    stream = OnlinePerturbationStream(n, k, mix64(instance_seed, 0x5EED))

    t0 = time.perf_counter()
    if storage_algo == "ImpS":
        outcome = max_k_search(arrival, spec, k, budget=budget)
        arrangement, achieved = outcome.arrangement, outcome.achieved_k
    else:
        arrangement, achieved = base_storage(arrival, spec, budget=budget), 0
    storage_ms = (time.perf_counter() - t0) * 1000.0

    episode = run_episode(arrangement, arrival, stream, retrieval_algo)
    m = episode.metrics
    return TrialRow(
        r=side,
        c=side,
        k_requested=k,
        k_achieved=achieved,
        trial_index=trial_index,
        seed=instance_seed,
        storage_algo=storage_algo,
        retrieval_algo=retrieval_algo,
        relocations=m.relocations,
        io_usage=m.io_usage,
        total_distance=m.total_distance,
        distance_subopt=m.distance_subopt,
        storage_time_ms=storage_ms,
        retrieval_time_ms=episode.retrieval_seconds * 1000.0,
        robust_found=achieved == k,
        log=episode.log if keep_log else None,
    )


def _error_row(
    side: int, k: int, storage_algo: str, retrieval_algo: str, trial_index: int, seed: int
) -> TrialRow:
    # Engine errors abort the trial; the sentinel metrics (-1) mark the row
    # so downstream aggregation can drop it.
    return TrialRow(
        r=side,
        c=side,
        k_requested=k,
        k_achieved=-1,
        trial_index=trial_index,
        seed=seed,
        storage_algo=storage_algo,
        retrieval_algo=retrieval_algo,
        relocations=-1,
        io_usage=-1,
        total_distance=-1,
        distance_subopt=-1,
        storage_time_ms=0.0,
        retrieval_time_ms=0.0,
        robust_found=False,
    )


def _trial_task(args: tuple) -> TrialRow:
    side, k, storage_algo, retrieval_algo, trial_index, seed, keep_log = args
    try:
        return run_trial(side, k, storage_algo, retrieval_algo, trial_index, seed, keep_log)
    except StorageError as exc:
        print(
            f"trial {storage_algo}+{retrieval_algo} side={side} k={k} "
            f"index={trial_index} failed: {exc}",
            file=sys.stderr,
        )
        return _error_row(side, k, storage_algo, retrieval_algo, trial_index, seed)


def resolve_workers(requested: int) -> int:
    if requested > 0:
        return requested
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_experiment(config: ExperimentConfig) -> list[TrialRow]:
    """All trials in canonical (side, fraction, variant, trial) order."""
    tasks = []
    for side in config.grid_sides:
        for fi, fraction in enumerate(config.k_fractions):
            k = requested_k(fraction, side)
            for storage_algo, retrieval_algo in config.variants:
                for trial in range(config.trials):
                    seed = mix64(config.seed, side, fi, trial)
                    tasks.append(
                        (side, k, storage_algo, retrieval_algo, trial, seed, config.keep_logs)
                    )
    workers = resolve_workers(config.workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_trial_task, tasks, chunksize=4))
    else:
        rows = [_trial_task(t) for t in tasks]
    if config.output_path:
        write_rows_csv(rows, config.output_path)
    return rows


def rows_to_csv(rows: Sequence[TrialRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def write_rows_csv(rows: Sequence[TrialRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


# ---------------------------------------------------------------------------
# Ablation: solver success with and without the offset sweep
# ---------------------------------------------------------------------------

ABLATION_COLUMNS = ["side", "k", "trials", "plainSuccess", "enhancedSuccess"]


@dataclass
class AblationRow:
    side: int
    k: int
    trials: int
    plain_success: float
    enhanced_success: float

    def csv_values(self) -> list[str]:
        return [
            str(self.side),
            str(self.k),
            str(self.trials),
            f"{self.plain_success:.6f}",
            f"{self.enhanced_success:.6f}",
        ]


def run_ablation(
    sides: Sequence[int],
    k_range: Sequence[int],
    trials: int,
    seed: int,
    workers: int = 0,
) -> list[AblationRow]:
    """Success rate of the single-offset solver vs the offset sweep."""
    rows = []
    nworkers = resolve_workers(workers)
    for side in sides:
        spec = GridSpec(side, side)
        n = spec.capacity
        for k in k_range:
            plain = enhanced = 0
            for trial in range(trials):
                arrival = sample_arrival(n, mix64(seed, side, k, trial, 0xAB1A))
                if find_robust_arrangement(arrival, spec, k).ok:
                    plain += 1
                    enhanced += 1  # offset 0 is part of the sweep
                elif find_robust_enhanced(arrival, spec, k, workers=nworkers).ok:
                    enhanced += 1
            rows.append(AblationRow(side, k, trials, plain / trials, enhanced / trials))
    return rows


def ablation_to_csv(rows: Sequence[AblationRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ABLATION_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def write_ablation_csv(rows: Sequence[AblationRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(ablation_to_csv(rows))


def column_feasibility_limit(cols: int) -> int:
    """Largest k for which enough columns exist to guarantee zero
    relocations: beyond (cols-3)/2 some instances force relocations."""
    return (cols - 3) // 2
