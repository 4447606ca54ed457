"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines.  The heavyweight episode sweeps are shared across criteria through a
module-scoped fixture.
"""

import itertools
import statistics
import time

import pytest

from gridstore import (
    Arrangement,
    GridSpec,
    OnlinePerturbationStream,
    WorldState,
    brute_force_zero_reloc_exists,
    congruence_partition_storage,
    distance_lower_bound,
    enumerate_perturbations,
    find_robust_enhanced,
    is_k_robust,
    is_valid_arrangement,
    lower_bound_instance,
    max_k_search,
    retrieve_one,
    run_retrieval,
    satisfies_departure,
    simulate_satisfies,
    validate_perturbation,
)
from gridstore.experiments import (
    ExperimentConfig,
    column_feasibility_limit,
    mix64,
    run_ablation,
    run_experiment,
    sample_arrival,
)


def report(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def reduction_rows():
    """Matched-pair sweep shared by the relocation, I/O and distance criteria."""
    rows = {}
    for side in (9, 13):
        config = ExperimentConfig(
            grid_sides=(side,),
            k_fractions=(0.5, 1.0),
            trials=50,
            seed=20240817,
            variants=(("BaseS", "BaseR"), ("ImpS", "ImpR")),
        )
        rows[side] = run_experiment(config)
    return rows


def mean_relocations(rows, k, storage):
    vals = [r.relocations for r in rows if r.k_requested == k and r.storage_algo == storage]
    return statistics.mean(vals)


def test_oracle_equivalence():
    # every full 2x3 arrangement, k in {0,1,2}: the adjacency characterization
    # must agree with simulating every enumerated perturbation
    t0 = time.perf_counter()
    spec = GridSpec(2, 3)
    cells = spec.storage_cells()
    perturbations = {k: enumerate_perturbations((1, 2, 3, 4, 5, 6), k) for k in (0, 1, 2)}
    checked = 0
    ok = True
    for perm in itertools.permutations(range(1, 7)):
        arr = Arrangement(spec, dict(zip(perm, cells)))
        for k in (0, 1, 2):
            oracle = all(simulate_satisfies(arr, p) for p in perturbations[k])
            if is_k_robust(arr, k) != oracle:
                ok = False
            checked += 1
    # and the departure characterization against simulation on 3x3
    import random

    rng = random.Random(99)
    spec3 = GridSpec(3, 3)
    cells3 = spec3.storage_cells()
    for _ in range(200):
        labels = list(range(1, 10))
        rng.shuffle(labels)
        arr = Arrangement(spec3, dict(zip(labels, cells3)))
        order = list(range(1, 10))
        rng.shuffle(order)
        if satisfies_departure(arr, order) != simulate_satisfies(arr, order):
            ok = False
    elapsed = time.perf_counter() - t0
    report(
        "oracle equivalence (720 arrangements x k in {0,1,2} + 200 pairs)",
        ok and elapsed < 60,
        f"{checked} checks in {elapsed:.1f}s",
    )


def test_solver_soundness():
    cases = ((5, 5, 2), (9, 9, 4), (15, 15, 6))
    failures = 0
    solved = 0
    for rows, cols, k in cases:
        spec = GridSpec(rows, cols)
        n = spec.capacity
        for trial in range(100):
            arrival = sample_arrival(n, mix64(101, rows, k, trial))
            outcome = find_robust_enhanced(arrival, spec, k)
            if not outcome.ok:
                continue
            solved += 1
            if not is_valid_arrangement(outcome.arrangement, arrival, k):
                failures += 1
                continue
            for s in range(10):
                state = WorldState.from_arrangement(outcome.arrangement)
                stream = OnlinePerturbationStream(n, k, mix64(202, rows, k, trial, s))
                metrics, _ = run_retrieval(state, stream, "ImpR")
                if metrics.relocations != 0 or metrics.io_usage != 0:
                    failures += 1
                    break
    report(
        "solver soundness (300 instances, 10 perturbed replays each)",
        failures == 0,
        f"{solved} solved, {failures} violations",
    )


def test_class_construction_suffices():
    # 3k+3 columns always admit the class-partition arrangement
    failures = 0
    total = 0
    for k in (1, 2):
        for r in (2, 3):
            spec = GridSpec(r, 3 * k + 3)
            for trial in range(100):
                arrival = sample_arrival(spec.capacity, mix64(303, k, r, trial))
                arr = congruence_partition_storage(arrival, spec, k)
                total += 1
                if not is_valid_arrangement(arr, arrival, k):
                    failures += 1
    report(
        "width upper bound: class construction on 3k+3 columns",
        failures == 0,
        f"{total} instances, {failures} failures",
    )


def test_forcing_instance_needs_2k_plus_3_columns():
    t0 = time.perf_counter()
    narrow = lower_bound_instance(1, GridSpec(2, 4), seed=424)
    wide = lower_bound_instance(1, GridSpec(2, 5), seed=424)
    infeasible_narrow = not brute_force_zero_reloc_exists(GridSpec(2, 4), narrow, 1)
    feasible_wide = brute_force_zero_reloc_exists(GridSpec(2, 5), wide, 1)
    elapsed = time.perf_counter() - t0
    report(
        "width lower bound: 2x4 infeasible, 2x5 feasible at k=1",
        infeasible_narrow and feasible_wide and elapsed < 300,
        f"exhaustive search in {elapsed:.1f}s",
    )


def test_offset_sweep_success_rate():
    side = 15
    limit = column_feasibility_limit(side)
    assert limit == 6
    rows = run_ablation([side], range(0, 9), trials=100, seed=515)
    ok = True
    detail = []
    for row in rows:
        if row.enhanced_success < row.plain_success:
            ok = False
        if row.k <= limit and row.enhanced_success < 0.75:
            ok = False
        detail.append(f"k{row.k}:{row.enhanced_success:.2f}")
    report(
        "offset sweep success (15x15, 100 trials per k, threshold 0.75)",
        ok,
        " ".join(detail),
    )


def test_relocation_reduction(reduction_rows):
    ok = True
    details = []
    for side in (9, 13):
        rows = reduction_rows[side]
        full_k = side
        half_k = side // 2
        base_mean = mean_relocations(rows, full_k, "BaseS")
        imp_mean = mean_relocations(rows, full_k, "ImpS")
        details.append(f"{side}x{side} k={full_k}: {imp_mean:.1f} vs {base_mean:.1f}")
        if imp_mean > 0.6 * base_mean:
            ok = False
        imp_half = mean_relocations(rows, half_k, "ImpS")
        details.append(f"k={half_k}: {imp_half:.2f}")
        if imp_half > 1.0:
            ok = False
    report("relocation reduction (ImpS+ImpR vs BaseS+BaseR, 50 matched trials)", ok, "; ".join(details))


def test_io_row_usage(reduction_rows):
    rows = reduction_rows[9]
    half_k = 4
    robust = [
        r
        for r in rows
        if r.k_requested == half_k and r.storage_algo == "ImpS" and r.k_achieved == half_k
    ]
    imp_io = [r.io_usage for r in robust]
    seeds = {r.seed for r in robust}
    base_io = [
        r.io_usage
        for r in rows
        if r.k_requested == half_k and r.storage_algo == "BaseS" and r.seed in seeds
    ]
    ok = bool(imp_io) and statistics.mean(imp_io) == 0 and statistics.mean(base_io) > 0
    report(
        "I/O row usage at k=0.5c on 9x9",
        ok,
        f"ImpS+ImpR mean {statistics.mean(imp_io):.2f} over {len(imp_io)} robust trials, "
        f"BaseS+BaseR mean {statistics.mean(base_io):.2f}",
    )


def test_distance_bound(reduction_rows):
    ok = True
    total = 0
    for side, rows in reduction_rows.items():
        bound = distance_lower_bound(GridSpec(side, side))
        for row in rows:
            total += 1
            if row.total_distance < bound or row.distance_subopt < 0:
                ok = False
    report("distance bound: total >= cols*rows*(rows+1) on every episode", ok, f"{total} episodes")


def test_runtime_limits():
    spec = GridSpec(17, 17)
    arrival = sample_arrival(spec.capacity, mix64(717))
    t0 = time.perf_counter()
    outcome = max_k_search(arrival, spec, 17)
    storage_s = time.perf_counter() - t0
    assert outcome.ok
    state = WorldState.from_arrangement(outcome.arrangement)
    stream = OnlinePerturbationStream(spec.capacity, 17, mix64(718))
    worst = 0.0
    while len(stream):
        t0 = time.perf_counter()
        retrieve_one(state, stream.next_departure(), "ImpR")
        worst = max(worst, time.perf_counter() - t0)
    report(
        "runtime: 17x17 storage < 60s, each retrieval < 1s",
        storage_s < 60 and worst < 1,
        f"storage {storage_s:.2f}s, worst retrieval {worst * 1000:.1f}ms, k={outcome.achieved_k}",
    )


def test_perturbation_generator():
    planned = tuple(range(1, 21))
    bad = 0
    for seed in range(10_000):
        realized = OnlinePerturbationStream(20, 3, seed).drain()
        if not validate_perturbation(planned, realized, 3):
            bad += 1
    identity_ok = all(
        OnlinePerturbationStream(12, 0, seed).drain() == list(range(1, 13)) for seed in range(50)
    )
    report(
        "perturbation generator (10^4 drains at n=20,k=3; identity at k=0)",
        bad == 0 and identity_ok,
        f"{bad} invalid drains",
    )
