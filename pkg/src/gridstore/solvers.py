"""Construction of storage arrangements that tolerate departure-order shuffles.

Solvers in this module place loads so that retrieval needs no relocations:
each produced arrangement admits storage in the given arrival order and
retrieval under any k-bounded shuffle of the planned departure order.
Soundness is re-checked on every output before it is returned; a ``Failure``
outcome is *not* a proof that no valid arrangement exists.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .grid import Arrangement, BudgetExceeded, Cell, GridSpec, is_permutation
from .sequences import is_valid_arrangement, search_valid_arrangement

DEFAULT_BACKTRACK_BUDGET = 1_000_000


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs: start offset into the reversed arrival order for the
    first column pair, and the node limit for the backtracking fallback."""

    offset: int = 0
    backtrack_budget: int = DEFAULT_BACKTRACK_BUDGET

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError("offset must be non-negative")
        if self.backtrack_budget < 1:
            raise ValueError("backtrack budget must be positive")


@dataclass
class SolveOutcome:
    arrangement: Arrangement | None
    achieved_k: int
    offset_used: int

    @property
    def ok(self) -> bool:
        return self.arrangement is not None

    @classmethod
    def failure(cls, k: int) -> "SolveOutcome":
        return cls(None, k, 0)


def _check_instance(arrival: Sequence[int], spec: GridSpec, k: int) -> None:
    if k < 0:
        raise ValueError("k must be non-negative")
    if len(arrival) != spec.capacity:
        raise ValueError(
            f"solver expects full density: {len(arrival)} loads on a "
            f"{spec.rows}x{spec.cols} grid"
        )
    if not is_permutation(arrival):
        raise ValueError("arrival must be a permutation of 1..n")


def _column_pairs(cols: int) -> list[tuple[int, int]]:
    """Fill order for column pairs.

    The first pair is the leftmost two columns.  Columns 3 (and 4 when the
    count is even) are saved for last so that their neighbours already hold
    early loads, which gives the final assignments horizontal support.
    """
    if cols % 2 == 0:
        return [(1, 2)] + [(i, i + 1) for i in range(5, cols, 2)] + [(3, 4)]
    return [(1, 2)] + [(i, i + 1) for i in range(4, cols, 2)]


def _pair_fill(
    arrival: Sequence[int], rows: int, cols: int, k: int, offset: int
) -> dict[int, tuple[int, int]] | None:
    """Greedy column-pair filling; returns a placement dict or None.

    Each pair (L, R) is seeded on the bottom row with the next load of the
    reversed arrival order and the smallest unassigned label, then grown
    upward one row at a time.  R keeps a vertical chain of labels spaced at
    least k+1 apart; L keeps a vertical chain of the reversed arrival order;
    horizontal adjacency lets each column cover the other requirement.  The
    offset shifts where the first pair starts reading the reversed arrival.
    """
    n = rows * cols
    ar = list(reversed(arrival))
    pos = [0] * (n + 1)
    for i, a in enumerate(ar):
        pos[a] = i
    assigned = [False] * (n + 1)
    # occupancy with a zero border so neighbour reads never bounds-check
    occ = [[0] * (cols + 2) for _ in range(rows + 2)]

    pairs = _column_pairs(cols)
    last_idx = len(pairs) - 1
    kk = k + 1

    for pi, (lc, rc) in enumerate(pairs):
        y_start = offset if pi == 0 else 0
        on_last = pi == last_idx

        yb = None
        for i in range(y_start, n):
            if not assigned[ar[i]]:
                yb = ar[i]
                break
        if yb is None:
            return None
        occ[1][lc] = yb
        assigned[yb] = True
        db = next(v for v in range(1, n + 1) if not assigned[v])
        occ[1][rc] = db
        assigned[db] = True

        height = 1
        x = k + 2
        while height < rows:
            while x <= n and assigned[x]:
                x += 1
            if x > n:
                return None
            cur = x
            x += 1
            row = height + 1
            # quick filter: the label chain on R must keep growing by >= k+1
            mn = occ[row - 1][rc]
            right = occ[row][rc + 1]
            if right and right < mn:
                mn = right
            if cur < mn + kk:
                continue
            below_r, right_r = occ[row - 1][rc], occ[row][rc + 1]
            below_l, left_l = occ[row - 1][lc], occ[row][lc - 1]
            pos_cur = pos[cur]
            for i in range(y_start, n):
                y = ar[i]
                if assigned[y]:
                    continue
                if y == cur:
                    if on_last:
                        continue
                    break
                # joint validity of cur on R and y on L, counting each other
                # and every already-assigned neighbour
                if not (
                    y + kk <= cur
                    or (below_r and below_r + kk <= cur)
                    or (right_r and right_r + kk <= cur)
                ):
                    continue
                py = pos[y]
                if not (
                    py < pos_cur
                    or (below_r and pos[below_r] < pos_cur)
                    or (right_r and pos[right_r] < pos_cur)
                ):
                    continue
                if not (
                    cur + kk <= y
                    or (below_l and below_l + kk <= y)
                    or (left_l and left_l + kk <= y)
                ):
                    continue
                if not (
                    pos_cur < py
                    or (below_l and pos[below_l] < py)
                    or (left_l and pos[left_l] < py)
                ):
                    continue
                occ[row][rc] = cur
                occ[row][lc] = y
                assigned[cur] = True
                assigned[y] = True
                height += 1
                break

    if cols % 2 == 1:
        leftovers = [v for v in range(1, n + 1) if not assigned[v]]
        for i, v in enumerate(leftovers):
            occ[1 + i][3] = v

    placement = {}
    for row in range(1, rows + 1):
        for col in range(1, cols + 1):
            placement[occ[row][col]] = (row, col)
    return placement


def _verified_outcome(
    placement: dict[int, tuple[int, int]] | None,
    arrival: Sequence[int],
    spec: GridSpec,
    k: int,
    offset: int,
) -> SolveOutcome:
    if placement is None:
        return SolveOutcome.failure(k)
    arrangement = Arrangement(spec, {v: Cell(*cell) for v, cell in placement.items()})
    if not is_valid_arrangement(arrangement, arrival, k):
        return SolveOutcome.failure(k)
    return SolveOutcome(arrangement, k, offset)


def find_robust_arrangement(
    arrival: Sequence[int],
    spec: GridSpec,
    k: int,
    config: SolverConfig | None = None,
) -> SolveOutcome:
    """Single solver attempt at tolerance ``k``.

    Grids at least five columns wide use the column-pair procedure; narrower
    grids route to the budgeted backtracking search (the offset only applies
    to the pair procedure).  Every returned arrangement has been re-checked
    against the validity conditions.
    """
    config = config or SolverConfig()
    _check_instance(arrival, spec, k)
    n = spec.capacity
    if config.offset > n - spec.rows:
        raise ValueError(f"offset {config.offset} exceeds n - rows = {n - spec.rows}")
    if spec.cols >= 5:
        placement = _pair_fill(arrival, spec.rows, spec.cols, k, config.offset)
        return _verified_outcome(placement, arrival, spec, k, config.offset)
    try:
        arrangement = search_valid_arrangement(arrival, spec, k, budget=config.backtrack_budget)
    except BudgetExceeded:
        return SolveOutcome.failure(k)
    if arrangement is None:
        return SolveOutcome.failure(k)
    return SolveOutcome(arrangement, k, 0)


def _sweep_chunk(
    arrival: tuple[int, ...], rows: int, cols: int, k: int, offsets: Sequence[int]
) -> tuple[int, dict[int, tuple[int, int]]] | None:
    spec = GridSpec(rows, cols)
    for off in offsets:
        placement = _pair_fill(arrival, rows, cols, k, off)
        if placement is not None:
            arrangement = Arrangement(spec, {v: Cell(*c) for v, c in placement.items()})
            if is_valid_arrangement(arrangement, arrival, k):
                return off, placement
    return None


def find_robust_enhanced(
    arrival: Sequence[int],
    spec: GridSpec,
    k: int,
    budget: int = DEFAULT_BACKTRACK_BUDGET,
    workers: int = 1,
) -> SolveOutcome:
    """Offset sweep: retry the pair procedure for every start offset.

    Offsets are tried 0..n-rows and the lowest successful offset wins, so
    the result is deterministic even when the sweep runs on a worker pool.
    """
    _check_instance(arrival, spec, k)
    n = spec.capacity
    if spec.cols < 5:
        return find_robust_arrangement(
            arrival, spec, k, SolverConfig(offset=0, backtrack_budget=budget)
        )
    offsets = range(0, n - spec.rows + 1)
    arrival = tuple(arrival)
    if workers > 1 and len(offsets) > 8:
        chunk = max(4, len(offsets) // (workers * 8))
        chunks = [offsets[i : i + chunk] for i in range(0, len(offsets), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sweep_chunk, arrival, spec.rows, spec.cols, k, list(ch))
                for ch in chunks
            ]
            for fut in futures:
                hit = fut.result()
                if hit is not None:
                    for other in futures:
                        other.cancel()
                    off, placement = hit
                    return _verified_outcome(placement, arrival, spec, k, off)
        return SolveOutcome.failure(k)
    for off in offsets:
        placement = _pair_fill(arrival, spec.rows, spec.cols, k, off)
        if placement is not None:
            outcome = _verified_outcome(placement, arrival, spec, k, off)
            if outcome.ok:
                return outcome
    return SolveOutcome.failure(k)


def base_storage(
    arrival: Sequence[int], spec: GridSpec, budget: int = DEFAULT_BACKTRACK_BUDGET
) -> Arrangement:
    """Arrangement for the unperturbed problem (tolerance zero).

    Runs the enhanced pair solver at k=0 and falls back to the exhaustive
    budgeted search, which cannot fail for grids at least three columns wide
    apart from running out of budget (raised, never swallowed).
    """
    _check_instance(arrival, spec, 0)
    if spec.cols < 3:
        raise ValueError("guaranteed zero-relocation storage needs at least 3 columns")
    outcome = find_robust_enhanced(arrival, spec, 0, budget=budget)
    if outcome.ok:
        return outcome.arrangement
    arrangement = search_valid_arrangement(arrival, spec, 0, budget=budget)
    if arrangement is None:
        raise RuntimeError(
            "exhaustive search found no zero-tolerance arrangement on a "
            f"{spec.rows}x{spec.cols} grid; this contradicts the width-3 guarantee"
        )
    return arrangement


def congruence_partition_storage(
    arrival: Sequence[int], spec: GridSpec, k: int, budget: int = DEFAULT_BACKTRACK_BUDGET
) -> Arrangement:
    """Robust arrangement via label classes spaced k+1 apart.

    Loads are partitioned by label remainder modulo k+1; each class is
    relabelled to consecutive ranks, solved as an independent zero-tolerance
    instance on its own block of columns, and mapped back.  Neighbours
    within a class differ by at least k+1, so the combined arrangement is
    k-robust whenever each block solve succeeds — guaranteed at three or
    more columns per block.
    """
    _check_instance(arrival, spec, k)
    n = spec.capacity
    per_class, rem = divmod(spec.cols, k + 1)
    if rem != 0 or per_class < 3:
        raise ValueError(
            "class construction needs the column count to be a multiple of "
            f"k+1 with at least 3 columns per class; got {spec.cols} columns, k={k}"
        )
    placement: dict[int, Cell] = {}
    for ci in range(k + 1):
        first = ci + 1  # classes ordered by smallest member: 1, 2, ..., k+1
        members = list(range(first, n + 1, k + 1))
        rank = {v: t + 1 for t, v in enumerate(members)}
        sub_arrival = [rank[a] for a in arrival if a in rank]
        sub_spec = GridSpec(spec.rows, per_class)
        sub = _solve_with_escalation(sub_arrival, sub_spec, budget)
        col_base = ci * per_class
        for v in members:
            cell = sub.cell_of(rank[v])
            placement[v] = Cell(cell.row, cell.col + col_base)
    return Arrangement(spec, placement)


def _solve_with_escalation(arrival: Sequence[int], spec: GridSpec, budget: int) -> Arrangement:
    for attempt in range(3):
        try:
            return base_storage(arrival, spec, budget=budget * 10**attempt)
        except BudgetExceeded:
            if attempt == 2:
                raise
    raise AssertionError("unreachable")


def lower_bound_instance(k: int, spec: GridSpec, seed: int = 0) -> tuple[int, ...]:
    """Adversarial arrival order that forces 2k+3 distinct bottom-row loads.

    The reversed arrival starts (n, k+2, ..., 2k+2); together with loads
    1..k+1 these must all sit on the bottom row in any valid arrangement,
    so no valid arrangement exists on fewer than 2k+3 columns.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if spec.rows < 2:
        raise ValueError("the forcing argument needs at least 2 rows")
    n = spec.capacity
    if n < 2 * k + 3:
        raise ValueError(f"need at least 2k+3 = {2 * k + 3} loads, grid holds {n}")
    prefix = [n] + list(range(k + 2, 2 * k + 3))
    rest = [v for v in range(1, n + 1) if v not in set(prefix)]
    random.Random(seed).shuffle(rest)
    reversed_arrival = prefix + rest
    return tuple(reversed(reversed_arrival))


def max_k_search(
    arrival: Sequence[int],
    spec: GridSpec,
    k_start: int,
    budget: int = DEFAULT_BACKTRACK_BUDGET,
    workers: int = 1,
) -> SolveOutcome:
    """Best-effort robustness: try k_start, then decrement until success.

    Tolerance zero is handled by :func:`base_storage`, so the search always
    ends with an arrangement.
    """
    if k_start < 0:
        raise ValueError("k_start must be non-negative")
    _check_instance(arrival, spec, 0)
    for k in range(k_start, 0, -1):
        outcome = find_robust_enhanced(arrival, spec, k, budget=budget, workers=workers)
        if outcome.ok:
            return outcome
    return SolveOutcome(base_storage(arrival, spec, budget=budget), 0, 0)
