"""Retrieval against an online departure stream, minimizing relocations.

Two policies are provided.  The baseline parks every blocker on the I/O row
and puts it back after the target leaves.  The improved policy relocates
blockers into the storage area when possible, choosing cells that keep
currently-unblocked loads unblocked; the I/O row is used only as a last
resort.  Either way the I/O row is empty again after every retrieval.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .grid import (
    RELOCATE,
    RETRIEVE,
    STORE,
    Action,
    Arrangement,
    Cell,
    GridSpec,
    IllegalPath,
    InfeasibleRelocation,
    MetricsRecord,
    WorldState,
    apply_action,
    distance_lower_bound,
    measure,
)
from .sequences import OnlinePerturbationStream

RetrievalPolicy = Literal["BaseR", "ImpR"]
BASE_R: RetrievalPolicy = "BaseR"
IMP_R: RetrievalPolicy = "ImpR"

_INF = float("inf")


def min_blocker_path(state: WorldState, target: int) -> list[Cell]:
    """Path from the target to the I/O row minimizing (blockers, length).

    Lexicographic cost, so a longer detour beats pushing through one more
    load.  Ties are broken toward the smallest (row, col) cell sequence to
    keep planning deterministic.
    """
    spec = state.spec
    start = state.loc_id(target)
    if start < 0 or start < spec.cols:
        raise ValueError(f"load {target} is not placed in the storage area")
    occ = state.occ
    nbrs = spec.neighbor_ids
    ncells = spec.num_cells

    blk = [_INF] * ncells
    length = [_INF] * ncells
    done = [False] * ncells
    heap: list[tuple[int, int, int]] = []
    for cid in range(spec.cols):
        b0 = 1 if occ[cid] else 0
        blk[cid] = b0
        length[cid] = 0
        heapq.heappush(heap, (b0, 0, cid))
    while heap:
        b, ln, cur = heapq.heappop(heap)
        if done[cur]:
            continue
        done[cur] = True
        for nb in nbrs[cur]:
            if nb == start or done[nb]:
                continue
            cb = b + (1 if occ[nb] else 0)
            cl = ln + 1
            if cb < blk[nb] or (cb == blk[nb] and cl < length[nb]):
                blk[nb] = cb
                length[nb] = cl
                heapq.heappush(heap, (cb, cl, nb))

    first = min(
        (nb for nb in nbrs[start]),
        key=lambda nb: (blk[nb], length[nb], spec.cell_at(nb)),
    )
    path = [spec.cell_at(start), spec.cell_at(first)]
    cur = first
    while length[cur] > 0:
        want_b = blk[cur] - (1 if occ[cur] else 0)
        want_l = length[cur] - 1
        cur = min(
            (nb for nb in nbrs[cur] if blk[nb] == want_b and length[nb] == want_l),
            key=lambda nb: spec.cell_at(nb),
        )
        path.append(spec.cell_at(cur))
    return path


def _empty_region(state: WorldState) -> list[bool]:
    """Cells reachable from the I/O row through empty cells (I/O included)."""
    spec = state.spec
    occ = state.occ
    seen = [False] * spec.num_cells
    queue = deque()
    for cid in range(spec.cols):
        if not occ[cid]:
            seen[cid] = True
            queue.append(cid)
    nbrs = spec.neighbor_ids
    while queue:
        cur = queue.popleft()
        for nb in nbrs[cur]:
            if not seen[nb] and not occ[nb]:
                seen[nb] = True
                queue.append(nb)
    return seen


def unblocked_set(state: WorldState) -> set[int]:
    """Loads that currently have an all-empty route to the I/O row."""
    spec = state.spec
    occ = state.occ
    region = _empty_region(state)
    out: set[int] = set()
    nbrs = spec.neighbor_ids
    for cid in range(spec.cols, spec.num_cells):
        load = occ[cid]
        if load and any(region[nb] for nb in nbrs[cid]):
            out.add(load)
    return out


def _reach_count(occ: list[int], spec: GridSpec, start: int, on_path: set[int], need: int) -> int:
    """Empty off-path storage cells reachable from ``start``; stops at ``need``."""
    if need <= 0:
        return 0
    nbrs = spec.neighbor_ids
    cols = spec.cols
    seen = {start}
    queue = deque([start])
    count = 0
    while queue:
        cur = queue.popleft()
        for nb in nbrs[cur]:
            if nb in seen or nb < cols or nb in on_path or occ[nb]:
                continue
            seen.add(nb)
            count += 1
            if count >= need:
                return count
            queue.append(nb)
    return count


def _choose_destination(
    state: WorldState, blocker: int, path_ids: Sequence[int], remaining: int
) -> tuple[Cell, list[Cell]] | None:
    """Pick a storage cell for a blocker, or None to park it on the I/O row.

    Candidates are the empty storage cells the blocker can reach without
    touching the retrieval path or another load, nearest first.  A candidate
    is preferred when no currently-unblocked load would end up both walled in
    and due to depart before all its neighbours and before the blocker.  Any
    candidate must leave each blocker still on the path able to reach at
    least ``remaining`` empty cells of its own.
    """
    spec = state.spec
    occ = state.occ
    cols = spec.cols
    nbrs = spec.neighbor_ids
    b_cid = state.loc_id(blocker)
    on_path = set(path_ids)
    if b_cid not in on_path:
        raise ValueError(f"load {blocker} is not on the retrieval path")

    # escape BFS: empty, off-path storage cells only
    parent = {b_cid: -1}
    order: list[int] = []
    queue = deque([b_cid])
    while queue:
        cur = queue.popleft()
        for nb in nbrs[cur]:
            if nb in parent or nb < cols or nb in on_path or occ[nb]:
                continue
            parent[nb] = cur
            order.append(nb)
            queue.append(nb)
    if not order:
        return None
    order.sort(key=lambda cid: (len(_trace(parent, cid)), spec.cell_at(cid)))

    inner = [cid for cid in path_ids[1:] if occ[cid] and cid != b_cid]
    unblocked = unblocked_set(state) - {blocker}
    u_cells = {load: state.loc_id(load) for load in unblocked}

    fallback: int | None = None
    for cand in order:
        occ[b_cid], occ[cand] = 0, blocker
        try:
            feasible = all(
                _reach_count(occ, spec, cid, on_path, remaining) >= remaining for cid in inner
            )
            if not feasible:
                continue
            if fallback is None:
                fallback = cand
            region = None
            safe = True
            for load, cid in u_cells.items():
                if load >= blocker:
                    continue
                if any(occ[nb] and occ[nb] < load for nb in nbrs[cid]):
                    continue
                if region is None:
                    region = _empty_region(state)
                if not any(region[nb] for nb in nbrs[cid]):
                    safe = False
                    break
            if safe:
                return spec.cell_at(cand), _trace_cells(parent, cand, spec)
        finally:
            occ[b_cid], occ[cand] = blocker, 0
    if fallback is not None:
        return spec.cell_at(fallback), _trace_cells(parent, fallback, spec)
    return None


def _trace(parent: dict[int, int], cid: int) -> list[int]:
    out = [cid]
    while parent[cid] != -1:
        cid = parent[cid]
        out.append(cid)
    out.reverse()
    return out


def _trace_cells(parent: dict[int, int], cid: int, spec: GridSpec) -> list[Cell]:
    return [spec.cell_at(i) for i in _trace(parent, cid)]


def choose_destination(
    state: WorldState, blocker: int, path: Sequence[Cell], remaining_blockers: int
) -> Cell | None:
    """Public wrapper: the chosen cell, or None when only I/O parking works."""
    path_ids = [state.spec.cell_id(Cell(*c)) for c in path]
    hit = _choose_destination(state, blocker, path_ids, remaining_blockers)
    return hit[0] if hit else None


@dataclass
class BlockerPlan:
    """Record of one retrieval: the path, its blockers outermost first, and
    where each blocker was sent (None marks an I/O parking spot)."""

    target: int
    path: list[Cell]
    blockers: list[int] = field(default_factory=list)
    assignments: list[tuple[int, Cell | None]] = field(default_factory=list)


def _io_walk(start_col: int, end_col: int) -> list[Cell]:
    step = 1 if end_col >= start_col else -1
    return [Cell(0, col) for col in range(start_col, end_col + step, step)]


def retrieve_one(state: WorldState, target: int, policy: RetrievalPolicy) -> list[Action]:
    plan, actions = _execute_retrieval(state, target, policy)
    return actions


def _execute_retrieval(
    state: WorldState, target: int, policy: RetrievalPolicy
) -> tuple[BlockerPlan, list[Action]]:
    """Clear the target's path, retrieve it, and restore the I/O row."""
    spec = state.spec
    if state.io_occupied():
        raise ValueError("the I/O row must be empty when a retrieval starts")
    path = min_blocker_path(state, target)
    path_ids = [spec.cell_id(c) for c in path]
    exit_cell = path[-1]
    occ = state.occ

    # blockers ordered outermost (nearest the exit) first
    blocker_ids = [cid for cid in path_ids[1:] if occ[cid]]
    blocker_ids.reverse()
    blockers = [occ[cid] for cid in blocker_ids]
    plan = BlockerPlan(target, path, blockers)

    park_spots = sorted(
        (Cell(0, col) for col in range(1, spec.cols + 1) if col != exit_cell.col),
        key=lambda c: (abs(c.col - exit_cell.col), c.col),
    )
    actions: list[Action] = []
    parked: list[tuple[int, Cell, Cell, int]] = []  # load, origin, spot, rank

    def park(load: int, cid: int, rank: int) -> None:
        if rank >= len(park_spots):
            raise InfeasibleRelocation(
                f"{len(blockers)} blockers but only {len(park_spots)} parking cells; "
                "parking needs rows <= cols"
            )
        spot = park_spots[rank]
        origin = spec.cell_at(cid)
        down = path[path_ids.index(cid):]
        move = list(down) + _io_walk(exit_cell.col, spot.col)[1:]
        actions.append(Action(RELOCATE, load, tuple(move)))
        apply_action(state, actions[-1])
        parked.append((load, origin, spot, rank))
        plan.assignments.append((load, None))

    for i, (load, cid) in enumerate(zip(blockers, blocker_ids)):
        remaining = len(blockers) - i - 1
        if policy == BASE_R:
            park(load, cid, remaining)
            continue
        hit = _choose_destination(state, load, path_ids, remaining)
        if hit is None:
            park(load, cid, remaining)
        else:
            dest, escape = hit
            actions.append(Action(RELOCATE, load, tuple(escape)))
            apply_action(state, actions[-1])
            plan.assignments.append((load, dest))

    actions.append(Action(RETRIEVE, target, tuple(path)))
    apply_action(state, actions[-1])

    for load, origin, spot, _rank in sorted(parked, key=lambda p: p[3]):
        back = _io_walk(spot.col, exit_cell.col)
        up = path[path_ids.index(spec.cell_id(origin)):]
        move = back + list(reversed(up))[1:]
        actions.append(Action(RELOCATE, load, tuple(move)))
        apply_action(state, actions[-1])

    if state.io_occupied():
        raise AssertionError("I/O row not empty after retrieval")
    return plan, actions


def run_retrieval(
    state: WorldState, stream: OnlinePerturbationStream, policy: RetrievalPolicy
) -> tuple[MetricsRecord, list[Action]]:
    """Drain the departure stream, retrieving each load as it is revealed."""
    if state.pending_arrivals:
        raise ValueError("all loads must be stored before retrieval starts")
    log: list[Action] = []
    while len(stream):
        log.extend(retrieve_one(state, stream.next_departure(), policy))
    rec = MetricsRecord()
    parked = 0
    for action in log:
        if parked:
            rec.io_usage += 1
        rec.relocations += action.kind == RELOCATE
        rec.total_distance += action.steps
        if action.kind == RELOCATE:
            parked += action.path[-1].row == 0
            parked -= action.path[0].row == 0
    rec.distance_subopt = rec.total_distance - distance_lower_bound(state.spec)
    return rec, log


def shortest_store_path(state: WorldState, dest: Cell) -> list[Cell]:
    """Shortest all-empty route from any I/O cell to ``dest``."""
    spec = state.spec
    occ = state.occ
    dest_id = spec.cell_id(dest)
    if occ[dest_id]:
        raise IllegalPath(f"destination {dest} is occupied")
    parent: dict[int, int] = {}
    queue = deque()
    for cid in range(spec.cols):
        if not occ[cid]:
            parent[cid] = -1
            queue.append(cid)
    nbrs = spec.neighbor_ids
    while queue:
        cur = queue.popleft()
        if cur == dest_id:
            return _trace_cells(parent, cur, spec)
        for nb in nbrs[cur]:
            if nb not in parent and not occ[nb]:
                parent[nb] = cur
                queue.append(nb)
    raise IllegalPath(f"no empty route to {dest}; the arrangement is not storable")


def run_storage(state: WorldState, arrangement: Arrangement) -> list[Action]:
    """Store every pending arrival into its assigned cell, in arrival order."""
    log: list[Action] = []
    for load in state.pending_arrivals:
        path = shortest_store_path(state, arrangement.cell_of(load))
        log.append(Action(STORE, load, tuple(path)))
        apply_action(state, log[-1])
    return log


@dataclass
class EpisodeResult:
    log: list[Action]
    metrics: MetricsRecord
    storage_seconds: float
    retrieval_seconds: float


def run_episode(
    arrangement: Arrangement,
    arrival: Sequence[int],
    stream: OnlinePerturbationStream,
    policy: RetrievalPolicy,
) -> EpisodeResult:
    """Full store-then-retrieve episode; metrics cover both phases."""
    state = WorldState.empty(arrangement.spec, arrival)
    t0 = time.perf_counter()
    log = run_storage(state, arrangement)
    t1 = time.perf_counter()
    _, retrieval_log = run_retrieval(state, stream, policy)
    t2 = time.perf_counter()
    log.extend(retrieval_log)
    return EpisodeResult(log, measure(log, arrangement.spec), t1 - t0, t2 - t1)
