"""Bounded-perturbation sequences and arrangement robustness checking.

A realized order is a k-bounded perturbation of a planned order when every
pair that departs out of order was planned at most k positions apart.  This
module provides the validator, a seeded online generator, an exhaustive
enumerator for small n, the adjacency-based arrangement checkers, and a
simulation-based oracle that retrieves loads one by one instead of reasoning
about adjacencies.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .grid import Arrangement, BudgetExceeded, Cell, GridSpec, is_permutation, reverse_sequence


def validate_perturbation(planned: Sequence[int], realized: Sequence[int], k: int) -> bool:
    """Pairwise O(n^2) check that ``realized`` is a k-bounded shuffle of ``planned``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if sorted(planned) != sorted(realized):
        raise ValueError("sequences must contain the same elements")
    n = len(planned)
    planned_pos = {v: i for i, v in enumerate(planned)}
    if len(planned_pos) != n:
        raise ValueError("sequences must not contain duplicates")
    realized_pos = {v: i for i, v in enumerate(realized)}
    for i in range(n):
        for j in range(i + 1, n):
            if realized_pos[planned[j]] < realized_pos[planned[i]] and j - i > k:
                return False
    return True


@dataclass(frozen=True)
class Perturbation:
    """A realized departure order certified k-bounded at construction time."""

    realized: tuple[int, ...]
    bound_k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "realized", tuple(self.realized))
        planned = tuple(sorted(self.realized))
        if not validate_perturbation(planned, self.realized, self.bound_k):
            raise ValueError(f"not a {self.bound_k}-bounded perturbation: {self.realized}")


class OnlinePerturbationStream:
    """Seeded one-load-at-a-time departure source.

    At every step the next departure is drawn uniformly from the loads that
    may still legally depart first, i.e. those within k of the smallest
    remaining label.  Draining the stream therefore always yields a
    k-bounded perturbation of the ascending order, and every such
    perturbation is reachable by some choice sequence.
    """

    def __init__(self, n: int, k: int, seed: int):
        if n < 0 or k < 0:
            raise ValueError("n and k must be non-negative")
        self.k = k
        self.seed = seed
        self._remaining = list(range(1, n + 1))  # kept sorted
        self._rng = random.Random(seed)

    @property
    def remaining(self) -> tuple[int, ...]:
        return tuple(self._remaining)

    def __len__(self) -> int:
        return len(self._remaining)

    def next_departure(self) -> int:
        if not self._remaining:
            raise ValueError("stream is exhausted")
        hi = bisect_right(self._remaining, self._remaining[0] + self.k)
        return self._remaining.pop(self._rng.randrange(hi))

    def drain(self) -> list[int]:
        return [self.next_departure() for _ in range(len(self._remaining))]

    def __iter__(self) -> Iterator[int]:
        while self._remaining:
            yield self.next_departure()


def enumerate_perturbations(planned: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """All k-bounded perturbations of ``planned``, each exactly once.

    Exponential; intended as an oracle for small n.  Works by choosing, at
    every step, any element whose planned position is within k of the
    earliest position still unchosen.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = len(planned)
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []
    remaining = list(range(n))  # planned positions, kept sorted

    def walk() -> None:
        if not remaining:
            out.append(tuple(prefix))
            return
        limit = remaining[0] + k
        for idx in range(len(remaining)):
            p = remaining[idx]
            if p > limit:
                break
            remaining.pop(idx)
            prefix.append(planned[p])
            walk()
            prefix.pop()
            remaining.insert(idx, p)

    walk()
    return out


# ---------------------------------------------------------------------------
# Arrangement checkers
# ---------------------------------------------------------------------------


def satisfies_departure(arrangement: Arrangement, order: Sequence[int]) -> bool:
    """Adjacency characterization: every load sits on the bottom row or next
    to a load that departs earlier in ``order``."""
    spec = arrangement.spec
    rank = {load: i for i, load in enumerate(order)}
    occupied = {cell: load for load, cell in arrangement.placement.items()}
    for load, cell in arrangement.placement.items():
        if cell.row == 1:
            continue
        r = rank[load]
        for nb in _storage_neighbors(cell, spec):
            other = occupied.get(nb)
            if other is not None and rank[other] < r:
                break
        else:
            return False
    return True


def is_k_robust(arrangement: Arrangement, k: int) -> bool:
    """True iff every load is on the bottom row or adjacent to a load whose
    label is smaller by at least k+1.  Defined for full-density arrangements."""
    spec = arrangement.spec
    if arrangement.n != spec.capacity:
        raise ValueError("k-robustness is defined for full-density arrangements only")
    if k < 0:
        raise ValueError("k must be non-negative")
    occupied = {cell: load for load, cell in arrangement.placement.items()}
    for load, cell in arrangement.placement.items():
        if cell.row == 1:
            continue
        for nb in _storage_neighbors(cell, spec):
            other = occupied.get(nb)
            if other is not None and load - other >= k + 1:
                break
        else:
            return False
    return True


def is_valid_arrangement(arrangement: Arrangement, arrival: Sequence[int], k: int) -> bool:
    """Zero-relocation certificate: the arrangement admits storage in arrival
    order and retrieval under any k-bounded shuffle of the departure order."""
    return satisfies_departure(arrangement, reverse_sequence(arrival)) and is_k_robust(
        arrangement, k
    )


def _storage_neighbors(cell: Cell, spec: GridSpec) -> list[Cell]:
    out = []
    for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
        nb = Cell(cell.row + dr, cell.col + dc)
        if spec.in_storage(nb):
            out.append(nb)
    return out


def simulate_satisfies(arrangement: Arrangement, order: Sequence[int]) -> bool:
    """Retrieve loads in ``order``, one action per load, via empty-cell paths.

    Independent of the adjacency characterization: it walks the actual empty
    region after each exit.  True iff every load can leave when called.
    """
    spec = arrangement.spec
    cols = spec.cols
    occ = [False] * spec.num_cells
    cell_of = {}
    for load, cell in arrangement.placement.items():
        occ[spec.cell_id(cell)] = True
        cell_of[load] = spec.cell_id(cell)
    neighbor_ids = spec.neighbor_ids
    for load in order:
        cid = cell_of[load]
        # The I/O row stays empty in this process (loads vanish on exit), so
        # a bottom-row load can always leave straight down.  Anything higher
        # must touch the empty region connected to the I/O row: BFS it.
        if cid >= 2 * cols:
            seen = [False] * spec.num_cells
            queue = deque()
            for i in range(cols):
                seen[i] = True
                queue.append(i)
            found = False
            while queue:
                cur = queue.popleft()
                for nb in neighbor_ids[cur]:
                    if nb == cid:
                        found = True
                        queue.clear()
                        break
                    if not seen[nb] and not occ[nb]:
                        seen[nb] = True
                        queue.append(nb)
            if not found:
                return False
        occ[cid] = False
    return True


# ---------------------------------------------------------------------------
# Exhaustive arrangement search (oracle and solver fallback)
# ---------------------------------------------------------------------------


def search_valid_arrangement(
    arrival: Sequence[int],
    spec: GridSpec,
    k: int,
    budget: int | None = None,
) -> Arrangement | None:
    """Backtracking search for a full-density valid arrangement.

    Loads are placed in departure order, so a load's small-neighbour
    requirement is decidable at placement time; arrival adjacency is pruned
    as soon as it becomes unsatisfiable.  With ``budget=None`` the search is
    exhaustive and ``None`` is a proof that no valid arrangement exists.
    With a budget, raises :class:`BudgetExceeded` after that many placements.
    """
    n = len(arrival)
    if n != spec.capacity:
        raise ValueError("search requires full density (n = rows*cols)")
    if not is_permutation(arrival):
        raise ValueError("arrival must be a permutation of 1..n")

    ar = list(reversed(arrival))
    pos_ar = [0] * (n + 1)
    for i, a in enumerate(ar):
        pos_ar[a] = i
    # earliest arrival-reverse position among loads > x (they are the only
    # candidates left to land next to x later)
    min_pos_after = [n] * (n + 2)
    for x in range(n - 1, 0, -1):
        min_pos_after[x] = min(min_pos_after[x + 1], pos_ar[x + 1])

    cols = spec.cols
    ncells = spec.capacity
    # index storage cells 0..ncells-1 (row 1 first)
    def nb_ids(idx: int) -> list[int]:
        row, col = divmod(idx, cols)
        out = []
        if row > 0:
            out.append(idx - cols)
        if row < spec.rows - 1:
            out.append(idx + cols)
        if col > 0:
            out.append(idx - 1)
        if col < cols - 1:
            out.append(idx + 1)
        return out

    neighbors_of = [nb_ids(i) for i in range(ncells)]
    occ = [0] * ncells  # load label, 0 = empty
    empty_nbs = [len(neighbors_of[i]) for i in range(ncells)]
    ar_ok = [False] * (n + 1)  # load already has an arrival-order neighbour
    nodes = 0

    def place(x: int) -> list[int] | None:
        nonlocal nodes
        if x > n:
            return occ[:]
        for v in range(ncells):
            if occ[v]:
                continue
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExceeded(f"arrangement search exceeded {budget} nodes")
            bottom = v < cols
            if bottom:
                ok_now = True
            else:
                # departure adjacency: some placed neighbour at distance >= k+1,
                # decidable right now since loads are placed in label order
                if not any(0 < occ[u] <= x - k - 1 for u in neighbors_of[v]):
                    continue
                ok_now = any(occ[u] and pos_ar[occ[u]] < pos_ar[x] for u in neighbors_of[v])
                if not ok_now and (empty_nbs[v] == 0 or min_pos_after[x] >= pos_ar[x]):
                    # no empty side left, or no later load appears earlier in
                    # the reversed arrival: x could never become storable here
                    continue
            # smother check: a placed neighbour must not lose its last empty
            # side while still lacking an arrival-order neighbour
            flipped: list[int] = []
            dead = False
            for u in neighbors_of[v]:
                w = occ[u]
                if w and not ar_ok[w] and pos_ar[x] < pos_ar[w]:
                    ar_ok[w] = True
                    flipped.append(w)
            for u in neighbors_of[v]:
                empty_nbs[u] -= 1
                w = occ[u]
                if w and u >= cols and not ar_ok[w] and empty_nbs[u] == 0:
                    dead = True
            if not dead:
                occ[v] = x
                ar_ok[x] = ok_now
                result = place(x + 1)
                if result is not None:
                    return result
                occ[v] = 0
                ar_ok[x] = False
            for u in neighbors_of[v]:
                empty_nbs[u] += 1
            for w in flipped:
                ar_ok[w] = False
        return None

    solution = place(1)
    if solution is None:
        return None
    placement = {}
    for idx, load in enumerate(solution):
        row, col = divmod(idx, cols)
        placement[load] = Cell(row + 1, col + 1)
    return Arrangement(spec, placement)


def brute_force_zero_reloc_exists(spec: GridSpec, arrival: Sequence[int], k: int) -> bool:
    """Exhaustively decide whether ANY full-density valid arrangement exists.

    Feasible for small grids only (the search is exponential in rows*cols).
    """
    return search_valid_arrangement(arrival, spec, k, budget=None) is not None
