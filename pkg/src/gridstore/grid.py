"""Grid geometry, arrangements, the action model, and a validating world simulator.

Conventions used throughout the package:

* The storage area has ``rows`` x ``cols`` cells.  Row 0 is the I/O row
  (entry/exit buffer, never used for storage), row 1 is the front storage
  row adjacent to it, row ``rows`` is the back.  Columns are numbered
  1..cols left to right.
* Loads carry integer labels 1..n equal to their planned departure rank.
* Movement is along the four cardinal directions through empty cells.
  I/O cells are horizontally connected to each other, so a single exit
  column can serve any I/O cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

STORE = "store"
RETRIEVE = "retrieve"
RELOCATE = "relocate"

ACTION_KINDS = (STORE, RETRIEVE, RELOCATE)


class StorageError(Exception):
    """Base class for all errors raised by this package."""


class IllegalPath(StorageError):
    """Path is geometrically invalid or crosses an occupied cell."""


class WrongArrivalOrder(StorageError):
    """A store action does not match the next pending arrival."""


class LoadAbsent(StorageError):
    """The moved load is not at the path's start cell."""


class BudgetExceeded(StorageError):
    """A budgeted search ran out of nodes before reaching an answer."""


class InfeasibleRelocation(StorageError):
    """Blockers cannot be parked on the I/O row (more blockers than cells)."""


class Cell(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"{self.row}:{self.col}"


@dataclass(frozen=True)
class GridSpec:
    """Dimensions of the storage area (I/O row excluded from ``rows``)."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def capacity(self) -> int:
        return self.rows * self.cols

    @property
    def num_cells(self) -> int:
        """Number of cells including the I/O row."""
        return (self.rows + 1) * self.cols

    def cell_id(self, cell: Cell) -> int:
        return cell.row * self.cols + (cell.col - 1)

    def cell_at(self, cell_id: int) -> Cell:
        row, idx = divmod(cell_id, self.cols)
        return Cell(row, idx + 1)

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.row <= self.rows and 1 <= cell.col <= self.cols

    def in_storage(self, cell: Cell) -> bool:
        return 1 <= cell.row <= self.rows and 1 <= cell.col <= self.cols

    def is_io(self, cell: Cell) -> bool:
        return cell.row == 0 and 1 <= cell.col <= self.cols

    def storage_cells(self) -> list[Cell]:
        return [Cell(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)]

    def io_cells(self) -> list[Cell]:
        return [Cell(0, c) for c in range(1, self.cols + 1)]

    @cached_property
    def neighbor_ids(self) -> tuple[tuple[int, ...], ...]:
        """Precomputed cardinal neighbours by cell id, in (row, col) order."""
        table = []
        for cid in range(self.num_cells):
            cell = self.cell_at(cid)
            ids = tuple(
                self.cell_id(nb)
                for nb in (
                    Cell(cell.row - 1, cell.col),
                    Cell(cell.row, cell.col - 1),
                    Cell(cell.row, cell.col + 1),
                    Cell(cell.row + 1, cell.col),
                )
                if self.in_bounds(nb)
            )
            table.append(ids)
        return tuple(table)


def neighbors(cell: Cell, spec: GridSpec) -> list[Cell]:
    """In-bounds cardinal neighbours of ``cell`` within storage plus I/O row."""
    if not spec.in_bounds(cell):
        raise ValueError(f"cell {cell} out of bounds for {spec.rows}x{spec.cols}")
    return [spec.cell_at(i) for i in spec.neighbor_ids[spec.cell_id(cell)]]


def is_permutation(seq: Sequence[int], n: int | None = None) -> bool:
    if n is None:
        n = len(seq)
    return len(seq) == n and sorted(seq) == list(range(1, n + 1))


def reverse_sequence(arrival: Sequence[int]) -> tuple[int, ...]:
    """Reverse of an arrival order: storing by A equals retrieving by reversed A."""
    if not is_permutation(arrival):
        raise ValueError(f"not a permutation of 1..{len(arrival)}: {arrival!r}")
    return tuple(reversed(arrival))


@dataclass(frozen=True)
class SequenceSpec:
    """Arrival order plus perturbation bound; departures are fixed to 1..n."""

    arrival: tuple[int, ...]
    k: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "arrival", tuple(self.arrival))
        if not is_permutation(self.arrival):
            raise ValueError("arrival must be a permutation of 1..n")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    @property
    def n(self) -> int:
        return len(self.arrival)

    @property
    def departure(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))


@dataclass(frozen=True)
class Action:
    """One store/retrieve/relocate move of a single load along a cell path."""

    kind: str
    load: int
    path: tuple[Cell, ...]

    def __post_init__(self) -> None:
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        object.__setattr__(self, "path", tuple(Cell(*c) for c in self.path))

    @property
    def steps(self) -> int:
        return len(self.path) - 1


class Arrangement:
    """Injective mapping of load labels to storage cells (never the I/O row)."""

    __slots__ = ("spec", "placement")

    def __init__(self, spec: GridSpec, placement: dict[int, Cell]):
        self.spec = spec
        self.placement = {load: Cell(*cell) for load, cell in placement.items()}
        seen: set[Cell] = set()
        for load, cell in self.placement.items():
            if load < 1:
                raise ValueError(f"load labels must be positive, got {load}")
            if not spec.in_storage(cell):
                raise ValueError(f"load {load} at {cell} is outside the storage area")
            if cell in seen:
                raise ValueError(f"two loads share cell {cell}")
            seen.add(cell)

    @property
    def n(self) -> int:
        return len(self.placement)

    def cell_of(self, load: int) -> Cell:
        return self.placement[load]

    def loads(self) -> list[int]:
        return sorted(self.placement)

    def column(self, col: int) -> list[int]:
        """Loads in one column, bottom row upward; useful for inspection."""
        out = []
        for row in range(1, self.spec.rows + 1):
            for load, cell in self.placement.items():
                if cell == (row, col):
                    out.append(load)
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Arrangement)
            and self.spec == other.spec
            and self.placement == other.placement
        )

    def __repr__(self) -> str:
        return f"Arrangement({self.spec.rows}x{self.spec.cols}, {self.n} loads)"


class WorldState:
    """Occupancy of the grid plus pending arrivals and departed loads.

    Mutated only through :func:`apply_action`; one instance per simulation.
    """

    __slots__ = ("spec", "n", "_occ", "_loc", "_arrivals", "_next_arrival", "departed", "action_count")

    def __init__(self, spec: GridSpec, arrivals: Sequence[int]):
        if not is_permutation(arrivals):
            raise ValueError("arrivals must be a permutation of 1..n")
        if len(arrivals) > spec.capacity:
            raise ValueError("more loads than storage cells")
        self.spec = spec
        self.n = len(arrivals)
        self._occ = [0] * spec.num_cells  # cell id -> load label, 0 = empty
        self._loc = [-1] * (self.n + 1)  # load -> cell id, -1 = not placed
        self._arrivals = list(arrivals)
        self._next_arrival = 0
        self.departed: set[int] = set()
        self.action_count = 0

    @classmethod
    def empty(cls, spec: GridSpec, arrivals: Sequence[int]) -> "WorldState":
        return cls(spec, arrivals)

    @classmethod
    def from_arrangement(cls, arrangement: Arrangement) -> "WorldState":
        """World with every load already placed; retrieval can start at once."""
        loads = arrangement.loads()
        if loads != list(range(1, len(loads) + 1)):
            raise ValueError("arrangement loads must be labelled 1..n")
        state = cls(arrangement.spec, loads)
        state._next_arrival = state.n
        for load, cell in arrangement.placement.items():
            cid = arrangement.spec.cell_id(cell)
            state._occ[cid] = load
            state._loc[load] = cid
        return state

    @property
    def pending_arrivals(self) -> tuple[int, ...]:
        return tuple(self._arrivals[self._next_arrival:])

    def next_arrival(self) -> int | None:
        if self._next_arrival < self.n:
            return self._arrivals[self._next_arrival]
        return None

    def load_at(self, cell: Cell) -> int | None:
        load = self._occ[self.spec.cell_id(cell)]
        return load if load else None

    def cell_of(self, load: int) -> Cell | None:
        cid = self._loc[load]
        return self.spec.cell_at(cid) if cid >= 0 else None

    def is_empty(self, cell: Cell) -> bool:
        return self._occ[self.spec.cell_id(cell)] == 0

    def placed_loads(self) -> list[int]:
        return [load for load in range(1, self.n + 1) if self._loc[load] >= 0]

    def io_occupied(self) -> bool:
        return any(self._occ[: self.spec.cols])

    def occupancy(self) -> dict[Cell, int]:
        return {
            self.spec.cell_at(cid): load
            for cid, load in enumerate(self._occ)
            if load
        }

    def to_arrangement(self) -> Arrangement:
        placement = {}
        for load in range(1, self.n + 1):
            cid = self._loc[load]
            if cid >= 0:
                cell = self.spec.cell_at(cid)
                if cell.row == 0:
                    raise ValueError("loads parked on the I/O row form no arrangement")
                placement[load] = cell
        return Arrangement(self.spec, placement)

    def clone(self) -> "WorldState":
        other = WorldState.__new__(WorldState)
        other.spec = self.spec
        other.n = self.n
        other._occ = self._occ[:]
        other._loc = self._loc[:]
        other._arrivals = self._arrivals
        other._next_arrival = self._next_arrival
        other.departed = set(self.departed)
        other.action_count = self.action_count
        return other

    # Internal raw accessors used by the path planners.
    @property
    def occ(self) -> list[int]:
        return self._occ

    def loc_id(self, load: int) -> int:
        return self._loc[load]


def _check_path_geometry(path: Sequence[Cell], spec: GridSpec) -> None:
    if len(path) < 2:
        raise IllegalPath(f"path must contain at least two cells, got {list(path)}")
    seen = set()
    for cell in path:
        if not spec.in_bounds(cell):
            raise IllegalPath(f"cell {cell} out of bounds")
        if cell in seen:
            raise IllegalPath(f"path repeats cell {cell}")
        seen.add(cell)
    for a, b in zip(path, path[1:]):
        if abs(a.row - b.row) + abs(a.col - b.col) != 1:
            raise IllegalPath(f"non-cardinal step {a} -> {b}")


def apply_action(state: WorldState, action: Action) -> WorldState:
    """Validate ``action`` against ``state`` and perform it.

    The path's start cell may hold only the moved load itself; every other
    path cell must be empty when the action begins.
    """
    spec = state.spec
    path = action.path
    _check_path_geometry(path, spec)
    start, end = path[0], path[-1]

    if action.kind == STORE:
        if not spec.is_io(start):
            raise IllegalPath("store must begin on the I/O row")
        if not spec.in_storage(end):
            raise IllegalPath("store must end in the storage area")
        expected = state.next_arrival()
        if expected is None or action.load != expected:
            raise WrongArrivalOrder(
                f"store of load {action.load}, next arrival is {expected}"
            )
        for cell in path:
            if not state.is_empty(cell):
                raise IllegalPath(f"cell {cell} occupied by load {state.load_at(cell)}")
        state._occ[spec.cell_id(end)] = action.load
        state._loc[action.load] = spec.cell_id(end)
        state._next_arrival += 1
    elif action.kind == RETRIEVE:
        if not spec.in_storage(start):
            raise IllegalPath("retrieve must begin in the storage area")
        if not spec.is_io(end):
            raise IllegalPath("retrieve must end on the I/O row")
        if state.load_at(start) != action.load:
            raise LoadAbsent(f"load {action.load} is not at {start}")
        for cell in path[1:]:
            if not state.is_empty(cell):
                raise IllegalPath(f"cell {cell} occupied by load {state.load_at(cell)}")
        state._occ[spec.cell_id(start)] = 0
        state._loc[action.load] = -1
        state.departed.add(action.load)
    else:  # RELOCATE
        if state.load_at(start) != action.load:
            raise LoadAbsent(f"load {action.load} is not at {start}")
        for cell in path[1:]:
            if not state.is_empty(cell):
                raise IllegalPath(f"cell {cell} occupied by load {state.load_at(cell)}")
        state._occ[spec.cell_id(start)] = 0
        state._occ[spec.cell_id(end)] = action.load
        state._loc[action.load] = spec.cell_id(end)

    state.action_count += 1
    return state


@dataclass
class MetricsRecord:
    """Per-episode counters derived from an action log."""

    relocations: int = 0
    io_usage: int = 0
    total_distance: int = 0
    distance_subopt: int = 0


def distance_lower_bound(spec: GridSpec) -> int:
    """Steps needed to fill and drain a fully packed grid: cols * rows * (rows+1)."""
    return spec.cols * spec.rows * (spec.rows + 1)


def measure(log: Sequence[Action], spec: GridSpec) -> MetricsRecord:
    """Replay ``log`` from the empty world and tally the episode metrics.

    I/O usage counts actions at whose start at least one load occupies an
    I/O cell; the load being stored only materialises there, so it does not
    count against the action that moves it.
    """
    arrivals = [a.load for a in log if a.kind == STORE]
    state = WorldState.empty(spec, arrivals)
    rec = MetricsRecord()
    for action in log:
        if state.io_occupied():
            rec.io_usage += 1
        if action.kind == RELOCATE:
            rec.relocations += 1
        rec.total_distance += action.steps
        apply_action(state, action)
    rec.distance_subopt = rec.total_distance - distance_lower_bound(spec)
    return rec


# ---------------------------------------------------------------------------
# Canonical text serialization
# ---------------------------------------------------------------------------
# Arrangements:  "grid <rows> <cols>" header, then "<load> <row>:<col>" lines.
# Action logs:   "grid <rows> <cols>" header, then
#                "<kind> <load> <row>:<col> <row>:<col> ..." lines.


def _parse_cell(token: str) -> Cell:
    row_s, _, col_s = token.partition(":")
    return Cell(int(row_s), int(col_s))


def arrangement_to_text(arrangement: Arrangement) -> str:
    lines = [f"grid {arrangement.spec.rows} {arrangement.spec.cols}"]
    for load in arrangement.loads():
        lines.append(f"{load} {arrangement.placement[load]}")
    return "\n".join(lines) + "\n"


def arrangement_from_text(text: str) -> Arrangement:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("grid "):
        raise ValueError("arrangement text must start with a 'grid <rows> <cols>' line")
    _, rows_s, cols_s = lines[0].split()
    spec = GridSpec(int(rows_s), int(cols_s))
    placement = {}
    for ln in lines[1:]:
        load_s, cell_s = ln.split()
        placement[int(load_s)] = _parse_cell(cell_s)
    return Arrangement(spec, placement)


def action_log_to_text(log: Sequence[Action], spec: GridSpec) -> str:
    lines = [f"grid {spec.rows} {spec.cols}"]
    for action in log:
        cells = " ".join(str(c) for c in action.path)
        lines.append(f"{action.kind} {action.load} {cells}")
    return "\n".join(lines) + "\n"


def action_log_from_text(text: str) -> tuple[list[Action], GridSpec]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("grid "):
        raise ValueError("action log must start with a 'grid <rows> <cols>' line")
    _, rows_s, cols_s = lines[0].split()
    spec = GridSpec(int(rows_s), int(cols_s))
    log = []
    for ln in lines[1:]:
        parts = ln.split()
        log.append(Action(parts[0], int(parts[1]), tuple(_parse_cell(t) for t in parts[2:])))
    return log, spec


def render_grid(source: WorldState | Arrangement) -> str:
    """ASCII sketch of the occupancy, back row on top, I/O row at the bottom."""
    if isinstance(source, Arrangement):
        spec = source.spec
        occupancy = {cell: load for load, cell in source.placement.items()}
    else:
        spec = source.spec
        occupancy = source.occupancy()
    width = max(2, len(str(max(occupancy.values(), default=0))))
    lines = []
    for row in range(spec.rows, -1, -1):
        cells = []
        for col in range(1, spec.cols + 1):
            load = occupancy.get(Cell(row, col))
            cells.append(str(load).rjust(width) if load else "." * width)
        tag = "io" if row == 0 else "  "
        lines.append(f"{tag} |" + " ".join(cells) + "|")
    return "\n".join(lines)
