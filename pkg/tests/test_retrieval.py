import random
import statistics

import pytest

from gridstore import (
    Arrangement,
    Cell,
    GridSpec,
    InfeasibleRelocation,
    OnlinePerturbationStream,
    WorldState,
    apply_action,
    base_storage,
    choose_destination,
    min_blocker_path,
    retrieve_one,
    run_episode,
    run_retrieval,
    unblocked_set,
)
from gridstore.retrieval import _execute_retrieval


def world(spec, placement):
    return WorldState.from_arrangement(Arrangement(spec, placement))


def full_world(spec, labels, seed=None):
    cells = spec.storage_cells()
    if seed is not None:
        labels = list(labels)
        random.Random(seed).shuffle(labels)
    return world(spec, dict(zip(labels, cells)))


def enumerate_paths(state, target):
    """All simple paths from the target to any I/O cell, with their costs."""
    spec = state.spec
    start = state.cell_of(target)
    out = []

    def walk(path, seen):
        cur = path[-1]
        if cur.row == 0:
            blockers = sum(1 for c in path[1:] if state.load_at(c))
            out.append((blockers, len(path) - 1, [Cell(*c) for c in path]))
            return
        for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            nxt = Cell(cur.row + dr, cur.col + dc)
            if spec.in_bounds(nxt) and nxt not in seen:
                seen.add(nxt)
                walk(path + [nxt], seen)
                seen.remove(nxt)

    walk([start], {start})
    return out


class TestMinBlockerPath:
    def test_bottom_row_exits_in_one_step(self):
        state = world(GridSpec(3, 3), {1: Cell(1, 2)})
        assert min_blocker_path(state, 1) == [Cell(1, 2), Cell(0, 2)]

    def test_straight_down_through_blockers(self):
        state = world(GridSpec(3, 3), dict(zip([1, 2, 3, 4, 5, 6, 7, 8, 9], GridSpec(3, 3).storage_cells())))
        # target in the back row of a fully packed grid: every route has two
        # blockers, and the straight drop is the shortest of them
        path = min_blocker_path(state, 7)
        assert path == [Cell(3, 1), Cell(2, 1), Cell(1, 1), Cell(0, 1)]

    def test_matches_exhaustive_enumeration_on_3x3(self):
        rng = random.Random(21)
        spec = GridSpec(3, 3)
        cells = spec.storage_cells()
        for _ in range(40):
            count = rng.randrange(1, 9)
            chosen = rng.sample(cells, count)
            state = world(spec, dict(zip(range(1, count + 1), chosen)))
            target = rng.randrange(1, count + 1)
            got = min_blocker_path(state, target)
            got_cost = (
                sum(1 for c in got[1:] if state.load_at(c)),
                len(got) - 1,
            )
            best = min(enumerate_paths(state, target))
            assert got_cost == (best[0], best[1])


class TestUnblockedSet:
    def test_fully_packed_grid_gives_bottom_row(self):
        state = full_world(GridSpec(3, 3), range(1, 10))
        assert unblocked_set(state) == {1, 2, 3}

    def test_empty_grid_gives_empty_set(self):
        state = WorldState.empty(GridSpec(3, 3), [1, 2, 3])
        assert unblocked_set(state) == set()

    def test_pocket_behind_loads_is_blocked(self):
        # row2: 5 6 1 4 / row1: 2 3 . .
        state = world(
            GridSpec(3, 4),
            {5: Cell(2, 1), 6: Cell(2, 2), 1: Cell(2, 3), 4: Cell(2, 4), 2: Cell(1, 1), 3: Cell(1, 2)},
        )
        assert unblocked_set(state) == {1, 2, 3, 4}


class TestChooseDestination:
    def test_prefers_cell_that_keeps_unblocked_loads_unblocked(self):
        # Moving blocker 3 to the nearest cell (1,3) would wall in load 1,
        # which departs before everything around it; (1,4) keeps 1 reachable.
        state = world(
            GridSpec(3, 4),
            {5: Cell(2, 1), 6: Cell(2, 2), 1: Cell(2, 3), 4: Cell(2, 4), 2: Cell(1, 1), 3: Cell(1, 2)},
        )
        path = min_blocker_path(state, 6)
        assert path == [Cell(2, 2), Cell(1, 2), Cell(0, 2)]
        assert choose_destination(state, 3, path, 0) == Cell(1, 4)

    def test_feasibility_guard_keeps_inner_blockers_escapable(self):
        # With two blockers still on the path, parking load 2 at the nearest
        # cell (1,1) would leave load 5 a single reachable cell; the guard
        # demands two, so (1,3) is chosen.  With no remaining blockers the
        # nearest cell wins.
        state = world(
            GridSpec(4, 4),
            {1: Cell(4, 2), 6: Cell(3, 2), 5: Cell(2, 2), 2: Cell(1, 2), 3: Cell(3, 1), 4: Cell(2, 3)},
        )
        path = [Cell(4, 2), Cell(3, 2), Cell(2, 2), Cell(1, 2), Cell(0, 2)]
        assert choose_destination(state, 2, path, 2) == Cell(1, 3)
        assert choose_destination(state, 2, path, 0) == Cell(1, 1)

    def test_packed_grid_forces_io_parking(self):
        state = full_world(GridSpec(3, 3), range(1, 10))
        path = min_blocker_path(state, 7)
        assert choose_destination(state, 1, path, 1) is None


class TestRetrieveOne:
    def test_unblocked_target_is_one_action(self):
        state = full_world(GridSpec(2, 3), range(1, 7))
        actions = retrieve_one(state, 1, "ImpR")
        assert [a.kind for a in actions] == ["retrieve"]

    def test_baseline_parks_out_and_back(self):
        # retrieving from the second row of a packed grid: one blocker out to
        # the I/O row and back is exactly two relocations
        state = full_world(GridSpec(2, 3), range(1, 7))
        blocker = state.load_at(Cell(1, 2))
        target = state.load_at(Cell(2, 2))
        before = state.occupancy()
        actions = retrieve_one(state, target, "BaseR")
        kinds = [a.kind for a in actions]
        assert kinds == ["relocate", "retrieve", "relocate"]
        assert actions[0].path[-1].row == 0
        assert actions[-1].path[-1] == Cell(1, 2)
        after = state.occupancy()
        del before[Cell(2, 2)]
        assert after == before
        assert state.load_at(Cell(1, 2)) == blocker

    def test_baseline_costs_two_per_blocker_when_packed(self):
        state = full_world(GridSpec(3, 3), range(1, 10))
        target = state.load_at(Cell(3, 3))
        actions = retrieve_one(state, target, "BaseR")
        assert sum(a.kind == "relocate" for a in actions) == 4
        assert not state.io_occupied()

    def test_improved_relocates_within_storage(self):
        # row3: 1 7 2 / row2: 3 6 . / row1: . 5 4  — both blockers fit into
        # storage cells, so nothing touches the I/O row
        state = world(
            GridSpec(3, 3),
            {1: Cell(3, 1), 7: Cell(3, 2), 2: Cell(3, 3), 3: Cell(2, 1), 6: Cell(2, 2), 5: Cell(1, 2), 4: Cell(1, 3)},
        )
        plan, actions = _execute_retrieval(state, 7, "ImpR")
        assert plan.blockers == [5, 6]
        assert plan.assignments == [(5, Cell(1, 1)), (6, Cell(2, 3))]
        assert all(a.path[-1].row > 0 for a in actions if a.kind == "relocate")
        assert 7 in state.departed

    def test_improved_never_relocates_onto_the_path(self):
        rng = random.Random(3)
        spec = GridSpec(4, 4)
        for seed in range(10):
            state = full_world(spec, range(1, 17), seed=seed)
            target = rng.randrange(1, 17)
            plan, actions = _execute_retrieval(state, target, "ImpR")
            on_path = set(plan.path)
            for load, dest in plan.assignments:
                if dest is not None:
                    assert dest not in on_path

    def test_io_row_empty_after_every_retrieval(self):
        state = full_world(GridSpec(3, 4), range(1, 13), seed=5)
        stream = OnlinePerturbationStream(12, 12, 8)
        while len(stream):
            retrieve_one(state, stream.next_departure(), "ImpR")
            assert not state.io_occupied()

    def test_parking_overflow_raises_when_rows_exceed_cols(self):
        state = full_world(GridSpec(4, 2), range(1, 9))
        target = state.load_at(Cell(4, 1))
        with pytest.raises(InfeasibleRelocation):
            retrieve_one(state, target, "BaseR")


class TestRunRetrieval:
    def test_log_replays_on_a_clone(self):
        spec = GridSpec(3, 3)
        state = full_world(spec, range(1, 10), seed=2)
        clone = state.clone()
        metrics, log = run_retrieval(state, OnlinePerturbationStream(9, 9, 4), "ImpR")
        for action in log:
            apply_action(clone, action)
            occupancy = clone.occupancy()
            assert len(occupancy) == len(clone.placed_loads())
            for cell, load in occupancy.items():
                assert clone.cell_of(load) == cell
        assert clone.departed == set(range(1, 10))
        assert metrics.relocations == sum(a.kind == "relocate" for a in log)

    def test_improved_beats_baseline_on_matched_seeds(self):
        spec = GridSpec(5, 5)
        base_counts, imp_counts = [], []
        for seed in range(12):
            arrival = list(range(1, 26))
            random.Random(seed).shuffle(arrival)
            arrangement = base_storage(arrival, spec)
            for policy, counts in (("BaseR", base_counts), ("ImpR", imp_counts)):
                stream = OnlinePerturbationStream(25, 5, seed * 31 + 7)
                result = run_episode(arrangement, arrival, stream, policy)
                counts.append(result.metrics.relocations)
        assert statistics.mean(imp_counts) <= statistics.mean(base_counts)

    def test_episode_distance_meets_packing_bound(self):
        spec = GridSpec(4, 4)
        arrival = list(range(1, 17))
        random.Random(1).shuffle(arrival)
        arrangement = base_storage(arrival, spec)
        result = run_episode(arrangement, arrival, OnlinePerturbationStream(16, 4, 3), "ImpR")
        assert result.metrics.distance_subopt >= 0
        assert result.metrics.total_distance >= 4 * 4 * 5
