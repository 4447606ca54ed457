"""High-density grid storage: robust arrangements and low-relocation retrieval.

Loads arrive in a fixed order, fill an r x c grid completely, and later
depart one at a time in an order that may deviate from the plan by up to k
positions.  This package builds arrangements that absorb such deviations
without relocations, executes the retrieval phase when relocations are
unavoidable, and reproduces the accompanying benchmark protocol.
"""

from .grid import (
    Action,
    Arrangement,
    BudgetExceeded,
    Cell,
    GridSpec,
    IllegalPath,
    InfeasibleRelocation,
    LoadAbsent,
    MetricsRecord,
    SequenceSpec,
    StorageError,
    WorldState,
    WrongArrivalOrder,
    apply_action,
    arrangement_from_text,
    arrangement_to_text,
    action_log_from_text,
    action_log_to_text,
    distance_lower_bound,
    measure,
    neighbors,
    render_grid,
    reverse_sequence,
)
from .sequences import (
    OnlinePerturbationStream,
    Perturbation,
    brute_force_zero_reloc_exists,
    enumerate_perturbations,
    is_k_robust,
    is_valid_arrangement,
    satisfies_departure,
    search_valid_arrangement,
    simulate_satisfies,
    validate_perturbation,
)
from .solvers import (
    SolveOutcome,
    SolverConfig,
    base_storage,
    congruence_partition_storage,
    find_robust_arrangement,
    find_robust_enhanced,
    lower_bound_instance,
    max_k_search,
)
from .retrieval import (
    BASE_R,
    IMP_R,
    BlockerPlan,
    EpisodeResult,
    choose_destination,
    min_blocker_path,
    retrieve_one,
    run_episode,
    run_retrieval,
    run_storage,
    unblocked_set,
)
from .experiments import (
    AblationRow,
    ExperimentConfig,
    TrialRow,
    column_feasibility_limit,
    mix64,
    run_ablation,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"
