"""When relocations are unavoidable, where should blockers go?

At k well above the width guarantee, some retrievals are blocked no matter
how cleverly we stored.  The baseline policy parks blockers on the I/O row
and puts them back afterwards, paying two moves per blocker and hogging the
buffer.  The improved policy slides blockers into storage cells chosen so
that currently-retrievable loads stay retrievable.
"""

import random
import statistics

from gridstore import (
    GridSpec,
    OnlinePerturbationStream,
    base_storage,
    max_k_search,
    run_episode,
)

SIDE = 7
TRIALS = 15


def episode(storage, policy, seed):
    spec = GridSpec(SIDE, SIDE)
    n = spec.capacity
    arrival = list(range(1, n + 1))
    random.Random(seed).shuffle(arrival)
    if storage == "robust":
        arrangement = max_k_search(arrival, spec, SIDE).arrangement
    else:
        arrangement = base_storage(arrival, spec)
    stream = OnlinePerturbationStream(n, SIDE, seed * 977 + 11)
    return run_episode(arrangement, arrival, stream, policy).metrics


def main() -> None:
    print(f"{SIDE}x{SIDE} grid, departures drift up to k={SIDE}, {TRIALS} matched trials\n")
    for storage, policy in (("plain", "BaseR"), ("plain", "ImpR"), ("robust", "ImpR")):
        reloc, io = [], []
        for seed in range(TRIALS):
            m = episode(storage, policy, seed)
            reloc.append(m.relocations)
            io.append(m.io_usage)
        print(
            f"storage={storage:6s} policy={policy}:  "
            f"relocations {statistics.mean(reloc):6.1f}   "
            f"I/O-row usage {statistics.mean(io):6.1f}"
        )


if __name__ == "__main__":
    main()
