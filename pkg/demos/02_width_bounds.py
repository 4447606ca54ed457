"""How many columns does tolerance k cost?

Two constructions bracket the answer.  Splitting loads by label remainder
modulo k+1 and giving each class its own three columns always works, so
3k+3 columns suffice.  Conversely an adversarial arrival order pins 2k+3
distinct loads to the bottom row, so 2k+3 columns are necessary: one column
fewer and exhaustive search proves no valid arrangement exists at all.
"""

from gridstore import (
    GridSpec,
    brute_force_zero_reloc_exists,
    congruence_partition_storage,
    is_valid_arrangement,
    lower_bound_instance,
    render_grid,
)


def main() -> None:
    arrival = (7, 3, 11, 1, 9, 4, 6, 12, 2, 10, 8, 5)
    arr = congruence_partition_storage(arrival, GridSpec(2, 6), k=1)
    print("k=1 on 2x6: odd labels fill columns 1-3, even labels 4-6")
    print(render_grid(arr))
    print("certified 1-robust and storable:", is_valid_arrangement(arr, arrival, 1))

    print("\nForcing instance at k=1 (reversed arrival starts n, 3, 4):")
    for cols in (4, 5):
        spec = GridSpec(2, cols)
        arrival = lower_bound_instance(1, spec, seed=7)
        feasible = brute_force_zero_reloc_exists(spec, arrival, 1)
        print(f"  2x{cols}: arrival {arrival} -> "
              f"{'some valid arrangement exists' if feasible else 'provably no valid arrangement'}")


if __name__ == "__main__":
    main()
