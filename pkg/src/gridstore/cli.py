"""Command line front end.

Subcommands:

* ``solve``       compute an arrangement for (arrival, rows, cols, k)
* ``simulate``    replay a stored arrangement against a seeded stream
* ``experiment``  run the variant sweep and write the trial CSV
* ``ablation``    solver success rates with/without the offset sweep
* ``verify``      check an arrangement, or brute-force instance feasibility
* ``lb-instance`` emit an adversarial instance that needs 2k+3 columns

Exit status: 0 on success (and positive verification), 1 on failures,
negative verification, or I/O problems, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .experiments import (
    DEFAULT_VARIANTS,
    DEFAULT_FRACTIONS,
    ExperimentConfig,
    run_ablation,
    run_experiment,
    write_ablation_csv,
    write_rows_csv,
)
from .grid import (
    GridSpec,
    WorldState,
    arrangement_from_text,
    arrangement_to_text,
    render_grid,
)
from .retrieval import run_retrieval
from .sequences import OnlinePerturbationStream, brute_force_zero_reloc_exists, is_valid_arrangement
from .solvers import (
    base_storage,
    congruence_partition_storage,
    find_robust_enhanced,
    lower_bound_instance,
    max_k_search,
)


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _load_instance(path: str) -> tuple[GridSpec, list[int], int]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return GridSpec(data["rows"], data["cols"]), list(data["arrival"]), int(data.get("k", 0))


def _cmd_solve(args: argparse.Namespace) -> int:
    arrival = _parse_ints(args.arrival)
    spec = GridSpec(args.rows, args.cols)
    t0 = time.perf_counter()
    if args.algo == "base":
        arrangement, achieved, offset = base_storage(arrival, spec), 0, 0
    elif args.algo == "classes":
        arrangement = congruence_partition_storage(arrival, spec, args.k)
        achieved, offset = args.k, 0
    elif args.max_k:
        outcome = max_k_search(arrival, spec, args.k, workers=args.workers)
        arrangement, achieved, offset = outcome.arrangement, outcome.achieved_k, outcome.offset_used
    else:
        outcome = find_robust_enhanced(arrival, spec, args.k, workers=args.workers)
        if not outcome.ok:
            print(f"no arrangement found at k={args.k}; try --max-k", file=sys.stderr)
            return 1
        arrangement, achieved, offset = outcome.arrangement, outcome.achieved_k, outcome.offset_used
    summary = json.dumps(
        {
            "achievedK": achieved,
            "offsetUsed": offset,
            "wallTimeMs": round((time.perf_counter() - t0) * 1000.0, 3),
        }
    )
    text = arrangement_to_text(arrangement)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    with open(args.arrangement, encoding="utf-8") as fh:
        arrangement = arrangement_from_text(fh.read())
    state = WorldState.from_arrangement(arrangement)
    stream = OnlinePerturbationStream(arrangement.n, args.k, args.seed)
    metrics, log = run_retrieval(state, stream, args.policy)
    print(
        json.dumps(
            {
                "relocations": metrics.relocations,
                "ioUsage": metrics.io_usage,
                "totalDistance": metrics.total_distance,
                "actions": len(log),
            }
        )
    )
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        config = ExperimentConfig(
            grid_sides=tuple(raw["gridSides"]),
            k_fractions=tuple(raw.get("kFractions", DEFAULT_FRACTIONS)),
            trials=raw.get("trials", 50),
            seed=raw.get("seed", 0),
            variants=tuple(tuple(v) for v in raw.get("variants", DEFAULT_VARIANTS)),
            output_path=raw.get("outputPath", args.out),
            workers=raw.get("workers", args.workers),
        )
    else:
        variants = (
            tuple(tuple(v.split("+")) for v in args.variants.split(","))
            if args.variants
            else DEFAULT_VARIANTS
        )
        config = ExperimentConfig(
            grid_sides=tuple(args.sides),
            k_fractions=tuple(args.fractions),
            trials=args.trials,
            seed=args.seed,
            variants=variants,
            output_path=args.out,
            workers=args.workers,
        )
    rows = run_experiment(config)
    if not config.output_path:
        from .experiments import rows_to_csv

        sys.stdout.write(rows_to_csv(rows))
    else:
        print(f"wrote {len(rows)} rows to {config.output_path}", file=sys.stderr)
    return 0


def _cmd_ablation(args: argparse.Namespace) -> int:
    rows = run_ablation(
        args.sides, range(args.k_min, args.k_max + 1), args.trials, args.seed, args.workers
    )
    if args.out:
        write_ablation_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        from .experiments import ablation_to_csv

        sys.stdout.write(ablation_to_csv(rows))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.instance:
        spec, arrival, k = _load_instance(args.instance)
    else:
        if not args.arrival or args.rows is None or args.cols is None:
            print("verify needs --instance or --rows/--cols/--arrival", file=sys.stderr)
            return 2
        spec = GridSpec(args.rows, args.cols)
        arrival = _parse_ints(args.arrival)
        k = args.k
    if args.exhaustive:
        feasible = brute_force_zero_reloc_exists(spec, arrival, k)
        word = "feasible" if feasible else "infeasible"
        print(f"{spec.rows}x{spec.cols} k={k}: zero-relocation arrangement {word}")
        return 0 if feasible else 1
    if not args.arrangement:
        print("verify needs --arrangement unless --exhaustive is given", file=sys.stderr)
        return 2
    with open(args.arrangement, encoding="utf-8") as fh:
        arrangement = arrangement_from_text(fh.read())
    if args.show:
        print(render_grid(arrangement), file=sys.stderr)
    if is_valid_arrangement(arrangement, arrival, k):
        print(f"valid: stores by the arrival order and tolerates k={k} departures")
        return 0
    print(f"INVALID at k={k}")
    return 1


def _cmd_lb_instance(args: argparse.Namespace) -> int:
    spec = GridSpec(args.rows, args.cols)
    arrival = lower_bound_instance(args.k, spec, args.seed)
    payload = json.dumps(
        {"rows": spec.rows, "cols": spec.cols, "k": args.k, "arrival": list(arrival)}
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridstore", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a storage arrangement")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--arrival", required=True, help="arrival order, e.g. '4,1,7,6,3,2,9,8,5'")
    p.add_argument("--algo", choices=["enhanced", "base", "classes"], default="enhanced")
    p.add_argument("--max-k", action="store_true", help="decrement k until an arrangement is found")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the arrangement file here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("simulate", help="replay an arrangement against a seeded stream")
    p.add_argument("--arrangement", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=["BaseR", "ImpR"], default="ImpR")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("experiment", help="run the variant sweep, write CSV")
    p.add_argument("--sides", type=int, nargs="+", default=[9])
    p.add_argument("--fractions", type=float, nargs="+", default=list(DEFAULT_FRACTIONS))
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variants", help="comma list like 'BaseS+BaseR,ImpS+ImpR'")
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--config", help="JSON config file (overrides the flags)")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("ablation", help="solver success rates by k")
    p.add_argument("--sides", type=int, nargs="+", default=[15])
    p.add_argument("--k-min", type=int, default=0)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=_cmd_ablation)

    p = sub.add_parser("verify", help="check an arrangement or instance feasibility")
    p.add_argument("--arrangement")
    p.add_argument("--instance", help="instance JSON (rows, cols, k, arrival)")
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--arrival")
    p.add_argument("--exhaustive", action="store_true", help="brute-force feasibility search")
    p.add_argument("--show", action="store_true", help="print an ASCII sketch to stderr")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("lb-instance", help="emit an instance that needs 2k+3 columns")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_lb_instance)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
