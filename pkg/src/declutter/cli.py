"""Command line interface.

Subcommands:
  generate   write scene JSON files for a tier
  run        run one policy on one scene file, print the trial report
  bench      execute an experiment plan, emit CSV summaries and JSONL trials
  fit-time   fit time-model parameters to a reference timing table

Exit codes: 0 success, 2 usage error, 3 schema error, 4 infeasible action.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import config_to_json_obj, load_config
from .errors import InfeasibleAction, PlacementExhausted, SchemaError
from .harness import (
    generate_scene_files,
    plan_from_json,
    run_plan,
    run_scene_file,
)
from .policies import PolicyConfig
from .tableware import Tier, scene_from_json
from .timefit import fit_time_model, parse_reference_csv, simulated_counts

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_INFEASIBLE = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="declutter",
        description="Deterministic tabletop decluttering simulator and benchmark harness",
    )
    parser.add_argument(
        "--config", default=None,
        help="config JSON path (default: $DECLUTTER_CONFIG or built-in defaults)",
    )
    # Accepted after the subcommand too; SUPPRESS keeps an omitted
    # subcommand-level flag from clobbering the global one.
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS,
                        help="config JSON path")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[shared],
                         help="generate scene files for a tier")
    gen.add_argument("--tier", required=True, choices=[t.value for t in Tier])
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", parents=[shared],
                         help="run one policy on one scene file")
    run.add_argument("--scene", required=True)
    run.add_argument("--policy", required=True, choices=["random", "pull", "stack"])
    run.add_argument("--utensil-stacking", default=None,
                     choices=["one_per_bowl", "all_on_one_bowl"])
    run.add_argument("--seed", type=int, default=None,
                     help="trial seed (default: derived from scene seed and policy)")
    run.add_argument("--trace", default=None, help="write the JSONL trace here")

    bench = sub.add_parser("bench", parents=[shared],
                           help="execute an experiment plan")
    bench.add_argument("--plan", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--jobs", type=int, default=1)

    fit = sub.add_parser("fit-time", parents=[shared],
                         help="fit time model to a reference table")
    fit.add_argument("--table", default=None,
                     help="CSV with columns tier,policy,time_s (default: built-in table)")
    fit.add_argument("--out", default=None, help="write the config fragment here")

    sub.add_parser("show-config", parents=[shared],
                   help="print the effective config JSON")

    return parser


def _cmd_generate(args, sim) -> int:
    if args.count < 1:
        print("error: --count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    paths = generate_scene_files(Tier(args.tier), args.count, args.seed, args.out, sim)
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_run(args, sim) -> int:
    scene_path = Path(args.scene)
    if not scene_path.exists():
        raise SchemaError(f"scene file not found: {scene_path}")
    scene = scene_from_json(scene_path.read_text(), sim.dish_specs)
    policy = PolicyConfig.named(args.policy, args.utensil_stacking)
    report, events = run_scene_file(
        scene, policy, sim, seed=args.seed, scene_id=scene_path.stem
    )
    if args.trace:
        with Path(args.trace).open("w") as fh:
            for event in events:
                fh.write(json.dumps(event) + "\n")
    print(
        f"# {report.scene_id}: policy={report.policy} trips={report.trips} "
        f"opt={report.opt:.4f} time={report.time_s:.3f}s failures={report.failures}"
    )
    print(json.dumps(report.to_json_obj()))
    return EXIT_OK


def _cmd_bench(args, sim) -> int:
    plan_path = Path(args.plan)
    if not plan_path.exists():
        raise SchemaError(f"plan file not found: {plan_path}")
    plan = plan_from_json(plan_path.read_text())
    reports, summaries = run_plan(plan, sim, args.out, jobs=max(args.jobs, 1))
    print(f"{len(reports)} trials -> {args.out}")
    for row in summaries:
        print(
            f"{row.tier:12s} {row.policy:7s} mean_time={row.mean_time_s:8.2f}s "
            f"opt={row.mean_opt:.3f} failures={row.failures} "
            f"time_ratio={row.time_ratio:.2f} opt_ratio={row.opt_ratio:.2f}"
        )
    return EXIT_OK


def _cmd_fit_time(args, sim) -> int:
    if args.table:
        table_path = Path(args.table)
        if not table_path.exists():
            raise SchemaError(f"table file not found: {table_path}")
        reference = parse_reference_csv(table_path.read_text())
    else:
        reference = None
    counts = simulated_counts(sim)
    result = fit_time_model(counts, reference)
    fragment = {
        "time_model": {
            "grasp_s": result.time_model.grasp_s,
            "pull_s": result.time_model.pull_s,
            "stack_s": result.time_model.stack_s,
            "travel_s": result.time_model.travel_s,
            "bin_delay_s": result.time_model.bin_delay_s,
        },
        "relative_rms_residual": round(result.relative_rms_residual, 6),
        "rows": [
            {
                "tier": row["tier"],
                "policy": row["policy"],
                "observed": row["observed"],
                "predicted": round(row["predicted"], 3),
            }
            for row in result.rows
        ],
    }
    text = json.dumps(fragment, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        sim = load_config(args.config)
        if args.command == "generate":
            return _cmd_generate(args, sim)
        if args.command == "run":
            return _cmd_run(args, sim)
        if args.command == "bench":
            return _cmd_bench(args, sim)
        if args.command == "fit-time":
            return _cmd_fit_time(args, sim)
        if args.command == "show-config":
            print(json.dumps(config_to_json_obj(sim), indent=2))
            return EXIT_OK
        parser.error(f"unknown command {args.command}")
    except (SchemaError, PlacementExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except InfeasibleAction as exc:
        print(f"infeasible action (policy bug): {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
