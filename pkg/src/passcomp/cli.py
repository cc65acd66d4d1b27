"""Command-line entry point.

Subcommands:
  run       solve an experiment config and write the result CSVs
  validate  check a config and list every violation
  trace     solve one realization and dump its per-iteration objective

Exit codes: 0 success, 1 config violation, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .geometry import ConfigurationError
from .harness import (
    load_config,
    realization_seed,
    run_experiment,
    sample_users,
    solve_instance,
    summary_path,
    validate_config,
    _budgets_for,
)


def _load(path):
    try:
        return load_config(path)
    except (OSError, ConfigurationError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        sys.exit(1)


def _cmd_run(args) -> int:
    config = _load(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    problems = validate_config(config)
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return 1
    try:
        rows = run_experiment(config, workers=args.workers, output=args.out)
    except Exception as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else config.output
    print(f"{len(rows)} rows -> {out} (summary: {summary_path(out)})")
    return 0


def _cmd_validate(args) -> int:
    config = _load(args.config)
    problems = validate_config(config)
    if problems:
        for p in problems:
            print(f"violation: {p}")
        return 1
    print("ok")
    return 0


def _cmd_trace(args) -> int:
    config = _load(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    problems = validate_config(config)
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return 1
    try:
        geometry = config.geometry
        child = realization_seed(config.seed, args.realization)
        users = sample_users(geometry, child)
        budgets = _budgets_for(config, geometry)
        report = solve_instance(args.scheme, geometry, users, budgets, config)
    except Exception as exc:
        print(f"trace failed: {exc}", file=sys.stderr)
        return 2
    lines = ["iteration,mse"]
    lines += [f"{it},{value:.12g}" for it, value in enumerate(report.objective_trace, start=1)]
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"trace failed: {exc}", file=sys.stderr)
            return 2
        print(f"{report.iterations_used} iterations -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="passcomp",
                                     description="Pinching-antenna aided over-the-air "
                                                 "computation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument("--workers", type=int, default=None, help="parallel realizations")
    p_run.add_argument("--out", default=None, help="override the output CSV path")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_tr = sub.add_parser("trace", help="dump one instance's convergence trace")
    p_tr.add_argument("config")
    p_tr.add_argument("--seed", type=int, default=None)
    p_tr.add_argument("--scheme", default="proposed")
    p_tr.add_argument("--realization", type=int, default=0)
    p_tr.add_argument("--out", default=None)
    p_tr.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
