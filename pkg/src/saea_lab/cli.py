"""Command-line interface.

    saea-lab run --plan plan.json --out results/ [--threads N] [--raw]
    saea-lab stats --in results/ --mode {traces|tau|hsd|mwu} [--alpha A]
    saea-lab validate --plan plan.json

Exit codes: 0 success, 1 plan-validation failure, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .plans import PlanError, parse_plan, write_plan
from .reports import (
    ANALYSIS_DIR,
    PLAN_FILE,
    RESULTS_FILE,
    load_raw_traces,
    load_results_csv,
    write_correlation_table,
    write_hsd_matrices,
    write_mwu_matrices,
    write_results_csv,
    write_traces,
)
from .runner import run_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _default_threads() -> int:
    env = os.environ.get("SAEA_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring non-integer SAEA_LAB_THREADS=%r", env)
    return os.cpu_count() or 1


def _cmd_run(args) -> int:
    plan = parse_plan(args.plan)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_experiment(plan, parallelism=args.threads)
    write_plan(plan, out_dir / PLAN_FILE)
    write_results_csv(results, out_dir)
    write_traces(results, out_dir, plan.max_fe, plan.checkpoint_stride, raw=args.raw)
    print(f"wrote {len(results)} trials to {out_dir}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    in_dir = Path(args.in_dir)
    analysis = in_dir / ANALYSIS_DIR
    analysis.mkdir(parents=True, exist_ok=True)
    if args.mode == "traces":
        records = load_raw_traces(in_dir)
        if not records:
            print(
                f"no raw traces under {in_dir}; run with --raw to enable trace analysis",
                file=sys.stderr,
            )
            return EXIT_RUNTIME
        plan = parse_plan(in_dir / PLAN_FILE)
        write_traces(records, analysis, plan.max_fe, plan.checkpoint_stride)
        print(f"wrote aggregated traces to {analysis}")
        return EXIT_OK

    results = load_results_csv(in_dir / RESULTS_FILE)
    if args.mode == "tau":
        path = write_correlation_table(results, analysis / "kendall_tau.csv")
        print(f"wrote {path}")
    elif args.mode == "hsd":
        paths = write_hsd_matrices(results, analysis, alpha=args.alpha)
        print(f"wrote {len(paths)} HSD matrices to {analysis}")
    elif args.mode == "mwu":
        paths = write_mwu_matrices(results, analysis, alpha=args.alpha)
        print(f"wrote {len(paths)} Mann-Whitney matrices to {analysis}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    plan = parse_plan(args.plan)
    cells = len(plan.cells())
    print(f"plan OK: {cells} cells x {plan.trials} trials = {cells * plan.trials}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saea-lab",
        description="Surrogate-strategy experiments with an accuracy-dialable comparison oracle",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment plan")
    run.add_argument("--plan", required=True, help="path to a JSON plan document")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument(
        "--threads", type=int, default=_default_threads(),
        help="worker processes (default: SAEA_LAB_THREADS or CPU count)",
    )
    run.add_argument("--raw", action="store_true", help="also write per-trial raw traces")
    run.set_defaults(func=_cmd_run)

    stats = sub.add_parser("stats", help="emit analysis tables from a result directory")
    stats.add_argument("--in", dest="in_dir", required=True, help="result directory")
    stats.add_argument("--mode", required=True, choices=["traces", "tau", "hsd", "mwu"])
    stats.add_argument("--alpha", type=float, default=0.05, help="significance level")
    stats.set_defaults(func=_cmd_stats)

    validate = sub.add_parser("validate", help="check a plan document")
    validate.add_argument("--plan", required=True)
    validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlanError as exc:
        print(f"invalid plan: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
