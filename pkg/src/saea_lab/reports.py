"""Result persistence and analysis-ready tables.

Everything is plain CSV: a per-trial summary, per-cell convergence
traces on the checkpoint grid (the data behind the accuracy-sweep
figures), the accuracy/performance rank-correlation table, Tukey HSD
verdict matrices across accuracy groups, and Mann-Whitney verdicts
between strategies. Output bytes are deterministic for a given result
set: fixed row order, repr-formatted floats, \\n line endings.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .problems import ProblemId
from .results import ConvergenceTrace
from .runner import aggregate_traces, checkpoint_grid
from .stats import kendall_tau, mann_whitney_u, tukey_hsd
from .strategies_kinds import StrategyKind

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
PLAN_FILE = "plan.json"
TRACES_DIR = "traces"
RAW_DIR = "raw"
ANALYSIS_DIR = "analysis"

NO_SP = "none"

_MWU_PAIRS = (
    (StrategyKind.PS, StrategyKind.IB),
    (StrategyKind.PS, StrategyKind.GB),
    (StrategyKind.IB, StrategyKind.GB),
)

_BASELINE_PARTNER = {
    StrategyKind.PS: StrategyKind.NOS_PS,
    StrategyKind.IB: StrategyKind.NOS_IB,
    StrategyKind.GB: StrategyKind.NOS_IB,
}


def _fmt_sp(sp: float | None) -> str:
    return NO_SP if sp is None else repr(sp)


def _parse_sp(text: str) -> float | None:
    return None if text == NO_SP else float(text)


def _open_csv(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


@dataclass(eq=False)
class ResultRecord:
    """One results.csv row (a trial without its trace)."""

    problem: ProblemId
    dim: int
    strategy: StrategyKind
    sp: float | None
    trial: int
    seed: int
    final_error: float
    counted_fe: int
    oracle_calls: int


def write_results_csv(results, out_dir) -> Path:
    path = Path(out_dir) / RESULTS_FILE
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(
            ["problem", "dim", "strategy", "sp", "trial", "seed",
             "final_error", "counted_fe", "oracle_calls"]
        )
        for r in results:
            writer.writerow(
                [r.problem.value, r.dim, r.strategy.value, _fmt_sp(r.sp), r.trial,
                 r.seed, repr(float(r.final_error)), r.counted_fe, r.oracle_calls]
            )
    return path


def load_results_csv(path) -> list[ResultRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                ResultRecord(
                    problem=ProblemId(row["problem"]),
                    dim=int(row["dim"]),
                    strategy=StrategyKind(row["strategy"]),
                    sp=_parse_sp(row["sp"]),
                    trial=int(row["trial"]),
                    seed=int(row["seed"]),
                    final_error=float(row["final_error"]),
                    counted_fe=int(row["counted_fe"]),
                    oracle_calls=int(row["oracle_calls"]),
                )
            )
    return records


def write_traces(results, out_dir, max_fe: int, stride: int = 10, raw: bool = False) -> None:
    """One summary CSV per (problem, dim, strategy) on the checkpoint
    grid; optionally the raw per-trial step traces."""
    out_dir = Path(out_dir)
    grids = {dim: checkpoint_grid(dim, max_fe, stride) for dim in {r.dim for r in results}}
    aggregates = aggregate_traces(list(results), grids)

    by_file: dict[tuple, list] = {}
    for agg in aggregates:
        by_file.setdefault((agg.problem, agg.dim, agg.strategy), []).append(agg)
    for (pid, dim, kind), aggs in by_file.items():
        path = out_dir / TRACES_DIR / f"{pid.value}_{dim}d_{kind.value}.csv"
        fh, writer = _open_csv(path)
        with fh:
            writer.writerow(["fe", "sp", "mean_error", "std_error", "trials"])
            for agg in sorted(aggs, key=lambda a: _sp_sort_key(a.sp)):
                for fe, mean, std in zip(agg.grid, agg.mean, agg.std):
                    writer.writerow(
                        [int(fe), _fmt_sp(agg.sp), repr(float(mean)), repr(float(std)), agg.trials]
                    )

    if raw:
        for r in results:
            tag = "nos" if r.sp is None else f"sp{r.sp!r}"
            path = (
                out_dir / RAW_DIR
                / f"{r.problem.value}_{r.dim}d_{r.strategy.value}_{tag}_t{r.trial:02d}.csv"
            )
            fh, writer = _open_csv(path)
            with fh:
                writer.writerow(["fe", "best_error"])
                for fe, err in zip(r.trace.fe, r.trace.error):
                    writer.writerow([int(fe), repr(float(err))])


def _sp_sort_key(sp: float | None) -> float:
    # baseline rows sort after every accuracy level
    return float("inf") if sp is None else sp


@dataclass(eq=False)
class RawTraceRecord:
    """A raw per-trial trace read back from disk."""

    problem: ProblemId
    dim: int
    strategy: StrategyKind
    sp: float | None
    trial: int
    trace: ConvergenceTrace


def load_raw_traces(out_dir) -> list[RawTraceRecord]:
    records = []
    raw_dir = Path(out_dir) / RAW_DIR
    for path in sorted(raw_dir.glob("*.csv")):
        # {problem}_{dim}d_{strategy}_{sp-tag}_t{trial}.csv; the strategy
        # name itself may contain underscores
        tokens = path.stem.split("_")
        pid_str, dim_str = tokens[0], tokens[1]
        tag, trial_part = tokens[-2], tokens[-1].removeprefix("t")
        kind_str = "_".join(tokens[2:-2])
        sp = None if tag == "nos" else float(tag.removeprefix("sp"))
        fe, err = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                fe.append(int(row["fe"]))
                err.append(float(row["best_error"]))
        records.append(
            RawTraceRecord(
                problem=ProblemId(pid_str),
                dim=int(dim_str.removesuffix("d")),
                strategy=StrategyKind(kind_str),
                sp=sp,
                trial=int(trial_part),
                trace=ConvergenceTrace.from_lists(fe, err),
            )
        )
    return records


def _mean_final_errors(results) -> dict:
    """(strategy, dim, problem) -> {sp: mean final error over trials}."""
    sums: dict = {}
    for r in results:
        key = (r.strategy, r.dim, r.problem, r.sp)
        acc = sums.setdefault(key, [0.0, 0])
        acc[0] += r.final_error
        acc[1] += 1
    table: dict = {}
    for (kind, dim, pid, sp), (total, count) in sums.items():
        table.setdefault((kind, dim, pid), {})[sp] = total / count
    return table


def write_correlation_table(results, out_path) -> Path:
    """Rank correlation between accuracy and mean final error, oriented
    so +1 means higher accuracy gave better results. Baseline trials
    carry no accuracy and stay out of the correlation."""
    table = _mean_final_errors(r for r in results if r.sp is not None)
    problems = sorted({pid for (_, _, pid) in table}, key=lambda p: _PROBLEM_ORDER[p])
    rows = sorted(
        {(kind, dim) for (kind, dim, _) in table},
        key=lambda kd: (_KIND_ORDER[kd[0]], kd[1]),
    )
    path = Path(out_path)
    fh, writer = _open_csv(path)
    with fh:
        writer.writerow(["strategy", "dim"] + [p.value for p in problems])
        for kind, dim in rows:
            row = [kind.value, dim]
            for pid in problems:
                by_sp = table.get((kind, dim, pid), {})
                if len(by_sp) < 2:
                    logger.warning(
                        "skipping tau for %s dim=%d %s: %d accuracy level(s)",
                        kind.value, dim, pid.value, len(by_sp),
                    )
                    row.append("")
                    continue
                sps = sorted(by_sp)
                tau = kendall_tau(sps, [-by_sp[sp] for sp in sps])
                row.append(repr(tau))
            writer.writerow(row)
    return path


def _finals(results) -> dict:
    """(strategy, dim, problem, sp) -> final errors in trial order."""
    cells: dict = {}
    for r in results:
        cells.setdefault((r.strategy, r.dim, r.problem, r.sp), []).append(
            (r.trial, r.final_error)
        )
    return {
        key: np.array([err for _, err in sorted(vals)]) for key, vals in cells.items()
    }


def write_hsd_matrices(results, out_dir, alpha: float = 0.05) -> list[Path]:
    """Per (strategy, problem, dim): the all-pairs accuracy-group verdict
    matrix, with the matching baseline joining as its own group."""
    finals = _finals(results)
    strategies = sorted(
        {k for (k, _, _, _) in finals if k.uses_oracle}, key=lambda k: _KIND_ORDER[k]
    )
    written = []
    for kind in strategies:
        partner = _BASELINE_PARTNER[kind]
        cells = sorted(
            {(dim, pid) for (k, dim, pid, _) in finals if k is kind},
            key=lambda dp: (dp[0], _PROBLEM_ORDER[dp[1]]),
        )
        for dim, pid in cells:
            sps = sorted(sp for (k, d, p, sp) in finals if k is kind and d == dim and p is pid)
            groups = [(repr(sp), finals[(kind, dim, pid, sp)]) for sp in sps]
            baseline = finals.get((partner, dim, pid, None))
            if baseline is not None:
                groups.append(("NoS", baseline))
            if len(groups) < 2 or any(len(v) < 2 for _, v in groups):
                logger.warning(
                    "skipping HSD for %s %s dim=%d: not enough groups/trials",
                    kind.value, pid.value, dim,
                )
                continue
            matrix = tukey_hsd(groups, alpha=alpha)
            path = Path(out_dir) / f"hsd_{kind.value}_{pid.value}_{dim}d.csv"
            fh, writer = _open_csv(path)
            with fh:
                writer.writerow(["group"] + matrix.labels)
                for i, label in enumerate(matrix.labels):
                    writer.writerow(
                        [label] + [matrix.verdict(i, j) for j in range(len(matrix.labels))]
                    )
            written.append(path)
    return written


def write_pairwise_matrices(results, out_dir, mode: str, alpha: float = 0.05) -> list[Path]:
    """Dispatch between the two pairwise-comparison table families."""
    if mode == "hsd_within_strategy":
        return write_hsd_matrices(results, out_dir, alpha=alpha)
    if mode == "mwu_between_strategies":
        return write_mwu_matrices(results, out_dir, alpha=alpha)
    raise ValueError(f"unknown pairwise mode {mode!r}")


def write_mwu_matrices(results, out_dir, alpha: float = 0.05) -> list[Path]:
    """Between-strategy verdicts at matched accuracy: one CSV per
    (strategy pair, dim), problems down the rows, accuracies across."""
    finals = _finals(results)
    dims = sorted({dim for (_, dim, _, _) in finals})
    written = []
    for a_kind, b_kind in _MWU_PAIRS:
        for dim in dims:
            keys = [
                (pid, sp)
                for (k, d, pid, sp) in finals
                if k is a_kind and d == dim and sp is not None
                and (b_kind, dim, pid, sp) in finals
            ]
            if not keys:
                continue
            problems = sorted({pid for pid, _ in keys}, key=lambda p: _PROBLEM_ORDER[p])
            sps = sorted({sp for _, sp in keys})
            path = Path(out_dir) / f"mwu_{a_kind.value}_vs_{b_kind.value}_{dim}d.csv"
            fh, writer = _open_csv(path)
            with fh:
                writer.writerow(["problem"] + [repr(sp) for sp in sps])
                for pid in problems:
                    row = [pid.value]
                    for sp in sps:
                        a = finals.get((a_kind, dim, pid, sp))
                        b = finals.get((b_kind, dim, pid, sp))
                        if a is None or b is None:
                            row.append("")
                            continue
                        res = mann_whitney_u(a, b, alpha=alpha)
                        if not res.significant:
                            row.append("none")
                        else:
                            row.append("A-better" if res.better == "a" else "B-better")
                    writer.writerow(row)
            written.append(path)
    return written


_PROBLEM_ORDER = {pid: i for i, pid in enumerate(ProblemId)}
_KIND_ORDER = {kind: i for i, kind in enumerate(StrategyKind)}
