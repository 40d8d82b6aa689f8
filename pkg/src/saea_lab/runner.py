"""Experiment grid execution: strategy x accuracy x problem x dimension
x trial, with derived per-trial seeds and trace aggregation onto a
common checkpoint grid.

Trials are independent units of work; the pool order never affects the
result set, which is returned in canonical coordinate order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .oracle import OracleConfig
from .problems import ProblemId, _PROBLEM_ORDINAL, build_problem
from .results import TrialResult
from .strategies import StrategyConfig, run_strategy
from .strategies_kinds import StrategyKind

logger = logging.getLogger(__name__)

DEFAULT_SP_VALUES = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

# Reserved sp-index for the no-surrogate baseline in seed derivation.
_NO_SP_INDEX = 0xFFFF

_KIND_ORDINAL = {kind: i for i, kind in enumerate(StrategyKind)}


@dataclass
class ExperimentPlan:
    """A full experimental grid plus the shared configuration."""

    problems: list[tuple[ProblemId, int]] = field(
        default_factory=lambda: [(pid, dim) for pid in ProblemId for dim in (10, 30)]
    )
    strategies: list[StrategyKind] = field(
        default_factory=lambda: list(StrategyKind)
    )
    sp_values: list[float] = field(default_factory=lambda: list(DEFAULT_SP_VALUES))
    trials: int = 21
    max_fe: int = 2000
    base_seed: int = 0
    config: StrategyConfig = field(default_factory=StrategyConfig)
    checkpoint_stride: int = 10
    lower_bound: float = -100.0
    upper_bound: float = 100.0
    bounds_overrides: dict[ProblemId, tuple[float, float]] = field(default_factory=dict)

    def bounds_for(self, problem: ProblemId) -> tuple[float, float]:
        return self.bounds_overrides.get(problem, (self.lower_bound, self.upper_bound))

    def cells(self) -> list[tuple[ProblemId, int, StrategyKind, float | None, int]]:
        """All (problem, dim, strategy, sp, sp_index) grid cells.

        The baseline has no accuracy axis: one cell per (problem, dim).
        """
        out = []
        for pid, dim in self.problems:
            for kind in self.strategies:
                if kind.uses_oracle:
                    for sp_index, sp in enumerate(self.sp_values):
                        out.append((pid, dim, kind, sp, sp_index))
                else:
                    out.append((pid, dim, kind, None, _NO_SP_INDEX))
        return out


def derive_trial_seed(
    base_seed: int,
    problem: ProblemId,
    dim: int,
    kind: StrategyKind,
    sp_index: int,
    trial: int,
) -> int:
    """Collision-free 64-bit seed for one grid coordinate."""
    entropy = (
        int(base_seed),
        _PROBLEM_ORDINAL[problem],
        int(dim),
        _KIND_ORDINAL[kind],
        int(sp_index),
        int(trial),
    )
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def run_trial(
    plan: ExperimentPlan,
    problem_id: ProblemId,
    dim: int,
    kind: StrategyKind,
    sp: float | None,
    sp_index: int,
    trial: int,
) -> TrialResult:
    lower, upper = plan.bounds_for(problem_id)
    problem = build_problem(problem_id, dim, plan.base_seed, lower=lower, upper=upper)
    oracle = OracleConfig(sp=sp if sp is not None else 1.0)
    config = replace(plan.config, oracle=oracle)
    seed = derive_trial_seed(plan.base_seed, problem_id, dim, kind, sp_index, trial)
    return run_strategy(problem, kind, config, plan.max_fe, seed, trial=trial)


def _run_trial_task(args) -> TrialResult:
    plan, coords = args
    try:
        return run_trial(plan, *coords)
    except Exception as exc:  # noqa: BLE001 - re-raise with coordinates
        pid, dim, kind, sp, _, trial = coords
        raise RuntimeError(
            f"trial failed at problem={pid.value} dim={dim} strategy={kind.value} "
            f"sp={sp} trial={trial}: {exc}"
        ) from exc


def run_experiment(plan: ExperimentPlan, parallelism: int = 1) -> list[TrialResult]:
    """Execute every grid cell ``plan.trials`` times.

    The result list is ordered canonically by coordinates regardless of
    worker scheduling; any failing trial aborts the run with its
    coordinates attached.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be positive")
    tasks = [
        (plan, (pid, dim, kind, sp, sp_index, trial))
        for (pid, dim, kind, sp, sp_index) in plan.cells()
        for trial in range(plan.trials)
    ]
    logger.info("running %d trials on %d worker(s)", len(tasks), parallelism)
    if parallelism == 1:
        results = [_run_trial_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_trial_task, tasks, chunksize=1))
    results.sort(key=TrialResult.sort_key)
    return results


def checkpoint_grid(dim: int, max_fe: int, stride: int = 10) -> np.ndarray:
    """Checkpoints every ``stride`` evaluations from the end of
    initialization through ``max_fe`` (always included)."""
    start = 5 * dim
    grid = np.arange(start, max_fe + 1, stride, dtype=np.int64)
    if grid[-1] != max_fe:
        grid = np.append(grid, max_fe)
    return grid


@dataclass
class CellAggregate:
    """Mean/std of best-so-far error over a cell's trials, per checkpoint."""

    problem: ProblemId
    dim: int
    strategy: StrategyKind
    sp: float | None
    grid: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    trials: int


def aggregate_traces(
    results: list[TrialResult], grid: np.ndarray | dict[int, np.ndarray]
) -> list[CellAggregate]:
    """Aggregate per-trial step traces onto a checkpoint grid.

    Each trial contributes its last-value-carried-forward best error at
    every checkpoint. ``grid`` may be a single array or a per-dimension
    mapping. All results must share one budget.
    """
    if not results:
        return []
    declared = {r.dim for r in results}
    if isinstance(grid, np.ndarray):
        grids = {dim: grid for dim in declared}
    else:
        grids = grid

    cells: dict[tuple, list[TrialResult]] = {}
    for r in results:
        cells.setdefault((r.problem, r.dim, r.strategy, r.sp), []).append(r)

    out = []
    for (pid, dim, kind, sp), trials in sorted(
        cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1], kv[0][2].value,
                                       -1.0 if kv[0][3] is None else kv[0][3]),
    ):
        g = grids[dim]
        table = np.stack([t.trace.values_at(g) for t in trials])
        n = len(trials)
        std = table.std(axis=0, ddof=1) if n > 1 else np.zeros(len(g))
        out.append(
            CellAggregate(
                problem=pid,
                dim=dim,
                strategy=kind,
                sp=sp,
                grid=g,
                mean=table.mean(axis=0),
                std=std,
                trials=n,
            )
        )
    return out
