"""saea_lab: model-management strategies for surrogate-assisted
evolutionary algorithms, driven by a comparison oracle whose accuracy is
a dial rather than a property of a learned model.

The hot comparison-sort kernel is compiled (Cython) when available and
falls back to pure Python; ``saea_lab.SORT_BACKEND`` reports which one
is active.
"""

from ._sort_backend import BACKEND as SORT_BACKEND
from .evolution import (
    EvolutionConfig,
    Individual,
    eix_crossover,
    generate_offspring,
    lhs_sample,
    uniform_mutate,
)
from .oracle import (
    EvaluationLedger,
    LedgerViolationError,
    OracleConfig,
    noisy_sort,
    oracle_compare,
)
from .plans import PlanError, parse_plan, write_plan
from .problems import (
    BenchmarkProblem,
    ProblemId,
    SearchSpace,
    build_problem,
    error_to_optimum,
    evaluate_batch,
    evaluate_true,
    load_shift_rotation,
)
from .results import ConvergenceTrace, TrialResult
from .runner import (
    ExperimentPlan,
    aggregate_traces,
    checkpoint_grid,
    derive_trial_seed,
    run_experiment,
    run_trial,
)
from .stats import (
    MwuResult,
    PairwiseVerdictMatrix,
    kendall_tau,
    mann_whitney_u,
    studentized_range_quantile,
    tukey_hsd,
)
from .strategies import (
    StrategyConfig,
    TrialState,
    gb_cycle,
    ib_generation,
    initialize_trial,
    nos_generation,
    ps_generation,
    run_strategy,
)
from .strategies_kinds import StrategyKind

__version__ = "0.1.0"

__all__ = [
    "SORT_BACKEND",
    "__version__",
    "BenchmarkProblem",
    "ConvergenceTrace",
    "EvaluationLedger",
    "EvolutionConfig",
    "ExperimentPlan",
    "Individual",
    "LedgerViolationError",
    "MwuResult",
    "OracleConfig",
    "PairwiseVerdictMatrix",
    "PlanError",
    "ProblemId",
    "SearchSpace",
    "StrategyConfig",
    "StrategyKind",
    "TrialResult",
    "TrialState",
    "aggregate_traces",
    "build_problem",
    "checkpoint_grid",
    "derive_trial_seed",
    "eix_crossover",
    "error_to_optimum",
    "evaluate_batch",
    "evaluate_true",
    "gb_cycle",
    "generate_offspring",
    "ib_generation",
    "initialize_trial",
    "kendall_tau",
    "lhs_sample",
    "load_shift_rotation",
    "mann_whitney_u",
    "noisy_sort",
    "nos_generation",
    "oracle_compare",
    "parse_plan",
    "ps_generation",
    "run_experiment",
    "run_strategy",
    "run_trial",
    "studentized_range_quantile",
    "tukey_hsd",
    "uniform_mutate",
    "write_plan",
]
