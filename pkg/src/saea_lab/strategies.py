"""The four search procedures over a shared trial state.

PS asks the oracle whether each offspring beats its parent before
spending a counted evaluation; IB noisy-sorts parents plus offspring and
buys exact values for the predicted-best fraction; GB evolves on oracle
verdicts alone for a fixed number of generations and then buys a single
evaluation; the no-surrogate baseline evaluates everything.

Populations are kept as parallel arrays (genomes / fitness / official /
ids) for speed; Individual objects materialize whenever a counted
evaluation archives one. Offspring fitness is memoized in batch at
creation: sorting or oracle comparison would compute it lazily anyway,
the values are identical, and no billed quantity is touched. All steps
stop issuing counted evaluations once the budget is reached and the
trial ends after the current step.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import oracle as _oracle
from .evolution import EvolutionConfig, Individual, lhs_sample, offspring_genomes
from .oracle import EvaluationLedger, OracleConfig
from .problems import BenchmarkProblem, evaluate_batch
from .results import ConvergenceTrace, TrialResult
from .strategies_kinds import StrategyKind

logger = logging.getLogger(__name__)

INITIAL_SAMPLE_FACTOR = 5  # initial design size = 5 x dim


@dataclass
class StrategyConfig:
    """Knobs shared by all strategies plus the per-strategy ones."""

    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    r_sm: float = 0.5        # IB: fraction of the population bought per generation
    max_gen: int = 30        # GB: oracle-only generations per counted evaluation
    ib_resort: bool = True   # IB: re-sort after buying evaluations (ablation flag)
    gb_stall_limit: int = 1000  # GB: consecutive no-evaluation cycles before halting

    def __post_init__(self):
        if not 0.0 < self.r_sm <= 1.0:
            raise ValueError(f"r_sm must be in (0, 1], got {self.r_sm}")
        if self.max_gen < 1:
            raise ValueError("max_gen must be positive")
        if self.gb_stall_limit < 1:
            raise ValueError("gb_stall_limit must be positive")


@dataclass(eq=False)
class TrialState:
    """Mutable state of one running trial.

    The population lives in parallel arrays, ordered best-predicted-first
    after sorting steps. ``best_fitness`` tracks the minimum official
    fitness (equivalently: min over the archive) and is non-increasing.
    """

    problem: BenchmarkProblem
    config: StrategyConfig
    ledger: EvaluationLedger
    evo_rng: np.random.Generator
    oracle: OracleConfig
    genomes: np.ndarray
    fitness: np.ndarray
    official: np.ndarray
    ids: np.ndarray
    best_fitness: float
    trace_fe: list = field(default_factory=list)
    trace_error: list = field(default_factory=list)
    oracle_calls: int = 0
    next_id: int = 0
    halted: bool = False
    silent_gb_cycles: int = 0
    _pool: tuple | None = None

    @property
    def best_so_far(self) -> float:
        return self.best_fitness

    @property
    def population(self) -> list[Individual]:
        """Materialized view of the population rows."""
        return [
            Individual(
                genome=self.genomes[i].copy(),
                id=int(self.ids[i]),
                fitness=float(self.fitness[i]),
                official=bool(self.official[i]),
            )
            for i in range(len(self.ids))
        ]

    def take_ids(self, n: int) -> np.ndarray:
        ids = np.arange(self.next_id, self.next_id + n, dtype=np.int64)
        self.next_id += n
        return ids

    def budget_left(self) -> bool:
        return self.ledger.fe < self.ledger.max_fe

    def count_official(self, genome: np.ndarray, fitness: float, ind_id: int) -> Individual:
        """Spend one counted evaluation on a known-fitness individual."""
        ind = Individual(genome=np.array(genome), id=int(ind_id), fitness=float(fitness))
        self.ledger.counted_evaluate(self.problem, ind)
        if ind.fitness < self.best_fitness:
            self.best_fitness = ind.fitness
        self.trace_fe.append(self.ledger.fe)
        self.trace_error.append(self.best_fitness - self.problem.f_star)
        return ind

    def spawn_offspring(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """One offspring per slot, with memoized fitness and fresh ids."""
        children = offspring_genomes(
            self.genomes, self.config.evolution, self.problem.space, self.evo_rng
        )
        return children, evaluate_batch(self.problem, children), self.take_ids(len(children))

    def pool_with(self, genomes, fitness, ids):
        """Parents followed by the given offspring, as (reused) pool arrays."""
        n = len(self.ids)
        m = n + len(ids)
        if self._pool is None or self._pool[0].shape[0] != m:
            self._pool = (
                np.empty((m, self.genomes.shape[1])),
                np.empty(m),
                np.empty(m, dtype=np.uint8),
                np.empty(m, dtype=np.int64),
            )
        pool_genomes, pool_fitness, pool_official, pool_ids = self._pool
        pool_genomes[:n] = self.genomes
        pool_genomes[n:] = genomes
        pool_fitness[:n] = self.fitness
        pool_fitness[n:] = fitness
        pool_official[:n] = self.official
        pool_official[n:] = 0
        pool_ids[:n] = self.ids
        pool_ids[n:] = ids
        return pool_genomes, pool_fitness, pool_official, pool_ids

    def adopt(self, genomes, fitness, official, ids, selection):
        self.genomes = genomes[selection]
        self.fitness = fitness[selection]
        self.official = official[selection]
        self.ids = ids[selection]


def initialize_trial(
    problem: BenchmarkProblem,
    config: StrategyConfig,
    seed: int,
    max_fe: int,
) -> TrialState:
    """Latin-hypercube design of 5 x dim points, all officially evaluated,
    then the best N of the archive become the population."""
    root = np.random.SeedSequence(int(seed))
    evo_ss, oracle_ss = root.spawn(2)
    evo_rng = np.random.default_rng(evo_ss)
    live_oracle = replace(config.oracle, rng=np.random.default_rng(oracle_ss))

    n_init = INITIAL_SAMPLE_FACTOR * problem.dim
    state = TrialState(
        problem=problem,
        config=config,
        ledger=EvaluationLedger(max_fe=max_fe),
        evo_rng=evo_rng,
        oracle=live_oracle,
        genomes=np.empty((0, problem.dim)),
        fitness=np.empty(0),
        official=np.empty(0, dtype=np.uint8),
        ids=np.empty(0, dtype=np.int64),
        best_fitness=math.inf,
    )

    samples = lhs_sample(n_init, problem.space, evo_rng)
    values = evaluate_batch(problem, samples)
    ids = state.take_ids(n_init)
    for i in range(n_init):
        state.count_official(samples[i], values[i], ids[i])

    n_pop = config.evolution.pop_size
    order = np.argsort(values, kind="stable")
    chosen = order[:n_pop]
    if n_init < n_pop:
        warnings.warn(
            f"initial sample ({n_init}) smaller than population ({n_pop}); "
            "padding with clones of the best members"
        )
        pad = order[np.arange(n_pop - n_init) % n_init]
        chosen = np.concatenate((order, pad))
    state.genomes = samples[chosen]
    state.fitness = values[chosen]
    state.official = np.ones(n_pop, dtype=np.uint8)
    state.ids = ids[chosen]
    return state


def ps_generation(state: TrialState, config: StrategyConfig) -> TrialState:
    """Pre-selection: evaluate an offspring only when the oracle predicts
    it beats its parent; replace the parent only when it truly does.

    Predicted-inferior offspring are discarded at no cost. The population
    therefore only ever contains officially evaluated members.
    """
    children, child_fit, child_ids = state.spawn_offspring()
    sp = state.oracle.sp
    rng = state.oracle.rng
    for i in range(len(children)):
        if not state.budget_left():
            break  # remaining offspring discarded, not even predicted
        state.oracle_calls += 1
        if _oracle.oracle_label(child_fit[i], state.fitness[i], sp, rng):
            state.count_official(children[i], child_fit[i], child_ids[i])
            if child_fit[i] < state.fitness[i]:
                state.genomes[i] = children[i]
                state.fitness[i] = child_fit[i]
                state.official[i] = 1
                state.ids[i] = child_ids[i]
    return state


def ib_generation(state: TrialState, config: StrategyConfig) -> TrialState:
    """Individual-based step: noisy-sort parents+offspring, officially
    evaluate the first ceil(r_sm * N) unofficial members in predicted
    order, re-sort with the refreshed statuses, keep the best N."""
    children, child_fit, child_ids = state.spawn_offspring()
    genomes, fitness, official, ids = state.pool_with(children, child_fit, child_ids)
    order, calls = _oracle.sort_order(fitness, official, state.oracle.sp, state.oracle.rng)
    state.oracle_calls += calls

    n_eval = math.ceil(config.r_sm * config.evolution.pop_size)
    bought = 0
    for idx in order:
        if bought >= n_eval or not state.budget_left():
            break
        if official[idx]:
            continue  # already exact; spend the budget on new information
        state.count_official(genomes[idx], fitness[idx], ids[idx])
        official[idx] = 1
        bought += 1

    if config.ib_resort:
        order, calls = _oracle.sort_order(
            fitness, official, state.oracle.sp, state.oracle.rng
        )
        state.oracle_calls += calls
    state.adopt(genomes, fitness, official, ids, order[: config.evolution.pop_size])
    return state


def gb_cycle(state: TrialState, config: StrategyConfig) -> TrialState:
    """Generation-based cycle: max_gen generations on oracle verdicts
    alone, then one counted evaluation of the best-predicted unofficial
    population member.

    If the whole population is official (possible late in exact-oracle
    runs when no offspring survives selection) the cycle evaluates
    nothing; after ``gb_stall_limit`` consecutive such cycles the trial
    halts to bound wall-clock time, since the budget no longer advances.
    """
    n_pop = config.evolution.pop_size
    for _ in range(config.max_gen):
        children, child_fit, child_ids = state.spawn_offspring()
        genomes, fitness, official, ids = state.pool_with(children, child_fit, child_ids)
        order, calls = _oracle.sort_order(
            fitness, official, state.oracle.sp, state.oracle.rng
        )
        state.oracle_calls += calls
        state.adopt(genomes, fitness, official, ids, order[:n_pop])

    unofficial = np.nonzero(state.official == 0)[0]
    if len(unofficial) == 0:
        state.silent_gb_cycles += 1
        logger.warning(
            "cycle ended with a fully official population; no evaluation spent "
            "(%d consecutive)",
            state.silent_gb_cycles,
        )
        if state.silent_gb_cycles >= config.gb_stall_limit:
            logger.warning(
                "halting trial after %d consecutive cycles without progress",
                state.silent_gb_cycles,
            )
            state.halted = True
        return state
    state.silent_gb_cycles = 0
    # population rows are in predicted order, so the first unofficial row
    # is the best-predicted one
    pos = int(unofficial[0])
    state.count_official(state.genomes[pos], state.fitness[pos], state.ids[pos])
    state.official[pos] = 1
    return state


def nos_generation(state: TrialState, mode: str) -> TrialState:
    """Baseline step without a surrogate; every offspring is counted.

    mode "PS": an offspring replaces its parent iff truly better.
    mode "IB": truncation-select the best N of parents plus offspring by
    exact fitness. Offspring skipped by budget exhaustion never join the
    selection pool.
    """
    if mode not in ("PS", "IB"):
        raise ValueError(f"unknown baseline mode {mode!r}")
    children, child_fit, child_ids = state.spawn_offspring()
    n = len(children)
    if mode == "PS":
        for i in range(n):
            if not state.budget_left():
                break
            state.count_official(children[i], child_fit[i], child_ids[i])
            if child_fit[i] < state.fitness[i]:
                state.genomes[i] = children[i]
                state.fitness[i] = child_fit[i]
                state.ids[i] = child_ids[i]
        return state

    evaluated = 0
    for i in range(n):
        if not state.budget_left():
            break
        state.count_official(children[i], child_fit[i], child_ids[i])
        evaluated += 1
    genomes, fitness, official, ids = state.pool_with(
        children[:evaluated], child_fit[:evaluated], child_ids[:evaluated]
    )
    official[:] = 1
    order = np.argsort(fitness, kind="stable")
    state.adopt(genomes, fitness, official, ids, order[: state.config.evolution.pop_size])
    return state


def _step(state: TrialState, kind: StrategyKind, config: StrategyConfig) -> None:
    if kind is StrategyKind.PS:
        ps_generation(state, config)
    elif kind is StrategyKind.IB:
        ib_generation(state, config)
    elif kind is StrategyKind.GB:
        gb_cycle(state, config)
    elif kind is StrategyKind.NOS_PS:
        nos_generation(state, "PS")
    elif kind is StrategyKind.NOS_IB:
        nos_generation(state, "IB")
    else:  # pragma: no cover
        raise ValueError(f"unknown strategy {kind}")


def run_strategy(
    problem: BenchmarkProblem,
    kind: StrategyKind,
    config: StrategyConfig,
    max_fe: int,
    seed: int,
    trial: int = 0,
) -> TrialResult:
    """Run one trial to budget exhaustion; deterministic in ``seed``."""
    n_init = INITIAL_SAMPLE_FACTOR * problem.dim
    if max_fe <= n_init:
        raise ValueError(
            f"budget too small: max_fe={max_fe} must exceed the initial sample {n_init}"
        )
    state = initialize_trial(problem, config, seed, max_fe)
    while state.budget_left() and not state.halted:
        _step(state, kind, config)
    return TrialResult(
        problem=problem.id,
        dim=problem.dim,
        strategy=kind,
        sp=config.oracle.sp if kind.uses_oracle else None,
        trial=trial,
        seed=int(seed),
        trace=ConvergenceTrace.from_lists(state.trace_fe, state.trace_error),
        final_error=state.trace_error[-1],
        counted_fe=state.ledger.fe,
        oracle_calls=state.oracle_calls,
    )
