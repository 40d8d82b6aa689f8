"""Accuracy-dialable comparison oracle and the evaluation ledger.

The oracle answers "is x1 better than x2?" by computing both true
objective values and flipping the verdict with probability
``1 - accuracy``. Its internal objective computations are memoized on
the individuals and are never billed: the ledger's counter moves only
through :meth:`EvaluationLedger.counted_evaluate`, which is the single
place an individual becomes official and enters the archive.

``noisy_sort`` runs a fixed-schedule bubble sort where pairs of official
individuals compare exactly and every other pair goes through the
oracle. The fixed schedule (n passes of n-1-i adjacent comparisons)
guarantees termination even though noisy comparisons are inconsistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._sort_backend import sort_core
from .evolution import Individual
from .problems import BenchmarkProblem, evaluate_batch, evaluate_true


class LedgerViolationError(RuntimeError):
    """An already-official individual was submitted for a counted evaluation."""


@dataclass
class OracleConfig:
    """Comparison accuracy and the stream feeding the verdict flips.

    The flip stream is dedicated (separate from the evolution stream) so
    changing ``sp`` never perturbs variation-operator randomness between
    otherwise identical runs.
    """

    sp: float = 1.0
    rng: np.random.Generator | None = None

    def __post_init__(self):
        if not 0.0 <= self.sp <= 1.0:
            raise ValueError(f"sp must be in [0, 1], got {self.sp}")


@dataclass
class EvaluationLedger:
    """Counted-evaluation budget and the archive of official individuals."""

    max_fe: int
    fe: int = 0
    archive: list[Individual] = field(default_factory=list)

    def __post_init__(self):
        if self.max_fe < 1:
            raise ValueError("max_fe must be positive")

    def counted_evaluate(self, problem: BenchmarkProblem, ind: Individual) -> float:
        """Officially evaluate ``ind``: bill one evaluation, archive it.

        Reuses a fitness the oracle already memoized (the value is exact,
        only the billing changes). Double-billing the same individual is
        a contract violation, not a silent no-op.
        """
        if ind.official:
            raise LedgerViolationError(
                f"individual {ind.id} is already officially evaluated"
            )
        if ind.fitness is None:
            ind.fitness = evaluate_true(problem, ind.genome)
        ind.official = True
        self.archive.append(ind)
        self.fe += 1
        return ind.fitness


def ensure_fitness(members: list[Individual], problem: BenchmarkProblem) -> None:
    """Memoize the true fitness of any member that lacks it (uncounted)."""
    missing = [m for m in members if m.fitness is None]
    if not missing:
        return
    values = evaluate_batch(problem, np.stack([m.genome for m in missing]))
    for m, v in zip(missing, values):
        m.fitness = float(v)


def oracle_label(f1: float, f2: float, sp: float, rng: np.random.Generator) -> bool:
    """Noisy verdict for "f1 is better than f2" (minimization).

    Always consumes exactly one uniform so streams stay aligned across
    accuracy settings. Ties yield False before the flip (strict less-than).
    """
    label = f1 < f2
    if rng.random() < 1.0 - sp:
        label = not label
    return label


def oracle_compare(
    x1: Individual,
    x2: Individual,
    oracle: OracleConfig,
    problem: BenchmarkProblem,
) -> bool:
    """Predict whether ``x1`` beats ``x2``; wrong with probability 1 - sp.

    Each call draws fresh flip randomness: repeating the same pair gives
    independently noisy answers. The true fitness computations behind
    the verdict are memoized and never counted.
    """
    ensure_fitness([x1, x2], problem)
    return oracle_label(x1.fitness, x2.fitness, oracle.sp, oracle.rng)


def sort_order(
    fitness: np.ndarray,
    official: np.ndarray,
    sp: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Noisy-sort permutation over parallel fitness/official arrays.

    Pre-draws the full comparison schedule's worth of uniforms, of which
    the kernel consumes one per oracle-mediated comparison in schedule
    order (the same values on-demand draws would see); the fixed draw
    count keeps the stream advance independent of the official pattern.
    Returns (ascending order, number of oracle comparisons).
    """
    n = len(fitness)
    order = np.arange(n, dtype=np.int64)
    uniforms = rng.random(n * (n - 1) // 2)
    calls = sort_core(
        order,
        np.ascontiguousarray(fitness, dtype=np.float64),
        np.ascontiguousarray(official, dtype=np.uint8),
        uniforms,
        sp,
    )
    return order, calls


def noisy_sort(
    members: list[Individual],
    oracle: OracleConfig,
    problem: BenchmarkProblem,
) -> list[Individual]:
    """Sort ascending by (noisily compared) fitness; permutation of input.

    Official-official adjacencies compare by exact cached fitness; any
    pair with an unofficial member goes through the oracle with fresh
    flip noise per comparison.
    """
    ensure_fitness(members, problem)
    fitness = np.fromiter((m.fitness for m in members), dtype=np.float64, count=len(members))
    official = np.fromiter((m.official for m in members), dtype=np.uint8, count=len(members))
    order, _ = sort_order(fitness, official, oracle.sp, oracle.rng)
    return [members[i] for i in order]
