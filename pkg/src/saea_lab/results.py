"""Convergence traces and per-trial results."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import ProblemId, _PROBLEM_ORDINAL
from .strategies_kinds import StrategyKind

_KIND_ORDINAL = {kind: i for i, kind in enumerate(StrategyKind)}


@dataclass(eq=False)
class ConvergenceTrace:
    """Best-so-far error versus counted evaluations, one point per
    counted evaluation. ``fe`` is strictly increasing, ``error``
    non-increasing."""

    fe: np.ndarray
    error: np.ndarray

    @classmethod
    def from_lists(cls, fe: list[int], error: list[float]) -> "ConvergenceTrace":
        return cls(np.asarray(fe, dtype=np.int64), np.asarray(error, dtype=np.float64))

    def values_at(self, grid: np.ndarray) -> np.ndarray:
        """Last-value-carried-forward sample of the step function.

        Checkpoints before the first point take the first (initialization)
        entry.
        """
        idx = np.searchsorted(self.fe, grid, side="right") - 1
        return self.error[np.maximum(idx, 0)]


@dataclass(eq=False)
class TrialResult:
    """One trial's outcome plus the plan coordinates that produced it.

    ``sp`` is None for the no-surrogate baseline (serialized as the
    sentinel string "none").
    """

    problem: ProblemId
    dim: int
    strategy: StrategyKind
    sp: float | None
    trial: int
    seed: int
    trace: ConvergenceTrace
    final_error: float
    counted_fe: int
    oracle_calls: int

    def sort_key(self):
        sp = -1.0 if self.sp is None else self.sp
        return (
            _PROBLEM_ORDINAL[self.problem],
            self.dim,
            _KIND_ORDINAL[self.strategy],
            sp,
            self.trial,
        )
