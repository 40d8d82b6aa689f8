"""Strategy identifiers, shared by strategies, runner and I/O layers."""

from __future__ import annotations

import enum


class StrategyKind(enum.Enum):
    """The four search procedures.

    The no-surrogate baseline carries a mode because its flow differs by
    opponent: the PS-shaped variant evaluates every offspring and
    replaces its parent when better; the IB/GB-shaped variant evaluates
    every offspring and truncation-selects from parents plus offspring.
    """

    PS = "PS"
    IB = "IB"
    GB = "GB"
    NOS_PS = "NoS_PS"
    NOS_IB = "NoS_IB"

    @property
    def uses_oracle(self) -> bool:
        return self in (StrategyKind.PS, StrategyKind.IB, StrategyKind.GB)
