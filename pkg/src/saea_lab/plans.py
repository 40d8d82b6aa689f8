"""Experiment-plan documents.

A plan is a single JSON object with a versioned schema; every key is
optional and falls back to the standard experiment defaults
(population 40, pc 0.7, pm 0.3, gamma 0.4, r_sm 0.5, max_gen 30,
budget 2000, 21 trials, accuracies 0.5..1.0). Unknown keys are
rejected so typos cannot silently change an experiment.
"""

from __future__ import annotations

import json
from pathlib import Path

from .evolution import EvolutionConfig
from .problems import DEFAULT_LOWER, DEFAULT_UPPER, ProblemId
from .runner import ExperimentPlan, DEFAULT_SP_VALUES
from .strategies import StrategyConfig
from .strategies_kinds import StrategyKind

SCHEMA_VERSION = 1

_PROBLEM_BY_NAME = {pid.value: pid for pid in ProblemId}
_STRATEGY_BY_NAME = {kind.value: kind for kind in StrategyKind}


class PlanError(ValueError):
    """A plan document failed validation; the message names the key."""


def _require(condition: bool, key: str, message: str):
    if not condition:
        raise PlanError(f"plan key {key!r}: {message}")


def _as_int(doc, key, default, minimum=None):
    value = doc.pop(key, default)
    _require(isinstance(value, int) and not isinstance(value, bool), key, "expected an integer")
    if minimum is not None:
        _require(value >= minimum, key, f"must be >= {minimum}")
    return value


def _as_float(doc, key, default, lo=None, hi=None):
    value = doc.pop(key, default)
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), key, "expected a number")
    value = float(value)
    if lo is not None:
        _require(value >= lo, key, f"must be >= {lo}")
    if hi is not None:
        _require(value <= hi, key, f"must be <= {hi}")
    return value


def _as_bool(doc, key, default):
    value = doc.pop(key, default)
    _require(isinstance(value, bool), key, "expected true/false")
    return value


def _as_choice(doc, key, default, choices):
    value = doc.pop(key, default)
    _require(value in choices, key, f"must be one of {sorted(choices)}")
    return value


def parse_plan_dict(doc: dict) -> ExperimentPlan:
    doc = dict(doc)
    version = _as_int(doc, "schema_version", SCHEMA_VERSION)
    _require(version == SCHEMA_VERSION, "schema_version", f"supported version is {SCHEMA_VERSION}")

    problems_raw = doc.pop("problems", [pid.value for pid in ProblemId])
    _require(isinstance(problems_raw, list) and problems_raw, "problems", "expected a non-empty list")
    problems = []
    for name in problems_raw:
        _require(isinstance(name, str) and name.lower() in _PROBLEM_BY_NAME, "problems",
                 f"unknown problem {name!r}")
        problems.append(_PROBLEM_BY_NAME[name.lower()])

    dims = doc.pop("dims", [10, 30])
    _require(isinstance(dims, list) and dims, "dims", "expected a non-empty list")
    for d in dims:
        _require(isinstance(d, int) and d >= 2, "dims", f"dimension must be an integer >= 2, got {d!r}")

    strategies_raw = doc.pop("strategies", [k.value for k in StrategyKind])
    _require(isinstance(strategies_raw, list) and strategies_raw, "strategies",
             "expected a non-empty list")
    strategies = []
    for name in strategies_raw:
        _require(name in _STRATEGY_BY_NAME, "strategies", f"unknown strategy {name!r}")
        strategies.append(_STRATEGY_BY_NAME[name])

    sp_values = doc.pop("sp_values", list(DEFAULT_SP_VALUES))
    _require(isinstance(sp_values, list), "sp_values", "expected a list")
    for sp in sp_values:
        _require(isinstance(sp, (int, float)) and 0.0 <= sp <= 1.0, "sp_values",
                 f"accuracy must be in [0, 1], got {sp!r}")
    _require(
        sp_values != [] or not any(k.uses_oracle for k in strategies),
        "sp_values",
        "may only be empty in a baseline-only plan",
    )

    trials = _as_int(doc, "trials", 21, minimum=1)
    max_fe = _as_int(doc, "max_fe", 2000, minimum=1)
    base_seed = _as_int(doc, "base_seed", 0, minimum=0)

    evolution = EvolutionConfig(
        pop_size=_as_int(doc, "population_size", 40, minimum=1),
        pc=_as_float(doc, "pc", 0.7, lo=0.0, hi=1.0),
        pm=_as_float(doc, "pm", 0.3, lo=0.0, hi=1.0),
        gamma=_as_float(doc, "gamma", 0.4, lo=0.0),
        alpha_range=_as_choice(doc, "alpha_range", "standard", {"standard", "literal"}),
        mutation_scheme=_as_choice(doc, "mutation_scheme", "per-individual", {"per-gene", "per-individual"}),
    )
    config = StrategyConfig(
        evolution=evolution,
        r_sm=_as_float(doc, "r_sm", 0.5, lo=1e-12, hi=1.0),
        max_gen=_as_int(doc, "max_gen", 30, minimum=1),
        ib_resort=_as_bool(doc, "ib_resort", True),
        gb_stall_limit=_as_int(doc, "gb_stall_limit", 1000, minimum=1),
    )

    lower = _as_float(doc, "lower_bound", DEFAULT_LOWER)
    upper = _as_float(doc, "upper_bound", DEFAULT_UPPER)
    _require(lower < upper, "lower_bound", "must be strictly below upper_bound")

    overrides_raw = doc.pop("bounds_overrides", {})
    _require(isinstance(overrides_raw, dict), "bounds_overrides", "expected an object")
    bounds_overrides = {}
    for name, pair in overrides_raw.items():
        _require(isinstance(name, str) and name.lower() in _PROBLEM_BY_NAME,
                 "bounds_overrides", f"unknown problem {name!r}")
        _require(
            isinstance(pair, list) and len(pair) == 2
            and all(isinstance(v, (int, float)) for v in pair) and pair[0] < pair[1],
            "bounds_overrides", f"{name}: expected [lower, upper] with lower < upper",
        )
        bounds_overrides[_PROBLEM_BY_NAME[name.lower()]] = (float(pair[0]), float(pair[1]))

    checkpoint_stride = _as_int(doc, "checkpoint_stride", 10, minimum=1)

    if doc:
        raise PlanError(f"unknown plan key(s): {sorted(doc)}")

    return ExperimentPlan(
        problems=[(pid, dim) for pid in problems for dim in dims],
        strategies=strategies,
        sp_values=[float(sp) for sp in sp_values],
        trials=trials,
        max_fe=max_fe,
        base_seed=base_seed,
        config=config,
        checkpoint_stride=checkpoint_stride,
        lower_bound=lower,
        upper_bound=upper,
        bounds_overrides=bounds_overrides,
    )


def parse_plan(path) -> ExperimentPlan:
    """Load and validate a plan document; defaults fill missing keys."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PlanError(f"cannot read plan file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise PlanError("plan document must be a JSON object")
    return parse_plan_dict(doc)


def plan_to_dict(plan: ExperimentPlan) -> dict:
    """Normalized document form; parses back to an equal plan."""
    problems = sorted({pid.value for pid, _ in plan.problems},
                      key=lambda v: _PROBLEM_ORDER[v])
    dims = sorted({dim for _, dim in plan.problems})
    evo = plan.config.evolution
    return {
        "schema_version": SCHEMA_VERSION,
        "problems": problems,
        "dims": dims,
        "strategies": [k.value for k in plan.strategies],
        "sp_values": plan.sp_values,
        "trials": plan.trials,
        "max_fe": plan.max_fe,
        "base_seed": plan.base_seed,
        "population_size": evo.pop_size,
        "pc": evo.pc,
        "pm": evo.pm,
        "gamma": evo.gamma,
        "alpha_range": evo.alpha_range,
        "mutation_scheme": evo.mutation_scheme,
        "r_sm": plan.config.r_sm,
        "max_gen": plan.config.max_gen,
        "ib_resort": plan.config.ib_resort,
        "gb_stall_limit": plan.config.gb_stall_limit,
        "lower_bound": plan.lower_bound,
        "upper_bound": plan.upper_bound,
        "bounds_overrides": {
            pid.value: list(pair) for pid, pair in sorted(
                plan.bounds_overrides.items(), key=lambda kv: kv[0].value)
        },
        "checkpoint_stride": plan.checkpoint_stride,
    }


_PROBLEM_ORDER = {pid.value: i for i, pid in enumerate(ProblemId)}


def write_plan(plan: ExperimentPlan, path) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan), indent=2) + "\n")
