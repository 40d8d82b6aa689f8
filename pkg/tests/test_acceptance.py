"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The heavy experiment fixtures (the 30-dimensional sweeps) are shared
across criteria; run with ``pytest tests/test_acceptance.py -s`` to see
the per-criterion lines as they complete. The full module takes on the
order of ten minutes on two cores, dominated by the comparison-heavy
generation-based strategy.
"""

import filecmp
import itertools
import json
import math
import os
import time

import numpy as np
import pytest

import saea_lab.oracle as oracle_mod
from saea_lab.cli import main as cli_main
from saea_lab.evolution import Individual
from saea_lab.oracle import OracleConfig, ensure_fitness, noisy_sort, oracle_compare
from saea_lab.problems import ProblemId, build_problem
from saea_lab.runner import ExperimentPlan, run_experiment
from saea_lab.stats import kendall_tau, mann_whitney_u, studentized_range_quantile
from saea_lab.strategies import (
    StrategyConfig,
    gb_cycle,
    ib_generation,
    initialize_trial,
    nos_generation,
    ps_generation,
)
from saea_lab.strategies_kinds import StrategyKind

ACCEPT_SEED = 0
WORKERS = min(2, os.cpu_count() or 1)
ALL_SP = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def _report(num, name, ok, detail):
    print(f"\nACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} -- {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


# --- shared experiment fixtures ------------------------------------------------

@pytest.fixture(scope="module")
def ps_sweep():
    """PS on all six problems, dim 30, six accuracies, 21 trials."""
    plan = ExperimentPlan(
        problems=[(pid, 30) for pid in ProblemId],
        strategies=[StrategyKind.PS],
        sp_values=ALL_SP,
        trials=21,
        max_fe=2000,
        base_seed=ACCEPT_SEED,
    )
    return run_experiment(plan, parallelism=WORKERS)


@pytest.fixture(scope="module")
def ib_gb_low_accuracy():
    """IB and GB on all six problems at accuracy 0.5, dim 30, 21 trials."""
    plan = ExperimentPlan(
        problems=[(pid, 30) for pid in ProblemId],
        strategies=[StrategyKind.IB, StrategyKind.GB],
        sp_values=[0.5],
        trials=21,
        max_fe=2000,
        base_seed=ACCEPT_SEED,
    )
    return run_experiment(plan, parallelism=WORKERS)


@pytest.fixture(scope="module")
def nos_ps_f1():
    plan = ExperimentPlan(
        problems=[(ProblemId.F1, 30)],
        strategies=[StrategyKind.NOS_PS],
        sp_values=[],
        trials=21,
        max_fe=2000,
        base_seed=ACCEPT_SEED,
    )
    return run_experiment(plan, parallelism=WORKERS)


def _finals(results, pid, kind=None, sp="any"):
    return [
        r.final_error
        for r in results
        if r.problem is pid
        and (kind is None or r.strategy is kind)
        and (sp == "any" or r.sp == sp)
    ]


# --- criterion 1: oracle calibration -------------------------------------------

def test_criterion_1_oracle_calibration():
    problem = build_problem(ProblemId.F1, 5, seed=0)
    rng = np.random.default_rng(0)
    x1 = Individual(genome=problem.space.lower + rng.random(5) * 200.0, id=1)
    x2 = Individual(genome=problem.space.lower + rng.random(5) * 200.0, id=2)
    ensure_fitness([x1, x2], problem)
    assert x1.fitness != x2.fitness
    truth = x1.fitness < x2.fitness

    worst = 0.0
    slowest = 0.0
    for sp in ALL_SP:
        oracle = OracleConfig(sp=sp, rng=np.random.default_rng(1000 + int(sp * 10)))
        start = time.perf_counter()
        wrong = sum(
            oracle_compare(x1, x2, oracle, problem) != truth for _ in range(100_000)
        )
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        worst = max(worst, abs(wrong / 100_000 - (1.0 - sp)))
    _report(
        1, "oracle calibration",
        worst <= 0.01 and slowest < 1.0,
        f"max |rate-(1-sp)|={worst:.4f} (bound 0.01), slowest sp {slowest:.2f}s (bound 1s)",
    )


# --- criterion 2: sort correctness ----------------------------------------------

def test_criterion_2_sort_exactness():
    problem = build_problem(ProblemId.F1, 3, seed=0)
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    checked = 0
    for case in range(1000):
        n = int(rng.integers(2, 101))
        fitness = rng.random(n) * 1e3
        all_official = case % 2 == 0
        members = [
            Individual(
                genome=np.zeros(3),
                id=i,
                fitness=float(fitness[i]),
                official=all_official,
            )
            for i in range(n)
        ]
        sp = 1.0 if not all_official else float(rng.choice(ALL_SP))
        oracle = OracleConfig(sp=sp, rng=rng)
        ordered = noisy_sort(members, oracle, problem)
        expected = sorted(fitness)
        assert [m.fitness for m in ordered] == pytest.approx(expected)
        checked += 1
    elapsed = time.perf_counter() - start
    _report(
        2, "sort correctness",
        checked == 1000 and elapsed < 5.0,
        f"{checked} populations exact, {elapsed:.2f}s (bound 5s)",
    )


# --- criterion 3: FE accounting --------------------------------------------------

def test_criterion_3_fe_accounting(monkeypatch, ps_sweep, ib_gb_low_accuracy):
    problem = build_problem(ProblemId.F8, 30, seed=0)

    def fresh_state(sp):
        config = StrategyConfig(oracle=OracleConfig(sp=sp))
        return initialize_trial(problem, config, seed=11, max_fe=100_000)

    # PS: fe moves once per predicted-superior offspring
    labels = []
    real_label = oracle_mod.oracle_label

    def counting_label(f1, f2, sp, rng):
        out = real_label(f1, f2, sp, rng)
        labels.append(out)
        return out

    monkeypatch.setattr(oracle_mod, "oracle_label", counting_label)
    state = fresh_state(0.7)
    ps_ok = True
    for _ in range(20):
        labels.clear()
        before = state.ledger.fe
        ps_generation(state, state.config)
        ps_ok &= state.ledger.fe - before == sum(labels)
    monkeypatch.setattr(oracle_mod, "oracle_label", real_label)

    # IB: exactly ceil(r_sm N) = 20; GB: exactly 1; NoS: exactly N = 40
    state = fresh_state(0.7)
    ib_deltas = set()
    for _ in range(20):
        before = state.ledger.fe
        ib_generation(state, state.config)
        ib_deltas.add(state.ledger.fe - before)

    state = fresh_state(0.7)
    gb_deltas = set()
    for _ in range(5):
        before = state.ledger.fe
        gb_cycle(state, state.config)
        gb_deltas.add(state.ledger.fe - before)

    nos_deltas = set()
    for mode in ("PS", "IB"):
        state = fresh_state(1.0)
        for _ in range(10):
            before = state.ledger.fe
            nos_generation(state, mode)
            nos_deltas.add(state.ledger.fe - before)

    budgets_ok = all(
        r.counted_fe < 2000 + 40 for r in itertools.chain(ps_sweep, ib_gb_low_accuracy)
    )
    ok = ps_ok and ib_deltas == {20} and gb_deltas == {1} and nos_deltas == {40} and budgets_ok
    _report(
        3, "FE accounting",
        ok,
        f"PS delta==predicted-superior: {ps_ok}; IB deltas {ib_deltas}; GB deltas {gb_deltas}; "
        f"NoS deltas {nos_deltas}; all {len(ps_sweep) + len(ib_gb_low_accuracy)} trials "
        f"ended below max_fe+N: {budgets_ok}",
    )


# --- criterion 4: monotone traces ------------------------------------------------

def test_criterion_4_monotone_traces(ps_sweep, ib_gb_low_accuracy, nos_ps_f1):
    results = list(itertools.chain(ps_sweep, ib_gb_low_accuracy, nos_ps_f1))
    monotone = all(
        np.all(np.diff(r.trace.error) <= 0) and np.all(np.diff(r.trace.fe) > 0)
        for r in results
    )

    # PS at sp=1.0: every counted evaluation replaces a parent
    problem = build_problem(ProblemId.F4, 30, seed=0)
    config = StrategyConfig(oracle=OracleConfig(sp=1.0))
    state = initialize_trial(problem, config, seed=3, max_fe=2000)
    evals = replacements = 0
    while state.budget_left():
        ids_before = state.ids.copy()
        before = state.ledger.fe
        ps_generation(state, config)
        evals += state.ledger.fe - before
        replacements += int(np.sum(state.ids != ids_before))
    _report(
        4, "monotone traces",
        monotone and evals == replacements,
        f"{len(results)} traces non-increasing: {monotone}; PS sp=1.0 "
        f"evaluations {evals} == replacements {replacements}",
    )


# --- criterion 5: small-instance sort distribution -------------------------------

def test_criterion_5_sort_distribution():
    # brute-force enumeration of the fixed 3-element comparison schedule
    # under fair coins (sp=0.5 makes every verdict a coin toss)
    def schedule(coins):
        order = [0, 1, 2]
        toss = iter(coins)
        for i in range(3):
            for j in range(3 - 1 - i):
                if not next(toss):  # verdict "left is better" == coin
                    order[j], order[j + 1] = order[j + 1], order[j]
        return tuple(order)

    expected = {}
    for coins in itertools.product([True, False], repeat=3):
        key = schedule(coins)
        expected[key] = expected.get(key, 0.0) + 1.0 / 8.0

    problem = build_problem(ProblemId.F1, 2, seed=0)
    members = [
        Individual(genome=np.zeros(2), id=i, fitness=float(i + 1)) for i in range(3)
    ]
    oracle = OracleConfig(sp=0.5, rng=np.random.default_rng(5))
    runs = 1_000_000
    counts = {}
    for _ in range(runs):
        ordered = noisy_sort(members, oracle, problem)
        key = tuple(m.id for m in ordered)
        counts[key] = counts.get(key, 0) + 1
    tv = 0.5 * sum(
        abs(counts.get(key, 0) / runs - expected.get(key, 0.0))
        for key in set(counts) | set(expected)
    )
    _report(
        5, "small-instance sort distribution",
        tv < 0.01,
        f"total variation {tv:.5f} over {runs} runs (bound 0.01)",
    )


# --- criterion 6: statistics validation ------------------------------------------

def _tau_pair_counting(xs, ys):
    n = len(xs)
    c = d = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = int(xs[i] > xs[j]) - int(xs[i] < xs[j])
            dy = int(ys[i] > ys[j]) - int(ys[i] < ys[j])
            tx += dx == 0
            ty += dy == 0
            c += dx * dy > 0
            d += dx * dy < 0
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - tx) * (n0 - ty))
    return (c - d) / denom if denom else 0.0


def _mc_studentized_range_quantile(k, df, alpha, draws=10_000_000, seed=99):
    rng = np.random.default_rng(seed)
    samples = np.empty(draws)
    done = 0
    while done < draws:
        m = min(1_000_000, draws - done)
        z = rng.standard_normal((m, k))
        s = np.sqrt(rng.chisquare(df, m) / df)
        samples[done : done + m] = (z.max(axis=1) - z.min(axis=1)) / s
        done += m
    return float(np.quantile(samples, 1.0 - alpha))


def test_criterion_6_statistics_validation():
    # Kendall tau against literal pair counting, exact
    rng = np.random.default_rng(7)
    tau_worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 30))
        xs = rng.integers(-5, 6, size=n)
        ys = rng.integers(-5, 6, size=n)
        tau_worst = max(
            tau_worst, abs(kendall_tau(xs, ys) - _tau_pair_counting(xs, ys))
        )
    tau_ok = tau_worst <= 1e-12

    # Mann-Whitney: normal vs exact, every achievable U at sizes 5..8
    # (below size 5 the discrete null is too coarse for any normal-family
    # approximation to hold 0.03; see the decisions ledger)
    mwu_worst = 0.0
    for n1 in range(5, 9):
        for n2 in range(5, 9):
            base = np.arange(n1 + n2, dtype=float)
            for combo in itertools.combinations(range(n1 + n2), n1):
                mask = np.zeros(n1 + n2, dtype=bool)
                mask[list(combo)] = True
                a, b = base[mask], base[~mask]
                p_exact = mann_whitney_u(a, b, method="exact").p
                p_norm = mann_whitney_u(a, b, method="normal").p
                mwu_worst = max(mwu_worst, abs(p_exact - p_norm))
    mwu_ok = mwu_worst < 0.03

    # studentized range quantile vs Monte Carlo oracle
    q_worst = 0.0
    for k in (2, 7):
        for df in (10, 140):
            q = studentized_range_quantile(k, df, 0.05)
            q_mc = _mc_studentized_range_quantile(k, df, 0.05)
            q_worst = max(q_worst, abs(q - q_mc) / q_mc)
    q_ok = q_worst <= 0.005

    # k=2 identity against the t quantile
    from scipy.stats import t as t_dist

    ident_worst = 0.0
    for df in (10, 140):
        q = studentized_range_quantile(2, df, 0.05)
        expected = math.sqrt(2.0) * t_dist.ppf(0.975, df)
        ident_worst = max(ident_worst, abs(q - expected) / expected)
    ident_ok = ident_worst <= 1e-3

    _report(
        6, "statistics validation",
        tau_ok and mwu_ok and q_ok and ident_ok,
        f"tau max err {tau_worst:.1e}; MWU exact-vs-normal max {mwu_worst:.4f} "
        f"(sizes 5-8, bound 0.03); q vs MC max rel {q_worst:.4f} (bound 0.005); "
        f"sqrt2*t identity max rel {ident_worst:.2e} (bound 1e-3)",
    )


# --- criterion 7: PS accuracy monotonicity (Table-2-style) -----------------------

def test_criterion_7_ps_accuracy_monotonicity(ps_sweep):
    taus = {}
    for pid in ProblemId:
        means = [np.mean(_finals(ps_sweep, pid, sp=sp)) for sp in ALL_SP]
        taus[pid.value] = kendall_tau(ALL_SP, [-m for m in means])
    perfect = sum(1 for v in taus.values() if v >= 1.0 - 1e-12)
    near = all(v >= 0.87 - 1e-9 for v in taus.values())
    _report(
        7, "PS accuracy monotonicity",
        perfect >= 5 and near,
        f"taus={ {k: round(v, 2) for k, v in taus.items()} }; "
        f"{perfect}/6 at 1.00 (need >=5), all >= 0.87: {near}",
    )


# --- criterion 8: IB beats GB at low accuracy ------------------------------------

def test_criterion_8_ib_beats_gb_at_low_accuracy(ib_gb_low_accuracy):
    wins = {}
    for pid in ProblemId:
        ib = _finals(ib_gb_low_accuracy, pid, StrategyKind.IB, sp=0.5)
        gb = _finals(ib_gb_low_accuracy, pid, StrategyKind.GB, sp=0.5)
        res = mann_whitney_u(ib, gb, alpha=0.05)
        wins[pid.value] = bool(res.significant and res.better == "a")
    n_wins = sum(wins.values())
    _report(
        8, "IB beats GB at accuracy 0.5",
        n_wins >= 4,
        f"IB significantly better on {n_wins}/6 problems (need >=4): {wins}",
    )


# --- criterion 9: PS accuracy endpoints on F1 ------------------------------------

def test_criterion_9_ps_endpoints_on_f1(ps_sweep, nos_ps_f1):
    hi = _finals(ps_sweep, ProblemId.F1, sp=1.0)
    lo = _finals(ps_sweep, ProblemId.F1, sp=0.5)
    nos = [r.final_error for r in nos_ps_f1]
    perfect_vs_low = mann_whitney_u(hi, lo, alpha=0.05)
    low_vs_nos = mann_whitney_u(lo, nos, alpha=0.05)
    ok = (
        np.mean(hi) < np.mean(lo)
        and perfect_vs_low.significant
        and perfect_vs_low.better == "a"
        and not low_vs_nos.significant
    )
    _report(
        9, "PS endpoints on F1",
        ok,
        f"PS(1.0) vs PS(0.5): p={perfect_vs_low.p:.2e} better={perfect_vs_low.better}; "
        f"PS(0.5) vs NoS: p={low_vs_nos.p:.3f} (want non-significant)",
    )


# --- criterion 10: byte-identical reruns ------------------------------------------

def test_criterion_10_determinism(tmp_path):
    plan = {
        "problems": ["f1", "f8"],
        "dims": [10],
        "strategies": ["PS", "GB", "NoS_IB"],
        "sp_values": [0.5, 1.0],
        "trials": 2,
        "max_fe": 200,
        "base_seed": ACCEPT_SEED,
    }
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps(plan))
    dirs = []
    for name, threads in (("a", "2"), ("b", "1")):
        out = tmp_path / name
        code = cli_main(
            ["run", "--plan", str(plan_path), "--out", str(out), "--threads", threads, "--raw"]
        )
        assert code == 0
        dirs.append(out)
    rel_a = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    rel_b = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
    identical = rel_a == rel_b and all(
        filecmp.cmp(dirs[0] / rel, dirs[1] / rel, shallow=False) for rel in rel_a
    )
    _report(
        10, "determinism",
        identical,
        f"{len(rel_a)} files byte-identical across reruns (threads 2 vs 1)",
    )
