import csv
import filecmp
import json

import numpy as np

from saea_lab.cli import main
from saea_lab.problems import ProblemId
from saea_lab.reports import (
    ResultRecord,
    load_raw_traces,
    load_results_csv,
    write_correlation_table,
    write_hsd_matrices,
    write_mwu_matrices,
    write_results_csv,
)
from saea_lab.strategies_kinds import StrategyKind

TINY_PLAN = {
    "problems": ["f1"],
    "dims": [10],
    "strategies": ["PS", "IB", "GB", "NoS_PS", "NoS_IB"],
    "sp_values": [0.6, 1.0],
    "trials": 3,
    "max_fe": 150,
    "base_seed": 1,
}


def _plan_file(tmp_path, doc=None):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(doc if doc is not None else TINY_PLAN))
    return path


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", "--plan", str(_plan_file(tmp_path))]) == 0
    assert "plan OK" in capsys.readouterr().out


def test_validate_rejects_bad_plan(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"pc": 2.0}')
    assert main(["validate", "--plan", str(path)]) == 1
    assert "invalid plan" in capsys.readouterr().err


def test_run_and_stats_pipeline(tmp_path):
    plan = _plan_file(tmp_path)
    out = tmp_path / "results"
    assert main(["run", "--plan", str(plan), "--out", str(out), "--threads", "2", "--raw"]) == 0

    assert (out / "plan.json").exists()
    records = load_results_csv(out / "results.csv")
    assert len(records) == (3 * 2 + 2) * 3  # (3 oracle strategies x 2 sp + 2 NoS) x 3 trials
    assert all(r.counted_fe == 150 for r in records)

    # trace summaries: one file per (problem, dim, strategy)
    trace_files = sorted(p.name for p in (out / "traces").glob("*.csv"))
    assert trace_files == [
        "f1_10d_GB.csv",
        "f1_10d_IB.csv",
        "f1_10d_NoS_IB.csv",
        "f1_10d_NoS_PS.csv",
        "f1_10d_PS.csv",
    ]
    rows = _read_rows(out / "traces" / "f1_10d_PS.csv")
    assert list(rows[0].keys()) == ["fe", "sp", "mean_error", "std_error", "trials"]
    assert rows[0]["fe"] == "50"  # grid starts at 5 x dim
    by_sp = {}
    for row in rows:
        by_sp.setdefault(row["sp"], []).append(float(row["mean_error"]))
    for sp, means in by_sp.items():
        assert means == sorted(means, reverse=True) or all(
            a >= b - 1e-12 for a, b in zip(means, means[1:])
        )

    # raw traces exist and parse
    raw = load_raw_traces(out)
    assert len(raw) == len(records)
    assert {(r.strategy, r.sp) for r in raw} == {(r.strategy, r.sp) for r in records}

    # stats modes
    assert main(["stats", "--in", str(out), "--mode", "tau"]) == 0
    tau_rows = _read_rows(out / "analysis" / "kendall_tau.csv")
    assert [r["strategy"] for r in tau_rows] == ["PS", "IB", "GB"]
    for row in tau_rows:
        assert row["f1"] == "" or -1.0 <= float(row["f1"]) <= 1.0

    assert main(["stats", "--in", str(out), "--mode", "hsd"]) == 0
    hsd = _read_rows(out / "analysis" / "hsd_PS_f1_10d.csv")
    assert [r["group"] for r in hsd] == ["0.6", "1.0", "NoS"]

    assert main(["stats", "--in", str(out), "--mode", "mwu"]) == 0
    mwu = _read_rows(out / "analysis" / "mwu_PS_vs_IB_10d.csv")
    assert len(mwu) == 1
    assert set(mwu[0]) == {"problem", "0.6", "1.0"}
    assert all(v in ("A-better", "B-better", "none", "f1") for v in mwu[0].values())

    assert main(["stats", "--in", str(out), "--mode", "traces"]) == 0
    assert (out / "analysis" / "traces" / "f1_10d_PS.csv").exists()


def test_stats_traces_without_raw_fails(tmp_path, capsys):
    plan = _plan_file(tmp_path)
    out = tmp_path / "results"
    assert main(["run", "--plan", str(plan), "--out", str(out), "--threads", "1"]) == 0
    assert main(["stats", "--in", str(out), "--mode", "traces"]) == 2
    assert "raw" in capsys.readouterr().err


def test_byte_identical_reruns(tmp_path):
    plan = _plan_file(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out, threads in ((out_a, "2"), (out_b, "1")):
        assert main(["run", "--plan", str(plan), "--out", str(out), "--threads", threads, "--raw"]) == 0
    files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert filecmp.cmp(out_a / rel, out_b / rel, shallow=False), rel


def test_run_rejects_invalid_plan(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"trials": -1}')
    assert main(["run", "--plan", str(path), "--out", str(tmp_path / "o")]) == 1


# --- writer fuzz: emitted CSVs parse back and satisfy their contracts --------

def _random_records(rng, n_cells=6, trials=3):
    records = []
    for c in range(n_cells):
        pid = list(ProblemId)[int(rng.integers(0, 6))]
        kind = list(StrategyKind)[int(rng.integers(0, 5))]
        sp = None if not kind.uses_oracle else float(rng.choice([0.5, 0.8, 1.0]))
        dim = int(rng.choice([10, 30]))
        for t in range(trials):
            records.append(
                ResultRecord(
                    problem=pid,
                    dim=dim,
                    strategy=kind,
                    sp=sp,
                    trial=t,
                    seed=int(rng.integers(0, 2**63)),
                    final_error=float(rng.random() * 1e6),
                    counted_fe=2000,
                    oracle_calls=int(rng.integers(0, 10**9)),
                )
            )
    return records


def test_results_csv_round_trip_fuzz(tmp_path):
    rng = np.random.default_rng(0)
    for round_no in range(10):
        records = _random_records(rng)
        out = tmp_path / f"round{round_no}"
        out.mkdir()
        write_results_csv(records, out)
        loaded = load_results_csv(out / "results.csv")
        assert len(loaded) == len(records)
        for a, b in zip(records, loaded):
            assert (a.problem, a.dim, a.strategy, a.sp, a.trial) == (
                b.problem, b.dim, b.strategy, b.sp, b.trial
            )
            assert a.final_error == b.final_error
            assert a.seed == b.seed


def test_analysis_writers_on_synthetic_records(tmp_path):
    rng = np.random.default_rng(1)
    records = []
    for kind in (StrategyKind.PS, StrategyKind.IB, StrategyKind.GB):
        for sp in (0.5, 0.75, 1.0):
            for t in range(5):
                records.append(
                    ResultRecord(
                        problem=ProblemId.F2, dim=30, strategy=kind, sp=sp, trial=t,
                        seed=t, final_error=float((1.5 - sp) * 100 + rng.random()),
                        counted_fe=2000, oracle_calls=0,
                    )
                )
    for t in range(5):
        records.append(
            ResultRecord(
                problem=ProblemId.F2, dim=30, strategy=StrategyKind.NOS_IB, sp=None,
                trial=t, seed=t, final_error=float(120 + rng.random()),
                counted_fe=2000, oracle_calls=0,
            )
        )
    tau_path = write_correlation_table(records, tmp_path / "kendall_tau.csv")
    rows = _read_rows(tau_path)
    # errors decrease as sp rises, so tau is exactly 1 for every strategy
    assert [float(r["f2"]) for r in rows] == [1.0, 1.0, 1.0]

    hsd_paths = write_hsd_matrices(records, tmp_path)
    names = sorted(p.name for p in hsd_paths)
    assert names == ["hsd_GB_f2_30d.csv", "hsd_IB_f2_30d.csv", "hsd_PS_f2_30d.csv"]
    hsd_rows = _read_rows(tmp_path / "hsd_IB_f2_30d.csv")
    assert [r["group"] for r in hsd_rows] == ["0.5", "0.75", "1.0", "NoS"]

    mwu_paths = write_mwu_matrices(records, tmp_path)
    assert sorted(p.name for p in mwu_paths) == [
        "mwu_IB_vs_GB_30d.csv", "mwu_PS_vs_GB_30d.csv", "mwu_PS_vs_IB_30d.csv",
    ]
