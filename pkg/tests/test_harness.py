import csv
import math

import pytest

from sipcsa import cli, harness
from sipcsa.engine import GENERAL_CONVEX, EmptyBError, PolicySchedule
from sipcsa.harness import (SUMMARY_COLUMNS, TRACE_COLUMNS, ExperimentSpec, cmd_mh_sensitivity,
                            cmd_rates, cmd_run, format_table1, loglog_slope, relative_gap,
                            theoretical_bounds)
from sipcsa.problems import robust_lp, robust_lp_optimum


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_trace_and_summary_schema(tmp_path):
    spec = ExperimentSpec(sampler="fixed", N=40, seeds=(0, 3), oracle_every=10, out=str(tmp_path))
    status, outcomes = cmd_run(spec)
    assert status == 0
    trace = read_csv(tmp_path / "trace_seed3.csv")
    assert trace[0] == TRACE_COLUMNS
    assert len(trace) == 41
    assert [int(r[0]) for r in trace[1:]] == list(range(1, 41))
    assert {r[1] for r in trace[1:]} <= {"0", "1"}
    assert all(r[6] == "" for r in trace[1:] if int(r[0]) % 10)
    assert all(r[6] != "" for r in trace[1:] if int(r[0]) % 10 == 0)
    summary = read_csv(tmp_path / "summary.csv")
    assert summary[0] == SUMMARY_COLUMNS
    assert [r[0] for r in summary[1:]] == ["0", "3"]
    assert all(r[1] == "ok" and r[5] == "" for r in summary[1:])
    text = (tmp_path / "summary.csv").read_text()
    float(summary[1][2])
    assert ";" not in text


def test_single_iteration_trace(tmp_path):
    cmd_run(ExperimentSpec(N=1, out=str(tmp_path)))
    rows = read_csv(tmp_path / "trace_seed0.csv")
    assert rows[0] == TRACE_COLUMNS and len(rows) == 2


def test_record_time_fills_column(tmp_path):
    cmd_run(ExperimentSpec(N=5, out=str(tmp_path), record_time=True))
    assert float(read_csv(tmp_path / "summary.csv")[1][5]) >= 0


def test_byte_identical_reruns(tmp_path):
    spec = dict(sampler="adaptive", N=60, seeds=(1, 2), oracle_every=7, mh_iterations=20)
    cmd_run(ExperimentSpec(out=str(tmp_path / "a"), **spec))
    cmd_run(ExperimentSpec(out=str(tmp_path / "b"), **spec))
    for name in ("trace_seed1.csv", "trace_seed2.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_parallel_matches_sequential(tmp_path):
    spec = dict(sampler="fixed", N=50, seeds=(0, 1, 2), oracle_every=5)
    cmd_run(ExperimentSpec(out=str(tmp_path / "seq"), **spec), jobs=1)
    cmd_run(ExperimentSpec(out=str(tmp_path / "par"), **spec), jobs=2)
    for name in ("trace_seed0.csv", "trace_seed1.csv", "trace_seed2.csv", "summary.csv"):
        assert (tmp_path / "seq" / name).read_bytes() == (tmp_path / "par" / name).read_bytes()


def test_all_seeds_empty(tmp_path, monkeypatch):
    def boom(problem, schedule, backend, **kw):
        from sipcsa.engine import RunResult
        raise EmptyBError("empty", RunResult(None, [], 0, None, 1))

    monkeypatch.setattr(harness, "csa_run", boom)
    status, outcomes = cmd_run(ExperimentSpec(N=3, seeds=(0, 1), out=str(tmp_path)))
    assert status == 1
    assert [r[1] for r in read_csv(tmp_path / "summary.csv")[1:]] == ["empty_B", "empty_B"]


def test_running_average_is_running():
    spec = ExperimentSpec(sampler="grid", N=6, oracle_every=1, grid_points=21)
    rows = harness.run_seed(spec, 0).trace_rows
    assert rows[0][7] == rows[0][5]  # average of one iterate
    assert len(rows) == 6


def test_theory_bound_at_100():
    p = robust_lp()
    gap, viol = theoretical_bounds(p, PolicySchedule(GENERAL_CONVEX, p.constants, 100))
    assert gap == pytest.approx(6.274, abs=1e-3)
    assert viol == pytest.approx(2 * gap)


def test_rates_rows(tmp_path):
    rows = cmd_rates("robust-lp", "convex", "grid", [10, 40], [0], out=str(tmp_path), grid=21)
    assert [r.N for r in rows] == [10, 40]
    assert all(r.mean_gap <= r.gap_bound for r in rows)
    assert read_csv(tmp_path / "rates.csv")[0][:5] == ["N", "mean_gap", "mean_violation",
                                                        "gap_bound", "violation_bound"]


def test_loglog_slope():
    Ns = [10, 100, 1000]
    assert loglog_slope(Ns, [3 / math.sqrt(n) for n in Ns]) == pytest.approx(-0.5)
    assert loglog_slope(Ns, [7 / n for n in Ns]) == pytest.approx(-1.0)


def test_mh_sensitivity_shape(tmp_path):
    rows = cmd_mh_sensitivity([1, 5], [0], out=str(tmp_path), N=30)
    assert [r[0] for r in rows] == [1, 5]
    assert len(read_csv(tmp_path / "mh_sensitivity.csv")) == 3


def test_table1_formatting():
    _, f_star = robust_lp_optimum()
    rows = [["adaptive", -1.56, relative_gap(-1.56, f_star), 10, 0]] + \
           [[f"M={m}", -1.6, relative_gap(-1.6, f_star), 10, 0] for m in (10, 20, 50, 100)]
    text = format_table1(rows, f_star)
    assert "-1.559" in text and "Optimal value" in text and "M_k=100" in text


def test_invalid_spec():
    with pytest.raises(ValueError):
        ExperimentSpec(seeds=())
    with pytest.raises(ValueError):
        ExperimentSpec(policy="linear")


class TestCli:
    def test_run(self, tmp_path, capsys):
        code = cli.main(["run", "--sampler", "fixed", "--N", "20", "--seeds", "0,1",
                         "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "trace_seed1.csv").exists()
        assert "seed=1 status=ok" in capsys.readouterr().out

    def test_theory_sample_size(self, tmp_path):
        assert cli.main(["run", "--sampler", "fixed", "--M", "theory", "--N", "10"]) == 0

    @pytest.mark.parametrize("argv", [
        ["run", "--M", "0"], ["run", "--seeds", "a,b"], ["run", "--policy", "linear"],
        ["run", "--N", "0"], ["bogus"], [],
    ])
    def test_bad_arguments_exit_2(self, argv):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 2

    def test_invalid_spec_exit_2(self):
        assert cli.main(["run", "--oracle-every", "-1", "--N", "3"]) == 2

    def test_total_failure_exit_1(self, monkeypatch):
        from sipcsa.engine import RunResult

        def boom(*a, **k):
            raise EmptyBError("empty", RunResult(None, [], 0, None, 1))

        monkeypatch.setattr(harness, "csa_run", boom)
        assert cli.main(["run", "--N", "3"]) == 1

    def test_rates_and_mh(self, capsys):
        assert cli.main(["rates", "--sampler", "grid", "--grid-points", "21",
                         "--N-list", "10,100"]) == 0
        assert "log-log slope" in capsys.readouterr().out
        assert cli.main(["mh-sensitivity", "--iterations", "1", "--N", "20", "--seeds", "0"]) == 0
