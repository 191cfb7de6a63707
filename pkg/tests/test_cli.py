"""End-to-end tests of the command-line interface, run in-process."""

import csv
import json

import pytest

from tolerant_pd import (
    LinearStrength,
    classify_regime,
    critical_thresholds,
    internal_fixed_points_linear,
)
from tolerant_pd.cli import OutputRecord, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if not (row and row[0].startswith("#"))]
    return rows[0], rows[1:]


class TestThresholds:
    def test_reduced_parameter(self, capsys):
        record = run_json(capsys, "thresholds", "--r", "0.2")
        assert record["results"]["k1"] == pytest.approx(1.0 / 1.2, abs=1e-12)
        assert record["results"]["k2"] == pytest.approx(1.5, abs=1e-12)

    def test_donation_window(self, capsys):
        record = run_json(capsys, "thresholds", "--b", "5", "--c", "1")
        lo, hi = record["results"]["coexistence_window"]
        assert lo == pytest.approx(5.0 / 6.0, abs=1e-12)
        assert hi == pytest.approx(1.5, abs=1e-12)
        assert record["results"]["r"] == pytest.approx(0.2, abs=1e-15)

    def test_human_output_mentions_both(self, capsys):
        code, out, err = run_cli(capsys, "thresholds", "--r", "0.2")
        assert code == 0
        assert "k1" in out and "k2" in out and "1.5" in out

    def test_out_of_range_r_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "thresholds", "--r", "1.5")
        assert code == 2
        assert out == ""
        assert "error" in err

    def test_missing_parameters_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "thresholds")
        assert code == 2

    def test_conflicting_parameters_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "thresholds", "--r", "0.2", "--b", "5", "--c", "1")
        assert code == 2

    def test_invalid_donation_pair(self, capsys):
        code, _, _ = run_cli(capsys, "thresholds", "--b", "1", "--c", "1")
        assert code == 2


class TestAnalyze:
    def test_coexistence_report(self, capsys):
        record = run_json(capsys, "analyze", "--k", "1", "--r", "0.2")
        assert record["results"]["regime"] == "coexistence"
        points = record["results"]["fixed_points"]
        assert [fp["stability"] for fp in points] == [
            "stable",
            "unstable",
            "stable",
            "unstable",
        ]
        assert points[1]["x"] == pytest.approx(0.211325, abs=1e-6)
        assert points[2]["x"] == pytest.approx(0.788675, abs=1e-6)

    def test_constant_dominance(self, capsys):
        record = run_json(capsys, "analyze", "--p", "0.9", "--r", "0.2")
        assert record["results"]["regime"] == "defector-dominance"

    def test_critical_upper_semi_stable(self, capsys):
        record = run_json(capsys, "analyze", "--k", "1.5", "--r", "0.2")
        assert record["results"]["regime"] == "critical-upper"
        interior = record["results"]["fixed_points"][1]
        assert interior["x"] == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert interior["stability"] == "semi-stable"

    def test_csv_round_trip(self, capsys, tmp_path):
        target = tmp_path / "fps.csv"
        code, _, _ = run_cli(capsys, "analyze", "--k", "1", "--r", "0.2", "--out", str(target))
        assert code == 0
        header, rows = read_csv(target)
        assert header == ["x", "origin", "stability"]
        report = classify_regime(LinearStrength(1.0), 0.2)
        assert [float(row[0]) for row in rows] == [fp.x for fp in report.fixed_points]
        assert [row[2] for row in rows] == [fp.stability.value for fp in report.fixed_points]

    def test_requires_exactly_one_strength(self, capsys):
        assert run_cli(capsys, "analyze", "--r", "0.2")[0] == 2
        assert run_cli(capsys, "analyze", "--k", "1", "--p", "0.5")[0] == 2

    def test_non_finite_strength_is_computation_error(self, capsys):
        code, out, err = run_cli(capsys, "analyze", "--k", "inf", "--r", "0.2")
        assert code == 3
        assert "computation error" in err

    def test_plot_written(self, capsys, tmp_path):
        target = tmp_path / "velocity.png"
        code, _, _ = run_cli(
            capsys, "analyze", "--k", "1", "--r", "0.2", "--plot", str(target)
        )
        assert code == 0
        assert target.stat().st_size > 0


class TestSweep:
    def test_linear_sweep_finds_transitions(self, capsys, tmp_path):
        target = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys,
            "sweep", "--linear", "--r", "0.2",
            "--from", "0.1", "--to", "2.0", "--points", "100",
            "--out", str(target),
        )
        assert code == 0
        header, rows = read_csv(target)
        assert header[:2] == ["param", "regime"]
        assert len(rows) == 100
        th = critical_thresholds(0.2)
        cell = (2.0 - 0.1) / 99
        regimes = [row[1] for row in rows]
        params = [float(row[0]) for row in rows]
        first_coexist = regimes.index("coexistence")
        first_dominance = regimes.index("defector-dominance")
        assert abs(params[first_coexist] - th.k1) <= cell
        assert abs(params[first_dominance] - th.k2) <= cell

    def test_constant_sweep_transition(self, capsys):
        record = run_json(
            capsys,
            "sweep", "--constant", "--r", "0.2",
            "--from", "0", "--to", "1", "--points", "11",
        )
        rows = record["results"]["rows"]
        assert len(rows) == 11
        regimes = [row["regime"] for row in rows]
        assert regimes[:9] == ["bistable"] * 9  # p = 0.0 .. 0.8
        assert regimes[9:] == ["defector-dominance"] * 2  # p = 0.9, 1.0

    def test_empty_grid_is_usage_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "sweep", "--linear", "--r", "0.2", "--from", "0.1", "--to", "2", "--points", "0"
        )
        assert code == 2

    def test_csv_round_trip_full_precision(self, capsys, tmp_path):
        target = tmp_path / "sweep.csv"
        run_cli(
            capsys,
            "sweep", "--linear", "--r", "0.2",
            "--from", "0.3", "--to", "1.9", "--points", "7",
            "--out", str(target),
        )
        header, rows = read_csv(target)
        from tolerant_pd import bifurcation_sweep
        import numpy as np

        expected = bifurcation_sweep(0.2, [float(v) for v in np.linspace(0.3, 1.9, 7)], "linear")
        for row, ref in zip(rows, expected):
            assert float(row[0]) == ref.param
            for i, fp in enumerate(ref.fixed_points):
                assert float(row[2 + 2 * i]) == fp.x
                assert row[3 + 2 * i] == fp.stability.value

    def test_unwritable_path_is_io_error(self, capsys, tmp_path):
        target = tmp_path / "missing_dir" / "sweep.csv"
        code, _, err = run_cli(
            capsys,
            "sweep", "--linear", "--r", "0.2",
            "--from", "0.1", "--to", "2.0", "--points", "5",
            "--out", str(target),
        )
        assert code == 4
        assert "i/o error" in err
        assert not target.exists()

    def test_plot_written(self, capsys, tmp_path):
        target = tmp_path / "bifurcation.png"
        code, _, _ = run_cli(
            capsys,
            "sweep", "--linear", "--r", "0.2",
            "--from", "0.1", "--to", "2.0", "--points", "25",
            "--plot", str(target),
        )
        assert code == 0
        assert target.stat().st_size > 0


class TestSimulate:
    def test_dominance_bins_all_zero(self, capsys):
        record = run_json(capsys, "simulate", "--k", "2", "--r", "0.2", "--seed", "42")
        counts = record["results"]["basin_counts"]
        assert counts == [{"attractor": 0.0, "count": 50}]

    def test_bistable_bins_subset_of_boundaries(self, capsys):
        record = run_json(capsys, "simulate", "--k", "0.5", "--r", "0.2", "--seed", "42")
        locations = {entry["attractor"] for entry in record["results"]["basin_counts"]}
        assert locations <= {0.0, 1.0}
        assert sum(entry["count"] for entry in record["results"]["basin_counts"]) == 50

    def test_semi_stable_members_flagged_slow(self, capsys):
        record = run_json(
            capsys,
            "simulate", "--k", "1.5", "--r", "0.2", "--seed", "42",
            "--max-steps", "100000", "--stride", "10",
        )
        members = record["results"]["members"]
        double = 1.0 / 3.0
        for member in members:
            if member["x0"] > double + 1e-3:
                assert member["attractor"] == pytest.approx(double, abs=1e-9)
                assert member["slow_decay"] is True
            elif member["x0"] < double - 1e-3:
                assert member["attractor"] == 0.0

    def test_csv_outputs_round_trip(self, capsys, tmp_path):
        target = tmp_path / "runs.csv"
        record = run_json(
            capsys,
            "simulate", "--k", "1", "--r", "0.2", "--seed", "11", "--members", "8",
            "--out", str(target),
        )
        header, rows = read_csv(target)
        assert header == ["member", "t", "x"]
        assert {int(row[0]) for row in rows} == set(range(8))

        summary_path = tmp_path / "runs.summary.csv"
        sheader, srows = read_csv(summary_path)
        assert sheader == ["member", "x0", "x_final", "attractor", "slow_decay"]
        assert len(srows) == 8
        for row, member in zip(srows, record["results"]["members"]):
            assert float(row[1]) == member["x0"]
            assert float(row[2]) == member["x_final"]
            if member["attractor"] is not None:
                assert float(row[3]) == member["attractor"]

        with open(target, encoding="utf-8") as fh:
            first = fh.readline()
        assert first.startswith("#") and "seed=11" in first

    def test_lf_line_endings(self, capsys, tmp_path):
        target = tmp_path / "runs.csv"
        run_cli(
            capsys,
            "simulate", "--k", "2", "--r", "0.2", "--seed", "1", "--members", "3",
            "--out", str(target),
        )
        data = target.read_bytes()
        assert b"\r" not in data

    def test_agrees_with_analyze(self, capsys):
        simulate = run_json(capsys, "simulate", "--k", "1", "--r", "0.2", "--seed", "5")
        analyze = run_json(capsys, "analyze", "--k", "1", "--r", "0.2")
        allowed = {
            fp["x"]
            for fp in analyze["results"]["fixed_points"]
            if fp["stability"] in ("stable", "semi-stable")
        }
        binned = {
            entry["attractor"]
            for entry in simulate["results"]["basin_counts"]
            if entry["attractor"] is not None
        }
        assert binned <= allowed

    def test_bad_member_count_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "simulate", "--k", "1", "--members", "0")
        assert code == 2

    def test_plot_written(self, capsys, tmp_path):
        target = tmp_path / "fan.png"
        code, _, _ = run_cli(
            capsys,
            "simulate", "--k", "1", "--r", "0.2", "--members", "6", "--seed", "2",
            "--plot", str(target),
        )
        assert code == 0
        assert target.stat().st_size > 0


class TestOutputRecord:
    def test_json_round_trip_is_lossless(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "--k", "1.2", "--r", "0.2", "--json")
        assert code == 0
        record = OutputRecord.from_json(out)
        assert OutputRecord.from_json(record.to_json()) == record
        # full float precision survives the round trip
        reparsed = json.loads(record.to_json())
        x2 = internal_fixed_points_linear(1.2, 0.2)[1]
        assert reparsed["results"]["fixed_points"][2]["x"] == x2


class TestUsageSurface:
    def test_unknown_command(self, capsys):
        assert run_cli(capsys, "explode")[0] == 2

    def test_no_command(self, capsys):
        assert run_cli(capsys)[0] == 2

    def test_version_flag(self, capsys):
        code, out, _ = run_cli(capsys, "--version")
        assert code == 0
        assert "tolerant-pd" in out

    def test_usage_errors_keep_stdout_clean(self, capsys):
        code, out, err = run_cli(capsys, "sweep", "--linear", "--r", "0.2",
                                 "--from", "-1", "--to", "2", "--points", "5")
        assert code == 2
        assert out == ""
        assert err != ""
