import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from qmorra import report
from qmorra.cli import main

PI = math.pi


@pytest.fixture
def runner():
    return CliRunner()


class TestSweepDataset:
    def test_row_shape_and_exact_values(self):
        spec = report.SweepSpec(points=4, rounds=2000, seed=1)
        rows = report.sweep_dataset(spec)
        assert len(rows) == 4 * 2 * 3
        first = rows[0]
        assert set(first) == {"theta", "coins", "outcome", "p_exact", "p_empirical"}
        # theta = 0: deterministic outcome 0
        assert first["p_exact"] == pytest.approx(1.0)
        assert first["p_empirical"] == pytest.approx(1.0)

    def test_deterministic_for_seed(self):
        spec = report.SweepSpec(points=3, rounds=500, seed=9)
        assert report.sweep_dataset(spec) == report.sweep_dataset(spec)

    def test_rejects_bad_spec(self):
        with pytest.raises(ValueError):
            report.SweepSpec(points=1)
        with pytest.raises(ValueError):
            report.SweepSpec(rounds=0)


class TestTable1Dataset:
    def test_reference_rows(self):
        rows = report.table1_dataset()
        assert len(rows) == 24
        lookup = {
            (r["theta_label"], r["coins"], r["guess"]): r for r in rows
        }
        row = lookup[("2pi/3", 0, 0)]
        assert row["p_exact"] == pytest.approx(0.5, abs=1e-12)
        assert row["p_reference"] == 0.50
        row = lookup[("4pi/3", 0, 2)]
        assert row["p_exact"] == pytest.approx(0.5, abs=1e-12)
        assert row["gap"] == pytest.approx(0.01, abs=1e-9)
        row = lookup[("0", 1, 2)]
        assert row["p_exact"] == pytest.approx(0.0, abs=1e-12)
        assert row["p_reference"] == 1.67e-4


class TestStrategiesDataset:
    GRID = np.linspace(0.0, 2 * PI, 9)

    def test_equilibrium_scenario(self):
        rows = report.strategies_dataset([2 * PI / 3, PI / 3], "equilibrium")
        assert rows[0]["p_alice"] == pytest.approx(0.5, abs=1e-9)
        assert rows[1]["purity"] == "pure"
        assert rows[1]["p_alice"] == pytest.approx(4 / 9, abs=1e-9)

    def test_random_play_favors_alice_at_pi(self):
        row = report.strategies_dataset([PI], "random-vs-random")[0]
        assert row["p_alice"] > row["p_bob"]

    def test_alice_best_dominates_random(self):
        random = report.strategies_dataset(self.GRID, "random-vs-random")
        best = report.strategies_dataset(self.GRID, "alice-best")
        for r, b in zip(random, best):
            assert b["p_alice"] >= r["p_alice"] - 1e-12

    def test_rows_partition(self):
        for scenario in report.SCENARIOS:
            for row in report.strategies_dataset(self.GRID[:4], scenario):
                total = row["p_alice"] + row["p_bob"] + row["p_draw"]
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            report.strategies_dataset([1.0], "nope")


class TestWriters:
    ROWS = [{"theta": 1.0 / 3.0, "k": 2}, {"theta": 0.5, "k": 3}]

    def test_csv_12_significant_digits(self, tmp_path):
        out = tmp_path / "d.csv"
        text = report.write_rows(self.ROWS, out, "csv", timestamp=False)
        assert text.splitlines()[0] == "theta,k"
        assert "0.333333333333,2" in text
        assert out.read_text() == text

    def test_csv_timestamp_header(self):
        text = report.write_rows(self.ROWS, None, "csv", timestamp=True)
        assert text.startswith("# generated ")

    def test_json(self, tmp_path):
        out = tmp_path / "d.json"
        report.write_rows(self.ROWS, out, "json")
        assert json.loads(out.read_text()) == self.ROWS

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            report.write_rows(self.ROWS, None, "xml")


class TestCli:
    def test_sweep_stdout_reproducible(self, runner):
        args = ["sweep", "--points", "3", "--rounds", "200", "--seed", "4",
                "--no-header-timestamp"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == 0
        assert a.output == b.output

    def test_sweep_validation_exit_code(self, runner):
        result = runner.invoke(main, ["sweep", "--points", "1"])
        assert result.exit_code == 2

    def test_table1(self, runner):
        result = runner.invoke(main, ["table1", "--format", "json"])
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert len(rows) == 24

    def test_strategies_csv_columns(self, runner):
        result = runner.invoke(main, [
            "strategies", "--points", "3", "--scenario", "equilibrium",
            "--no-header-timestamp",
        ])
        assert result.exit_code == 0
        header = result.output.splitlines()[0]
        assert header == "theta,p_alice,p_bob,p_draw,purity"

    def test_synth_writes_figure(self, runner, tmp_path):
        out = tmp_path / "synth.csv"
        result = runner.invoke(main, [
            "synth", "--points", "3", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert out.exists()
        assert out.with_suffix(".png").exists()

    def test_synth_no_plot(self, runner, tmp_path):
        out = tmp_path / "synth.csv"
        result = runner.invoke(main, [
            "synth", "--points", "3", "--out", str(out), "--no-plot",
        ])
        assert result.exit_code == 0
        assert not out.with_suffix(".png").exists()

    def test_fit_tolerance_failure_exit_code(self, runner):
        result = runner.invoke(main, [
            "fit", "--points", "3", "--restarts", "1", "--tolerance", "1e-30",
            "--format", "json",
        ])
        assert result.exit_code == 3

    def test_fit_small_grid(self, runner):
        result = runner.invoke(main, [
            "fit", "--points", "3", "--format", "json",
        ])
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert len(rows) == 6
        assert all(r["cost"] < 1e-6 for r in rows)
