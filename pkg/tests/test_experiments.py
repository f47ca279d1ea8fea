"""Result tables, CSV output, presets and the command-line interface."""

import subprocess
import sys

import numpy as np
import pytest

from crsense import experiments
from crsense.cli import main
from crsense.experiments import ResultTable, build_preset_table, write_csv


class TestResultTable:
    TABLE = ResultTable(
        rows=[(0.2, "b", 1.0, 0.1), (0.1, "a", 2.0, 0.2), (0.1, "b", 3.0, 0.3)]
    )

    def test_sorted_by_x_then_series(self):
        rows = self.TABLE.sorted().rows
        assert [r[:2] for r in rows] == [(0.1, "a"), (0.1, "b"), (0.2, "b")]

    def test_series_extraction(self):
        assert self.TABLE.series("b") == [(0.1, 3.0, 0.3), (0.2, 1.0, 0.1)]

    def test_value_lookup(self):
        assert self.TABLE.value(0.1, "a") == (2.0, 0.2)
        with pytest.raises(KeyError):
            self.TABLE.value(0.3, "a")


class TestWriteCsv:
    def test_schema_and_byte_stability(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(self.table(), p1)
        write_csv(self.table(), p2)
        text = p1.read_text()
        assert text.splitlines()[0] == "x,series,mean,ci95"
        assert p1.read_bytes() == p2.read_bytes()
        assert not list(tmp_path.glob("*.tmp"))

    def test_round_trips_values(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(self.table(), path)
        lines = path.read_text().splitlines()[1:]
        got = [line.split(",") for line in lines]
        assert got[0][1] == "alpha"
        assert float(got[0][2]) == pytest.approx(1.234567891, rel=1e-8)

    @staticmethod
    def table():
        return ResultTable(rows=[(0.1, "alpha", 1.234567891, 0.01), (0.2, "alpha", 2.0, 0.02)])


class TestPresets:
    def test_unknown_figure(self):
        with pytest.raises(ValueError):
            build_preset_table("fig9")

    def test_roc_preset_pure_numerics(self):
        table = build_preset_table("fig2")
        for mode in ("fixed", "adaptive"):
            pts = table.series(mode)
            assert [x for x, _, _ in pts] == sorted(experiments.FIG2_TARGETS)
            # higher tolerated miss rate -> lower false alarm rate
            means = [m for _, m, _ in pts]
            assert all(a > b for a, b in zip(means, means[1:]))
        # adaptation wins in the low-miss-rate operating region
        for x, _, _ in table.series("adaptive"):
            if x > 0.2:
                continue
            fa_a, _ = table.value(x, "adaptive")
            fa_f, _ = table.value(x, "fixed")
            assert fa_a < fa_f

    def test_throughput_preset_small(self, monkeypatch):
        monkeypatch.setattr(experiments, "FIG3_TARGETS", (0.1, 1.0))
        table = build_preset_table("fig3", reps=2, seed=11)
        names = {s for _, s, _, _ in table.rows}
        for name, _, _ in experiments.FIG3_POLICIES:
            assert name in names and f"{name}:pu" in names
        # perfect-sensing series replicated across the grid
        a = table.value(0.1, "myopic-perfect")
        b = table.value(1.0, "myopic-perfect")
        assert a == b

    def test_scenario_table(self):
        from crsense.config import ScenarioConfig

        cfg = ScenarioConfig(m=3, n=5, t=5, replications=3, seed=2).validate()
        table = experiments.run_scenario_table(cfg)
        assert {s for _, s, _, _ in table.rows} == {
            "su_throughput",
            "pu_throughput",
            "collision_rate",
        }


class TestCli:
    def test_validate_ok(self, tmp_path, capsys):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text("m = 3\n")
        assert main(["validate", "--config", str(cfg)]) == 0
        assert "OK" in capsys.readouterr().out

    def test_validate_bad_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("pmd_target = 2.0\n")
        assert main(["validate", "--config", str(cfg)]) == 1
        assert "error" in capsys.readouterr().err

    def test_run_writes_csv_and_png(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("m = 3\nn = 5\nt = 5\nreplications = 3\n")
        out = tmp_path / "out.csv"
        assert main(["run", "--config", str(cfg), "--seed", "3", "--out", str(out)]) == 0
        assert out.exists()
        assert out.read_text().startswith("x,series,mean,ci95\n")
        assert (tmp_path / "out.png").exists()

    def test_no_plot_skips_png(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("m = 3\nn = 5\nt = 5\nreplications = 3\n")
        out = tmp_path / "out.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--no-plot"]) == 0
        assert not (tmp_path / "out.png").exists()

    def test_seed_changes_output(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("m = 3\nn = 5\nt = 5\nreplications = 3\n")
        o1, o2, o3 = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        for out, seed in ((o1, "3"), (o2, "3"), (o3, "4")):
            main(["run", "--config", str(cfg), "--seed", seed, "--out", str(out), "--no-plot"])
        assert o1.read_bytes() == o2.read_bytes()
        assert o1.read_bytes() != o3.read_bytes()

    def test_preset_fig2(self, tmp_path):
        out = tmp_path / "roc.csv"
        assert main(["preset", "--figure", "fig2", "--out", str(out)]) == 0
        assert out.exists()
        assert (tmp_path / "roc.png").exists()

    def test_console_entry_point(self, tmp_path):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text("m = 2\n")
        proc = subprocess.run(
            [sys.executable, "-m", "crsense.cli", "validate", "--config", str(cfg)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
