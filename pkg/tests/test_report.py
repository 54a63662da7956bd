import numpy as np
import pandas as pd
import pytest

from src.errors import ConfigError, ReportError
from src.runners.report import MetricsReport, ReportEntry, emit_report


def make_entry(density="beta_3_5", n_subjects=50, ise=(0.10, 0.20), with_curve=False):
    stats = {
        estimator: {
            metric: {"mean": value * scale, "std": 0.01, "stderr": 0.001, "min": 0.0, "max": 1.0, "count": 4}
            for metric, scale in (("ISE", 1.0), ("MSE", 2.0), ("MAE", 3.0), ("SUP", 4.0))
        }
        for estimator, value in zip(("bernstein", "kde"), ise)
    }
    x = np.linspace(0.0, 1.0, 11)
    curve = {"x": x, "truth": 2.0 - 2.0 * x, "bernstein": 2.0 - 1.9 * x, "kde": 1.0 + 0.0 * x} if with_curve else None
    return ReportEntry(
        density=density,
        n_subjects=n_subjects,
        replicates=4,
        failures=0,
        stats=stats,
        boundary_points=(0.0, 0.01, 0.99, 1.0),
        boundary_truth=[2.0, 1.98, 0.02, 0.0],
        boundary_means={"bernstein": [1.9, 1.88, 0.05, 0.03], "kde": [1.0, 1.05, 0.1, 0.01]},
        boundary_abs_errors={"bernstein": [0.1, 0.1, 0.03, 0.03], "kde": [1.0, 0.93, 0.08, 0.01]},
        selected_m=[5, 6, 5, 5],
        selected_h=[0.1] * 4,
        curve=curve,
    )


@pytest.fixture
def report():
    return MetricsReport(entries=[make_entry(n_subjects=50), make_entry(n_subjects=200, ise=(0.05, 0.08))])


class TestFrames:
    def test_metrics_frame(self, report):
        frame = report.metrics_frame()
        assert list(frame.columns) == ["density", "n_subjects", "estimator", "metric", "mean", "stderr", "replicates"]
        assert len(frame) == 2 * 2 * 4
        row = frame[(frame.n_subjects == 200) & (frame.estimator == "kde") & (frame.metric == "MSE")]
        assert row["mean"].item() == pytest.approx(0.16)

    def test_boundary_frame(self, report):
        frame = report.boundary_frame()
        assert len(frame) == 8
        assert frame.loc[0, "f_true"] == 2.0
        assert frame.loc[0, "f_kde"] == 1.0

    def test_entry_lookup_and_merge(self, report):
        merged = report.merge(MetricsReport(entries=[make_entry("beta_mix")]))
        assert len(merged.entries) == 3
        assert merged.entry("beta_mix", 50).density == "beta_mix"
        with pytest.raises(KeyError):
            merged.entry("beta_mix", 500)


class TestEmit:
    def test_csv(self, report, tmp_path):
        paths = emit_report(report, "csv", tmp_path)
        assert [p.name for p in paths] == ["metrics.csv", "boundary.csv"]
        frame = pd.read_csv(tmp_path / "metrics.csv")
        assert set(frame.estimator) == {"bernstein", "kde"}

    def test_csv_is_reproducible(self, report, tmp_path):
        emit_report(report, "csv", tmp_path / "a")
        emit_report(report, "csv", tmp_path / "b")
        for name in ("metrics.csv", "boundary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_markdown(self, report, tmp_path):
        emit_report(report, "markdown", tmp_path)
        table1 = (tmp_path / "table1.md").read_text()
        rows = [line for line in table1.splitlines() if line.startswith("| beta_3_5")]
        assert len(rows) == 2
        assert "0.100000 (0.001000)" in rows[0]
        table2 = (tmp_path / "table2.md").read_text()
        assert "x=0.01" in table2
        assert sum(line.startswith("| beta_3_5") for line in table2.splitlines()) == 6

    def test_svg_plots(self, tmp_path):
        report = MetricsReport(entries=[
            make_entry(n_subjects=50, with_curve=True),
            make_entry(n_subjects=200, ise=(0.05, 0.08)),
        ])
        paths = emit_report(report, "svg_plots", tmp_path)
        assert {p.name for p in paths} == {"density_beta_3_5_n50.svg", "mise_rate_beta_3_5.svg"}
        assert all(p.read_text().lstrip().startswith("<?xml") for p in paths)

    def test_empty_report_writes_nothing(self, tmp_path):
        out = tmp_path / "out"
        with pytest.raises(ReportError):
            emit_report(MetricsReport(), "csv", out)
        assert not out.exists()

    def test_unknown_format(self, report, tmp_path):
        with pytest.raises(ConfigError):
            emit_report(report, "latex", tmp_path)
