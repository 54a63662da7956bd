"""Aggregated experiment results and their CSV / markdown / SVG renderings."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.errors import ConfigError, ReportError
from src.utils.visualization import Plotter

REPORT_FORMATS = ("csv", "markdown", "svg_plots")
ESTIMATORS = ("bernstein", "kde")
TABLE_METRICS = ("ISE", "MSE", "MAE")
FOOTER = (
    "Values are Monte Carlo means over replicates (standard errors in parentheses). "
    "Published table values depend on unpublished seeds and discretization details and are "
    "not reproduced exactly; agreement is judged by trends and properties."
)


@dataclass
class ReportEntry:
    density: str
    n_subjects: int
    replicates: int
    failures: int
    stats: Dict[str, Dict[str, Dict[str, float]]]
    boundary_points: Sequence[float]
    boundary_truth: List[float]
    boundary_means: Dict[str, List[float]]
    boundary_abs_errors: Dict[str, List[float]]
    selected_m: List[int]
    selected_h: List[float]
    curve: Optional[Dict[str, np.ndarray]] = None

    def mean(self, estimator: str, metric: str) -> float:
        return self.stats[estimator][metric]["mean"]


@dataclass
class MetricsReport:
    entries: List[ReportEntry] = field(default_factory=list)

    def merge(self, other: "MetricsReport") -> "MetricsReport":
        return MetricsReport(entries=[*self.entries, *other.entries])

    @property
    def is_empty(self) -> bool:
        return not self.entries or all(entry.replicates == 0 for entry in self.entries)

    def entry(self, density: str, n_subjects: int) -> ReportEntry:
        for item in self.entries:
            if item.density == density and item.n_subjects == n_subjects:
                return item
        raise KeyError(f"No entry for density={density}, n_subjects={n_subjects}")

    def metrics_frame(self) -> pd.DataFrame:
        rows = []
        for entry in self.entries:
            for estimator in ESTIMATORS:
                for metric, stats in entry.stats.get(estimator, {}).items():
                    rows.append({
                        "density": entry.density,
                        "n_subjects": entry.n_subjects,
                        "estimator": estimator,
                        "metric": metric,
                        "mean": stats["mean"],
                        "stderr": stats["stderr"],
                        "replicates": entry.replicates,
                    })
        return pd.DataFrame(rows, columns=["density", "n_subjects", "estimator", "metric", "mean", "stderr", "replicates"])

    def boundary_frame(self) -> pd.DataFrame:
        rows = []
        for entry in self.entries:
            for i, x in enumerate(entry.boundary_points):
                rows.append({
                    "density": entry.density,
                    "n_subjects": entry.n_subjects,
                    "x": float(x),
                    "f_true": entry.boundary_truth[i],
                    "f_bernstein": entry.boundary_means["bernstein"][i],
                    "f_kde": entry.boundary_means["kde"][i],
                })
        return pd.DataFrame(rows, columns=["density", "n_subjects", "x", "f_true", "f_bernstein", "f_kde"])


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _table1_markdown(report: MetricsReport) -> str:
    header = ["density", "n"] + [f"{est} {metric}" for est in ESTIMATORS for metric in TABLE_METRICS]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for entry in report.entries:
        cells = [entry.density, str(entry.n_subjects)]
        for est in ESTIMATORS:
            for metric in TABLE_METRICS:
                stats = entry.stats[est][metric]
                cells.append(f"{_fmt(stats['mean'])} ({_fmt(stats['stderr'])})")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n\n" + FOOTER + "\n"


def _table2_markdown(report: MetricsReport) -> str:
    lines = []
    for entry in report.entries:
        points = [f"x={x:g}" for x in entry.boundary_points]
        if not lines:
            header = ["density", "n", "estimate"] + points
            lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        for label, values in (
            ("true", entry.boundary_truth),
            ("Bernstein", entry.boundary_means["bernstein"]),
            ("kernel", entry.boundary_means["kde"]),
        ):
            lines.append("| " + " | ".join([entry.density, str(entry.n_subjects), label] + [_fmt(v) for v in values]) + " |")
    return "\n".join(lines) + "\n\n" + FOOTER + "\n"


def _mise_by_density(report: MetricsReport) -> Dict[str, tuple]:
    """Bernstein mean ISE against n, for densities run at two or more sizes."""
    grouped: Dict[str, Dict[int, float]] = {}
    for entry in report.entries:
        grouped.setdefault(entry.density, {})[entry.n_subjects] = entry.mean("bernstein", "ISE")
    out = {}
    for density, by_n in grouped.items():
        if len(by_n) >= 2:
            sizes = sorted(by_n)
            out[density] = (np.array(sizes, dtype=float), np.array([by_n[n] for n in sizes]))
    return out


def emit_report(report: MetricsReport, format: str, out_dir: Union[str, Path]) -> List[Path]:
    """Write `report` in one format under `out_dir`; returns the written paths."""
    if format not in REPORT_FORMATS:
        raise ConfigError(f"Unknown report format '{format}', expected one of {REPORT_FORMATS}")
    if report.is_empty:
        raise ReportError("Report has no completed replicates; nothing written", str(out_dir))

    out_dir = Path(out_dir)
    written: List[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            for name, frame in (("metrics.csv", report.metrics_frame()), ("boundary.csv", report.boundary_frame())):
                path = out_dir / name
                frame.to_csv(path, index=False)
                written.append(path)
        elif format == "markdown":
            for name, text in (("table1.md", _table1_markdown(report)), ("table2.md", _table2_markdown(report))):
                path = out_dir / name
                path.write_text(text)
                written.append(path)
        else:
            plotter = Plotter()
            for entry in report.entries:
                if entry.curve is None:
                    continue
                fig = plotter.plot_density_overlay(
                    entry.curve["x"], entry.curve["truth"], entry.curve["bernstein"], entry.curve["kde"],
                    title=f"{entry.density}, n = {entry.n_subjects}",
                )
                written.append(plotter.save_figure(fig, out_dir / f"density_{entry.density}_n{entry.n_subjects}.svg"))
            for density, (sizes, mise) in _mise_by_density(report).items():
                slope = float(np.polyfit(np.log(sizes), np.log(mise), 1)[0])
                fig = plotter.plot_mise_rate(sizes, mise, slope)
                written.append(plotter.save_figure(fig, out_dir / f"mise_rate_{density}.svg"))
    except OSError as exc:
        raise ReportError(f"Could not write report: {exc}", str(out_dir)) from exc
    return written
