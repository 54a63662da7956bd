"""Visualization utilities for density experiments.

Figures are built on `matplotlib.figure.Figure` directly (no pyplot state),
so plotting works headless and inside worker processes.
"""

from __future__ import annotations

from math import sqrt
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from src.errors import ReportError

GOLDEN_MEAN = (sqrt(5.0) - 1.0) / 2.0
FIG_WIDTH = 6.0

PAPER_STYLE = {
    "axes.labelsize": 10,
    "legend.fontsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "font.family": "serif",
    "figure.figsize": [FIG_WIDTH, FIG_WIDTH * GOLDEN_MEAN],
    "xtick.major.size": 4,
    "ytick.major.size": 4,
    "lines.linewidth": 1.5,
    # fixed ids make repeated SVG output byte-identical
    "svg.hashsalt": "random-effects-bernstein",
}

COLORS = {"truth": "black", "bernstein": "red", "kde": "green"}


class Plotter:
    """Overlay plots of true and estimated densities, and MISE-rate plots."""

    def __init__(self, style: Optional[dict] = None) -> None:
        self.style = {**PAPER_STYLE, **(style or {})}

    def _figure(self) -> Figure:
        with matplotlib.rc_context(self.style):
            fig = Figure(figsize=self.style["figure.figsize"])
            fig.add_subplot(111)
        return fig

    def plot_density_overlay(
        self,
        x: Sequence[float],
        truth: Sequence[float],
        bernstein: Sequence[float],
        kde: Sequence[float],
        title: str = "",
    ) -> Figure:
        """True density (black), Bernstein estimate (red), kernel estimate (green)."""
        with matplotlib.rc_context(self.style):
            fig = self._figure()
            ax = fig.axes[0]
            ax.plot(x, truth, color=COLORS["truth"], label="true density")
            ax.plot(x, bernstein, color=COLORS["bernstein"], linestyle="--", label="Bernstein")
            ax.plot(x, kde, color=COLORS["kde"], linestyle=":", label="kernel")
            ax.set_xlim(0.0, 1.0)
            ax.set_xlabel("x")
            ax.set_ylabel("density")
            if title:
                ax.set_title(title)
            ax.legend(loc="best", frameon=False)
        return fig

    def plot_mise_rate(
        self,
        n_values: Sequence[int],
        mise_values: Sequence[float],
        slope: Optional[float] = None,
    ) -> Figure:
        """Empirical MISE against n on log-log axes with the n^-4/5 reference."""
        n = np.asarray(n_values, dtype=float)
        mise = np.asarray(mise_values, dtype=float)
        with matplotlib.rc_context(self.style):
            fig = self._figure()
            ax = fig.axes[0]
            label = "empirical MISE" if slope is None else f"empirical MISE (slope {slope:.2f})"
            ax.loglog(n, mise, "o-", color=COLORS["bernstein"], label=label)
            ax.loglog(n, mise[0] * (n / n[0]) ** -0.8, color=COLORS["truth"], linestyle="--", label="n^-4/5")
            ax.set_xlabel("n")
            ax.set_ylabel("MISE")
            ax.legend(loc="best", frameon=False)
        return fig

    def save_figure(self, fig: Figure, path: Union[str, Path], format: str = "svg") -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with matplotlib.rc_context(self.style):
                fig.savefig(path, format=format, metadata={"Date": None})
        except OSError as exc:
            raise ReportError(f"Could not save figure: {exc}", str(path)) from exc
        return path
