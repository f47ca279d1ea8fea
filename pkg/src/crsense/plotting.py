"""Figure rendering for result tables (one line per series, CI error bars)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ResultTable

__all__ = ["render_table"]

_LABELS = {
    "fig2": ("miss-detection target", "average false-alarm probability", "ROC: fixed vs adaptive threshold"),
    "fig3": ("miss-detection target", "throughput (bits/slot)", "Throughput vs miss-rate target"),
    "fig4": ("fusion branches L", "SU throughput (bits/slot/SU)", "Cooperative fusion vs adaptive threshold"),
    "fig5": ("shadowing correlation rho", "SU throughput (bits/slot/SU)", "Correlated lognormal shadowing"),
    "fig6": ("CSI estimation NMSE", "SU throughput (bits/slot/SU)", "Robustness to CSI mismatch"),
}

_LOG_X = {"fig3", "fig6"}


def render_table(table: ResultTable, png_path, figure: str | None = None) -> None:
    """Render one PNG next to the CSV: mean curves with 95% CI bars."""
    xlabel, ylabel, title = _LABELS.get(figure, ("x", "value", figure or "results"))
    names = sorted({s for (_, s, _, _) in table.rows})
    fig, ax = plt.subplots(figsize=(7, 5))
    for name in names:
        pts = table.series(name)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        cis = [p[2] for p in pts]
        if any(ci > 0 for ci in cis):
            ax.errorbar(xs, ys, yerr=cis, marker="o", capsize=3, label=name)
        else:
            ax.plot(xs, ys, marker="o", label=name)
    if figure in _LOG_X:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
