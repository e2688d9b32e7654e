"""Figures for the harness reports, always written to files (Agg backend)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.6),
    "figure.dpi": 120,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def carryover_figure(results, path, title: str = "Rating carryover") -> Path:
    """Bar chart of mean branches_i / branches_1 per run index, one dot per instance."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        k = max((len(r.ratios) for r in results), default=0)
        means = []
        for i in range(k):
            vals = [r.ratios[i] for r in results if i < len(r.ratios) and not math.isnan(r.ratios[i])]
            means.append(sum(vals) / len(vals) if vals else float("nan"))
            ax.scatter([i + 1] * len(vals), vals, s=8, color="k", alpha=0.5, zorder=3)
        ax.bar(range(1, k + 1), means, color="tab:blue", alpha=0.7)
        ax.axhline(1.0, color="grey", lw=0.8, ls="--")
        ax.set_xlabel("run")
        ax.set_ylabel("branches relative to run 1")
        ax.set_xticks(range(1, k + 1))
        ax.set_title(title)
        return _save(fig, path)


def sweep_figure(sweep, path, title: str = "Parameter sweep") -> Path:
    """Aggregate branches per grid cell; the best cell is highlighted."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        labels = [",".join(f"{k}={v}" for k, v in c.params.items()) or "baseline"
                  for c in sweep.cells]
        vals = [c.branches if sweep.objective == "branches" else c.elapsed for c in sweep.cells]
        best = sweep.cells.index(sweep.best)
        colors = ["tab:orange" if i == best else "tab:blue" for i in range(len(vals))]
        ax.bar(range(len(vals)), vals, color=colors)
        ax.set_xticks(range(len(vals)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("total branches" if sweep.objective == "branches" else "total time [s]")
        ax.set_title(title)
        return _save(fig, path)


def compare_figure(report: dict, path, title: str = "Paired differences") -> Path:
    """Per-instance mean difference A - B, sorted."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        items = sorted(report["per_instance"].items(), key=lambda kv: kv[1])
        vals = [v for _, v in items]
        ax.bar(range(len(vals)), vals,
               color=["tab:green" if v < 0 else "tab:red" for v in vals])
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xticks(range(len(vals)))
        ax.set_xticklabels([k for k, _ in items], rotation=60, ha="right", fontsize=6)
        ax.set_ylabel(f"mean {report['metric']} difference (A - B)")
        ax.set_title(f"{title}: Wilcoxon p={report['wilcoxon_p']:.3g}, t p={report['t_p']:.3g}")
        return _save(fig, path)
