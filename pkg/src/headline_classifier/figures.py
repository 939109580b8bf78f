"""Report figures rendered to files (headless Agg backend).

Two figures accompany each evaluation report: a per-model confusion
matrix grid and an accuracy comparison bar chart.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import EvalReport


def confusion_matrices_figure(report: EvalReport):
    n = len(report.rows)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.4), squeeze=False)
    for ax, row in zip(axes[0], report.rows):
        cm = row.matrix
        grid = [[cm.tn, cm.fp], [cm.fn, cm.tp]]
        ax.imshow(grid, cmap="Blues")
        for i in range(2):
            for j in range(2):
                ax.text(j, i, str(grid[i][j]), ha="center", va="center", fontsize=11)
        ax.set_xticks([0, 1], ["real", "fake"])
        ax.set_yticks([0, 1], ["real", "fake"])
        ax.set_xlabel("predicted")
        ax.set_ylabel("actual")
        ax.set_title(f"{row.name} (acc {row.accuracy:.4f})", fontsize=10)
    fig.tight_layout()
    return fig


def accuracy_figure(report: EvalReport):
    names = [r.name for r in report.rows]
    accs = [r.accuracy for r in report.rows]
    fig, ax = plt.subplots(figsize=(1.6 * max(4, len(names)), 3.4))
    bars = ax.bar(names, accs, color="#4878a8")
    ax.bar_label(bars, fmt="%.4f", fontsize=9)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(f"model comparison on {report.test_size} test headlines", fontsize=10)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    return fig


def render_report_figures(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write both report figures as PNGs; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, builder in (
        ("confusion_matrices.png", confusion_matrices_figure),
        ("accuracy_comparison.png", accuracy_figure),
    ):
        fig = builder(report)
        path = out_dir / name
        fig.savefig(path, dpi=130)
        plt.close(fig)
        paths.append(path)
    return paths
