"""Figures written next to the JSON/CSV reports.

Uses ``matplotlib.figure.Figure`` directly so no global pyplot state or
interactive backend is touched.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from matplotlib.figure import Figure

from resprof.degradation import build_difference_matrix, pca_first_component
from resprof.indexing import ResilienceReport
from resprof.model import MetricClass, PairedWindow

CLASS_COLORS = {
    MetricClass.USER_AWARE: "#c0392b",
    MetricClass.SYSTEM_PERFORMANCE: "#2c7fb8",
}
# fixed metadata keeps PNG output byte-stable between runs
_PNG_META = {"Software": None}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=_PNG_META if path.suffix == ".png" else None)
    return path


def plot_ranking(report: ResilienceReport, path) -> Path:
    """Horizontal bars of per-rank contributions, coloured by metric class."""
    entries = report.ranked.entries
    n = len(entries)
    fig = Figure(figsize=(7, max(2.5, 0.32 * n + 1.2)))
    ax = fig.add_subplot()
    ranks = np.arange(1, n + 1)
    colors = [CLASS_COLORS[report.catalog.class_of(e.metric)] for e in entries]
    discounted = [e.contribution / np.log2(k + 1) for k, e in zip(ranks, entries)]
    ax.barh(ranks, [e.contribution for e in entries], color=colors, alpha=0.35, label="contribution")
    ax.barh(ranks, discounted, color=colors, label="rank-discounted")
    ax.set_yticks(ranks, [f"{k}. {e.metric}" for k, e in zip(ranks, entries)], fontsize=8)
    ax.invert_yaxis()
    ax.set_xlim(0, 1.05)
    ax.set_xlabel("contribution")
    ax.set_title(f"{report.failure_name}: r = {report.index:.3f} ({report.verdict.value} at tau = {report.threshold:g})",
                 fontsize=10)
    handles = [
        ax.barh([0], [0], color=CLASS_COLORS[MetricClass.USER_AWARE])[0],
        ax.barh([0], [0], color=CLASS_COLORS[MetricClass.SYSTEM_PERFORMANCE])[0],
    ]
    ax.legend(handles, ["user-aware", "system performance"], loc="lower right", fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_degradation(window: PairedWindow, path, title: str = "") -> Path:
    """Normalised difference rows of every metric with the principal signal on top."""
    matrix = build_difference_matrix(window, window.catalog.names)
    pc1 = pca_first_component(matrix)
    t = np.arange(window.T) * window.step_seconds
    fig = Figure(figsize=(8, 4.5))
    ax_rows, ax_pc = fig.subplots(2, 1, sharex=True)
    for metric, row in zip(matrix.metric_ids, matrix.rows):
        ax_rows.plot(t, row, lw=0.8, color=CLASS_COLORS[window.catalog.class_of(metric)], alpha=0.7)
    ax_rows.set_ylabel("centred |faulty - normal|", fontsize=8)
    ax_pc.plot(t, pc1.values, color="black", lw=1.0)
    ax_pc.set_ylabel("principal signal", fontsize=8)
    ax_pc.set_xlabel("seconds into window")
    ax_pc.text(0.01, 0.9, f"explained variance {pc1.explained_variance_ratio:.2f}",
               transform=ax_pc.transAxes, fontsize=8)
    if title:
        ax_rows.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_window(window: PairedWindow, path, title: str = "") -> Path:
    """Faulty vs normal trace per metric, one small panel each."""
    names = window.catalog.names
    cols = 3
    rows = -(-len(names) // cols)
    fig = Figure(figsize=(3.2 * cols, 1.6 * rows + 0.6))
    axes = np.atleast_1d(fig.subplots(rows, cols, squeeze=False)).ravel()
    t = np.arange(window.T) * window.step_seconds
    for ax, metric in zip(axes, names):
        ax.plot(t, window.normal[metric], color="0.6", lw=0.7)
        ax.plot(t, window.faulty[metric], color=CLASS_COLORS[window.catalog.class_of(metric)], lw=0.8)
        ax.set_title(metric, fontsize=8)
        ax.tick_params(labelsize=6)
    for ax in axes[len(names):]:
        ax.set_visible(False)
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_evaluation(reports: Sequence[Mapping], labels: Mapping[str, int], tau: float, path) -> Path:
    """Resilience index per failure against its label and the threshold."""
    rows = [r for r in reports if r["failure"] in labels]
    fig = Figure(figsize=(max(5, 0.4 * len(rows) + 2), 3.5))
    ax = fig.add_subplot()
    x = np.arange(len(rows))
    idx = [float(r["index"]) for r in rows]
    colors = ["#2ca25f" if labels[r["failure"]] == 1 else "#de2d26" for r in rows]
    ax.scatter(x, idx, c=colors, zorder=3)
    ax.axhline(tau, color="black", ls="--", lw=0.8)
    ax.set_xticks(x, [r["failure"] for r in rows], rotation=60, ha="right", fontsize=7)
    ax.set_ylim(0, 1)
    ax.set_ylabel("resilience index")
    ax.set_title("green: labelled PASS, red: labelled FAIL", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)
