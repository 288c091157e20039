"""Difference matrix, principal degradation signal and dominant-metric selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from resprof.errors import DegenerateInput, EmptySubset, UnknownMetric
from resprof.measures import ContributionMeasure, contribution
from resprof.model import PairedWindow

# contributions closer than this are treated as tied
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DifferenceMatrix:
    metric_ids: tuple[str, ...]
    rows: np.ndarray  # shape (M', T), each row mean-centred

    @property
    def T(self) -> int:
        return self.rows.shape[1]

    def row(self, metric: str) -> np.ndarray:
        return self.rows[self.metric_ids.index(metric)]


@dataclass(frozen=True, eq=False)
class PrincipalSignal:
    values: np.ndarray
    explained_variance_ratio: float


def build_difference_matrix(window: PairedWindow, subset: Sequence[str]) -> DifferenceMatrix:
    subset = tuple(subset)
    if not subset:
        raise EmptySubset()
    for metric in subset:
        if metric not in window.faulty or metric not in window.normal:
            raise UnknownMetric(metric)
    rows = np.empty((len(subset), window.T))
    for i, metric in enumerate(subset):
        delta = np.abs(np.asarray(window.faulty[metric], dtype=float) - np.asarray(window.normal[metric], dtype=float))
        # a constant difference carries no degradation shape; keep it exactly zero
        rows[i] = 0.0 if np.ptp(delta) == 0 else delta - delta.mean()
    rows.setflags(write=False)
    return DifferenceMatrix(subset, rows)


def pca_first_component(matrix: DifferenceMatrix) -> PrincipalSignal:
    """Project the T time points (samples over M' metric features) onto the leading axis.

    The leading axis comes from an SVD of the centred ``T x M'`` sample
    matrix, which is the eigenvector of the ``1/(T-1)`` covariance without
    forming it. The sign is fixed so the summed Pearson correlation of the
    projection with the rows is non-negative.
    """
    rows = np.asarray(matrix.rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise DegenerateInput("difference matrix needs at least one row")
    T = rows.shape[1]
    if T < 2:
        raise DegenerateInput(f"need at least 2 time points, got {T}")

    samples = (rows - rows.mean(axis=1, keepdims=True)).T
    if not np.any(samples):
        return PrincipalSignal(np.zeros(T), 0.0)

    _, sing, vt = np.linalg.svd(samples, full_matrices=False)
    axis = vt[0]
    total = float(np.sum(sing**2))
    ratio = float(sing[0] ** 2 / total) if total > 0 else 0.0

    projection = samples @ axis
    corr_sum = sum(_signed_pearson(projection, r) for r in rows)
    if corr_sum < -TIE_TOLERANCE:
        projection = -projection
    elif abs(corr_sum) <= TIE_TOLERANCE:
        lead = axis[np.flatnonzero(np.abs(axis) > TIE_TOLERANCE)]
        if lead.size and lead[0] < 0:
            projection = -projection
    projection = projection + 0.0  # normalise -0.0
    return PrincipalSignal(projection, min(max(ratio, 0.0), 1.0))


def _signed_pearson(x, y) -> float:
    a = x - x.mean()
    b = y - y.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    return 0.0 if denom == 0 else float(a @ b / denom)


def select_dominant_metric(window: PairedWindow, subset: Sequence[str],
                           measure: ContributionMeasure) -> tuple[float, str]:
    """Return ``(cmax, metric)`` for the metric most similar to the subset's principal signal.

    The subset is processed in sorted order, so the result does not depend on
    how the caller ordered it; ties go to the lexicographically smallest id.
    """
    scores = score_subset(window, subset, measure)
    best = max(scores.values())
    winner = min(m for m, c in scores.items() if c >= best - TIE_TOLERANCE)
    return scores[winner], winner


def score_subset(window: PairedWindow, subset: Sequence[str], measure: ContributionMeasure) -> dict[str, float]:
    ordered = tuple(sorted(set(subset)))
    if not ordered:
        raise EmptySubset()
    matrix = build_difference_matrix(window, ordered)
    pc1 = pca_first_component(matrix)
    return {m: contribution(pc1.values, matrix.rows[i], measure) for i, m in enumerate(ordered)}


__all__ = [
    "DifferenceMatrix",
    "PrincipalSignal",
    "build_difference_matrix",
    "pca_first_component",
    "select_dominant_metric",
    "score_subset",
]
