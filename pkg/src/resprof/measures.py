"""Contribution measures: similarity between a metric's difference series and the principal signal.

Every distance ``d`` is mapped to a bounded score ``1 / (1 + d)``, so all
measures return values in ``[0, 1]`` with ``1`` meaning identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from resprof.errors import LengthMismatchError, ValidationError

INF = math.inf


def dtw_distance(x, y, window: int | None = None) -> float:
    """Accumulated DTW cost with squared pointwise cost and a Sakoe-Chiba band.

    ``window`` bounds ``|i - j|``; ``None`` means unconstrained. Returns ``inf``
    when the band admits no warping path.
    """
    a = [float(v) for v in x]
    b = [float(v) for v in y]
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValidationError("DTW needs non-empty series")
    w = max(n, m) if window is None else int(window)
    if w < 0:
        raise ValidationError("warping window must be non-negative")
    if abs(n - m) > w:
        return INF

    prev = [INF] * (m + 1)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur = [INF] * (m + 1)
        ai = a[i - 1]
        lo = max(1, i - w)
        hi = min(m, i + w)
        left = INF
        for j in range(lo, hi + 1):
            diag = prev[j - 1]
            up = prev[j]
            best = diag if diag < up else up
            if left < best:
                best = left
            d = ai - b[j - 1]
            left = d * d + best
            cur[j] = left
        prev = cur
    return prev[m]


def pearson_abs(x, y) -> float:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    a = a - a.mean()
    b = b - b.mean()
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    rho = abs(float(a @ b)) / (na * nb)
    return min(rho, 1.0)


def euclidean(x, y) -> float:
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return math.sqrt(float(d @ d))


def complexity_estimate(x) -> float:
    d = np.diff(np.asarray(x, dtype=float))
    return math.sqrt(float(d @ d))


def complexity_invariant_distance(x, y) -> float:
    """Euclidean distance scaled by the ratio of the two series' complexity estimates."""
    ce_x = complexity_estimate(x)
    ce_y = complexity_estimate(y)
    lo, hi = min(ce_x, ce_y), max(ce_x, ce_y)
    if hi == 0.0:
        factor = 1.0
    elif lo == 0.0:
        factor = INF
    else:
        factor = hi / lo
    ed = euclidean(x, y)
    if ed == 0.0:
        return 0.0
    return ed * factor


def similarity(distance: float) -> float:
    if distance == INF:
        return 0.0
    return 1.0 / (1.0 + distance)


# -- measure variants --------------------------------------------------------

@dataclass(frozen=True)
class DtwSimilarity:
    warping_window_steps: int = 5
    key = "dtw"

    def __post_init__(self):
        if not isinstance(self.warping_window_steps, (int, np.integer)) or self.warping_window_steps < 0:
            raise ValidationError("warping_window_steps must be a non-negative integer")

    def score(self, pc1, row) -> float:
        return similarity(dtw_distance(pc1, row, self.warping_window_steps))

    def params(self) -> dict:
        return {"warping_window_steps": int(self.warping_window_steps)}


@dataclass(frozen=True)
class PearsonAbs:
    key = "pearson"

    def score(self, pc1, row) -> float:
        return pearson_abs(pc1, row)

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class EuclideanSimilarity:
    key = "euclid"

    def score(self, pc1, row) -> float:
        return similarity(euclidean(pc1, row))

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class CidSimilarity:
    key = "cid"

    def score(self, pc1, row) -> float:
        return similarity(complexity_invariant_distance(pc1, row))

    def params(self) -> dict:
        return {}


ContributionMeasure = Union[DtwSimilarity, PearsonAbs, EuclideanSimilarity, CidSimilarity]

MEASURE_KEYS = ("dtw", "pearson", "euclid", "cid")


def measure_from_name(name: str, warping_window_steps: int = 5) -> ContributionMeasure:
    key = name.strip().lower()
    if key == "dtw":
        return DtwSimilarity(warping_window_steps)
    if key in ("pearson", "corr"):
        return PearsonAbs()
    if key in ("euclid", "euclidean", "euc"):
        return EuclideanSimilarity()
    if key == "cid":
        return CidSimilarity()
    raise ValidationError(f"unknown contribution measure {name!r}; choose one of {', '.join(MEASURE_KEYS)}")


def contribution(pc1, row, measure: ContributionMeasure) -> float:
    """Score how closely ``row`` follows the principal signal ``pc1``."""
    p = pc1.values if hasattr(pc1, "values") and not isinstance(pc1, np.ndarray) else pc1
    p = np.asarray(p, dtype=float)
    r = np.asarray(row, dtype=float)
    if p.shape != r.shape:
        raise LengthMismatchError(r.size, p.size)
    return float(measure.score(p, r))
