"""Greedy walk down the metric lattice, from the full metric set to the empty set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from resprof.degradation import select_dominant_metric
from resprof.errors import NotAPermutation, ValidationError
from resprof.measures import ContributionMeasure
from resprof.model import PairedWindow, require_valid_window


@dataclass(frozen=True)
class RankedEntry:
    metric: str
    contribution: float


@dataclass(frozen=True)
class RankedMetricList:
    entries: tuple[RankedEntry, ...]

    def __post_init__(self):
        entries = tuple(e if isinstance(e, RankedEntry) else RankedEntry(*e) for e in self.entries)
        names = [e.metric for e in entries]
        if len(set(names)) != len(names):
            raise ValidationError("ranked list contains duplicate metrics")
        for e in entries:
            if not (math.isfinite(e.contribution) and e.contribution >= 0):
                raise ValidationError(f"contribution of {e.metric!r} must be finite and non-negative")
        object.__setattr__(self, "entries", entries)

    @property
    def metrics(self) -> tuple[str, ...]:
        return tuple(e.metric for e in self.entries)

    def rank(self, metric: str) -> int:
        """1-based position of ``metric``."""
        return self.metrics.index(metric) + 1

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def rank_by_elimination(window: PairedWindow, measure: ContributionMeasure) -> RankedMetricList:
    """Repeatedly pick and remove the dominant metric of the remaining set.

    PCA and contributions are recomputed on the shrinking set at every
    step, so entry ``k`` carries the contribution measured at iteration ``k``.
    """
    require_valid_window(window)
    remaining = set(window.catalog.names)
    if not remaining:
        raise ValidationError("window has no metrics")
    ranked = []
    while remaining:
        cmax, winner = select_dominant_metric(window, remaining, measure)
        ranked.append(RankedEntry(winner, cmax))
        remaining.discard(winner)
    return RankedMetricList(tuple(ranked))


def enumerate_lattice_path(ranked: RankedMetricList | Sequence[str], full_set: Iterable[str]) -> list[frozenset]:
    """Chain of lattice nodes visited by the search: full set, then one metric fewer each step, down to empty."""
    order = ranked.metrics if isinstance(ranked, RankedMetricList) else tuple(ranked)
    full = frozenset(full_set)
    if len(order) != len(full) or set(order) != full:
        raise NotAPermutation(f"ranked metrics {list(order)} are not a permutation of {sorted(full)}")
    node = full
    chain = [node]
    for metric in order:
        node = node - {metric}
        chain.append(node)
    return chain
