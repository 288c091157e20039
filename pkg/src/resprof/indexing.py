"""Rank-discounted class degradation, the resilience index and PASS/FAIL thresholding."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from resprof.errors import InvalidThreshold, RankMismatch
from resprof.lattice import RankedMetricList
from resprof.measures import ContributionMeasure
from resprof.model import MetricCatalog, MetricClass

EXPONENT_CLAMP = 700.0
_BELOW_ONE = math.nextafter(1.0, 0.0)


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


def _discount(rank: int) -> float:
    return 1.0 / math.log2(rank + 1)


def _check_permutation(ranked: RankedMetricList, catalog: MetricCatalog) -> None:
    if len(ranked) != len(catalog) or set(ranked.metrics) != set(catalog.names):
        raise RankMismatch("ranked list is not a permutation of the catalog metrics")


def class_degradation(ranked: RankedMetricList, catalog: MetricCatalog, cls: MetricClass) -> float:
    """DCG-style sum ``c_i / log2(rank_i + 1)`` over the ranked metrics of one class."""
    _check_permutation(ranked, catalog)
    total = 0.0
    for rank, entry in enumerate(ranked.entries, start=1):
        if catalog.class_of(entry.metric) is cls:
            total += entry.contribution * _discount(rank)
    return total


def total_degradation(ranked: RankedMetricList) -> float:
    return sum(e.contribution * _discount(k) for k, e in enumerate(ranked.entries, start=1))


def resilience_index(d_user: float, d_system: float) -> float:
    """``1 / (1 + exp(d_user - d_system))``; higher means the degradation stayed contained."""
    if not (math.isfinite(d_user) and math.isfinite(d_system)):
        raise ValueError("degradation scores must be finite")
    z = min(max(d_user - d_system, -EXPONENT_CLAMP), EXPONENT_CLAMP)
    # 1/(1+e^z) rounds to exactly 1.0 for z < ~-37; keep the interval open
    return min(1.0 / (1.0 + math.exp(z)), _BELOW_ONE)


def classify(index: float, tau: float) -> Verdict:
    """PASS only when the index is strictly above the threshold."""
    check_threshold(tau)
    return Verdict.PASS if index > tau else Verdict.FAIL


def check_threshold(tau: float) -> float:
    if not (isinstance(tau, (int, float)) and 0.0 < tau < 1.0):
        raise InvalidThreshold(tau)
    return float(tau)


def measure_label(measure: ContributionMeasure) -> str:
    return measure.key


@dataclass(frozen=True)
class ResilienceReport:
    failure_name: str
    measure: ContributionMeasure
    threshold: float
    d_system: float
    d_user: float
    index: float
    verdict: Verdict
    ranked: RankedMetricList
    catalog: MetricCatalog
    provenance: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        ranked = [
            {
                "metric": e.metric,
                "class": self.catalog.class_of(e.metric).value,
                "rank": k,
                "contribution": e.contribution,
            }
            for k, e in enumerate(self.ranked.entries, start=1)
        ]
        obj = {
            "failure": self.failure_name,
            "measure": measure_label(self.measure),
            "measure_params": self.measure.params(),
            "tau": self.threshold,
            "d_system": self.d_system,
            "d_user": self.d_user,
            "index": self.index,
            "verdict": self.verdict.value,
            "ranked": ranked,
        }
        if self.provenance:
            obj["provenance"] = self.provenance
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=False) + "\n"


def build_report(ranked: RankedMetricList, catalog: MetricCatalog, measure: ContributionMeasure,
                 tau: float, failure_name: str, provenance: dict | None = None) -> ResilienceReport:
    d_system = class_degradation(ranked, catalog, MetricClass.SYSTEM_PERFORMANCE)
    d_user = class_degradation(ranked, catalog, MetricClass.USER_AWARE)
    r = resilience_index(d_user, d_system)
    return ResilienceReport(
        failure_name=failure_name,
        measure=measure,
        threshold=check_threshold(tau),
        d_system=d_system,
        d_user=d_user,
        index=r,
        verdict=classify(r, tau),
        ranked=ranked,
        catalog=catalog,
        provenance=dict(provenance or {}),
    )
