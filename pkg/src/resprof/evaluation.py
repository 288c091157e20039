"""Scoring resilience indices against PASS/FAIL ground truth."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

from resprof.errors import EmptyInput, ValidationError
from resprof.indexing import Verdict, classify

CE_EPSILON = 1e-12


@dataclass(frozen=True)
class LabeledOutcome:
    failure_name: str
    label: int  # 1 = PASS, 0 = FAIL
    index: float

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValidationError(f"label must be 0 or 1, got {self.label!r}")
        if not 0.0 < self.index < 1.0:
            raise ValidationError(f"index must lie in (0, 1), got {self.index!r}")


@dataclass(frozen=True)
class EvaluationReport:
    ce: float
    mae: float
    rmse: float
    accuracy: float
    f1: float
    n: int
    tau: float

    def to_json_obj(self) -> dict:
        return asdict(self)


def evaluate(outcomes: Iterable[LabeledOutcome], tau: float = 0.4) -> EvaluationReport:
    """Cross entropy (natural log), MAE, RMSE, and thresholded accuracy / F1 with PASS as positive."""
    outcomes = list(outcomes)
    if not outcomes:
        raise EmptyInput("no outcomes to evaluate")
    n = len(outcomes)
    abs_err = sq_err = ce = 0.0
    tp = fp = fn = tn = 0
    for o in outcomes:
        y, p = o.label, o.index
        abs_err += abs(y - p)
        sq_err += (y - p) ** 2
        q = min(max(p, CE_EPSILON), 1.0 - CE_EPSILON)
        ce -= y * math.log(q) + (1 - y) * math.log(1.0 - q)
        predicted = classify(p, tau) is Verdict.PASS
        if predicted and y == 1:
            tp += 1
        elif predicted:
            fp += 1
        elif y == 1:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvaluationReport(
        ce=ce / n,
        mae=abs_err / n,
        rmse=math.sqrt(sq_err / n),
        accuracy=(tp + tn) / n,
        f1=f1,
        n=n,
        tau=float(tau),
    )


def parse_labels(text: str) -> dict[str, int]:
    """Labels file: JSON array of ``{"failure": name, "label": "PASS" | "FAIL"}``."""
    try:
        items = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"labels file is not valid JSON: {exc}") from None
    if not isinstance(items, list):
        raise ValidationError("labels file must hold a JSON array")
    labels = {}
    for item in items:
        if not isinstance(item, Mapping) or "failure" not in item or "label" not in item:
            raise ValidationError(f"bad label entry {item!r}")
        value = str(item["label"]).upper()
        if value not in ("PASS", "FAIL"):
            raise ValidationError(f"label for {item['failure']!r} must be PASS or FAIL")
        labels[str(item["failure"])] = 1 if value == "PASS" else 0
    return labels
