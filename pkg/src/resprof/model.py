"""Core domain types: metric catalogs, series and paired faulty/normal windows."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from resprof.errors import ValidationError


class MetricClass(Enum):
    """Which side of the dissemination a metric sits on."""

    USER_AWARE = "user_aware"
    SYSTEM_PERFORMANCE = "system_performance"

    @classmethod
    def parse(cls, value: Union[str, "MetricClass"]) -> "MetricClass":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(
                f"unknown metric class {value!r}; expected 'user_aware' or 'system_performance'"
            ) from None


# -- validation findings -----------------------------------------------------

@dataclass(frozen=True)
class Violation:
    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class EmptyCatalog(Violation):
    def describe(self):
        return "catalog is empty"


@dataclass(frozen=True)
class MissingClass(Violation):
    missing: MetricClass

    def describe(self):
        return f"catalog has no {self.missing.value} metric"


@dataclass(frozen=True)
class DuplicateId(Violation):
    metric: str

    def describe(self):
        return f"metric {self.metric!r} listed more than once"


@dataclass(frozen=True)
class InvalidId(Violation):
    metric: str

    def describe(self):
        return f"metric id {self.metric!r} is not a non-empty string"


@dataclass(frozen=True)
class LengthMismatch(Violation):
    metric: str
    got: int
    expected: int

    def describe(self):
        return f"{self.metric}: length {self.got}, expected {self.expected}"


@dataclass(frozen=True)
class KeySetMismatch(Violation):
    period: str
    missing: tuple = ()
    extra: tuple = ()

    def describe(self):
        return f"{self.period} keys differ from catalog (missing={list(self.missing)}, extra={list(self.extra)})"


@dataclass(frozen=True)
class NonFiniteValue(Violation):
    metric: str
    index: int
    period: str = ""

    def describe(self):
        return f"{self.metric}[{self.index}] is not finite ({self.period})"


@dataclass(frozen=True)
class InvalidStep(Violation):
    step_seconds: float

    def describe(self):
        return f"step_seconds must be positive, got {self.step_seconds}"


# -- catalog -----------------------------------------------------------------

class MetricCatalog:
    """The metric universe, partitioned into user-aware and system-performance sets.

    Entries keep their insertion order. Duplicate names are retained so that
    :func:`validate_catalog` can report them; lookups use the first entry.
    """

    __slots__ = ("_entries", "_classes")

    def __init__(self, entries: Union[Mapping[str, object], Iterable[tuple[str, object]]] = ()):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        self._entries = tuple((name, MetricClass.parse(cls)) for name, cls in pairs)
        classes = {}
        for name, cls in self._entries:
            classes.setdefault(name, cls)
        self._classes = MappingProxyType(classes)

    @property
    def entries(self) -> tuple[tuple[str, MetricClass], ...]:
        return self._entries

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._classes)

    def class_of(self, metric: str) -> MetricClass:
        return self._classes[metric]

    def members(self, cls: MetricClass) -> tuple[str, ...]:
        return tuple(n for n, c in self._classes.items() if c is cls)

    @property
    def user_aware(self) -> tuple[str, ...]:
        return self.members(MetricClass.USER_AWARE)

    @property
    def system_performance(self) -> tuple[str, ...]:
        return self.members(MetricClass.SYSTEM_PERFORMANCE)

    def __contains__(self, metric) -> bool:
        return metric in self._classes

    def __len__(self) -> int:
        return len(self._classes)

    def __iter__(self):
        return iter(self._classes)

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricCatalog) and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self) -> str:
        body = ", ".join(f"{n}:{c.value}" for n, c in self._entries)
        return f"MetricCatalog({{{body}}})"

    def to_json_obj(self) -> dict:
        return {name: cls.value for name, cls in self._classes.items()}

    @classmethod
    def from_json(cls, text: str) -> "MetricCatalog":
        try:
            pairs = json.loads(text, object_pairs_hook=list)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"catalog is not valid JSON: {exc}") from None
        if not isinstance(pairs, list) or any(not isinstance(p, tuple) for p in pairs):
            raise ValidationError("catalog JSON must be an object mapping metric name to class")
        return cls(pairs)

    @classmethod
    def load(cls, path) -> "MetricCatalog":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def validate_catalog(catalog: MetricCatalog) -> list[Violation]:
    """Return the list of partition violations; an empty list means the catalog is usable."""
    if not catalog.entries:
        return [EmptyCatalog()]
    found: list[Violation] = []
    seen = set()
    for name, _ in catalog.entries:
        if not isinstance(name, str) or not name:
            found.append(InvalidId(str(name)))
        elif name in seen:
            found.append(DuplicateId(name))
        seen.add(name)
    present = {cls for _, cls in catalog.entries}
    for cls in (MetricClass.USER_AWARE, MetricClass.SYSTEM_PERFORMANCE):
        if cls not in present:
            found.append(MissingClass(cls))
    return found


def require_valid_catalog(catalog: MetricCatalog) -> MetricCatalog:
    problems = validate_catalog(catalog)
    if problems:
        raise ValidationError("; ".join(p.describe() for p in problems), problems)
    return catalog


# -- series and windows ------------------------------------------------------

def _frozen_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MetricSeries:
    id: str
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ts = _frozen_vector(self.timestamps)
        vs = _frozen_vector(self.values)
        if ts.ndim != 1 or vs.shape != ts.shape or ts.size == 0:
            raise ValidationError(f"series {self.id!r} needs matching non-empty timestamp/value vectors")
        if np.any(np.diff(ts) <= 0):
            raise ValidationError(f"series {self.id!r} timestamps are not strictly increasing")
        if not np.all(np.isfinite(vs)):
            raise ValidationError(f"series {self.id!r} contains non-finite values")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vs)


@dataclass(frozen=True, eq=False)
class PairedWindow:
    """Faulty-period and normal-period vectors of equal length ``T`` for every metric.

    Construction does not validate; call :func:`validate_window` (downstream
    analysis does so via :func:`require_valid_window`).
    """

    catalog: MetricCatalog
    faulty: Mapping[str, np.ndarray]
    normal: Mapping[str, np.ndarray]
    step_seconds: float
    T: int

    def __post_init__(self):
        object.__setattr__(self, "faulty", MappingProxyType({k: _frozen_vector(v) for k, v in self.faulty.items()}))
        object.__setattr__(self, "normal", MappingProxyType({k: _frozen_vector(v) for k, v in self.normal.items()}))

    @property
    def metrics(self) -> tuple[str, ...]:
        return self.catalog.names

    def map_values(self, fn) -> "PairedWindow":
        """Apply ``fn`` to every faulty and normal vector, keeping everything else."""
        return PairedWindow(
            catalog=self.catalog,
            faulty={k: fn(v) for k, v in self.faulty.items()},
            normal={k: fn(v) for k, v in self.normal.items()},
            step_seconds=self.step_seconds,
            T=self.T,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairedWindow):
            return NotImplemented
        if (self.catalog, self.step_seconds, self.T) != (other.catalog, other.step_seconds, other.T):
            return False
        for mine, theirs in ((self.faulty, other.faulty), (self.normal, other.normal)):
            if mine.keys() != theirs.keys():
                return False
            if any(not np.array_equal(mine[k], theirs[k]) for k in mine):
                return False
        return True


def validate_window(window: PairedWindow) -> list[Violation]:
    found: list[Violation] = []
    if not (isinstance(window.step_seconds, (int, float)) and window.step_seconds > 0
            and math.isfinite(window.step_seconds)):
        found.append(InvalidStep(window.step_seconds))
    keys = set(window.catalog.names)
    for period, vectors in (("faulty", window.faulty), ("normal", window.normal)):
        have = set(vectors)
        if have != keys:
            found.append(KeySetMismatch(period, tuple(sorted(keys - have)), tuple(sorted(have - keys))))
        for metric in window.catalog.names:
            if metric not in vectors:
                continue
            vec = np.asarray(vectors[metric])
            if vec.ndim != 1 or vec.shape[0] != window.T:
                found.append(LengthMismatch(metric, int(vec.size), window.T))
                continue
            bad = np.flatnonzero(~np.isfinite(vec))
            if bad.size:
                found.append(NonFiniteValue(metric, int(bad[0]), period))
    return found


def require_valid_window(window: PairedWindow) -> PairedWindow:
    problems = validate_window(window)
    if problems:
        raise ValidationError("; ".join(p.describe() for p in problems), problems)
    return window


# -- campaign description ----------------------------------------------------

@dataclass(frozen=True)
class FailureDescriptor:
    name: str
    inject: str = ""
    clear: str = ""
    scenario: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class CampaignSpec:
    """Ordered failures executed with identical injection and clearance durations."""

    failures: Sequence[FailureDescriptor]
    window_duration_seconds: float
    metric_source: Mapping
    catalog: MetricCatalog | None = None
    step_seconds: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "failures", tuple(self.failures))
        if not self.failures:
            raise ValidationError("campaign needs at least one failure")
        if not (self.window_duration_seconds > 0):
            raise ValidationError("window_duration_seconds must be positive")
        if not (self.step_seconds > 0):
            raise ValidationError("step_seconds must be positive")
        names = [f.name for f in self.failures]
        if len(set(names)) != len(names):
            raise ValidationError("failure names must be unique")
