"""Parsing raw metric exports, aligning them onto a grid and cutting paired windows."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from resprof.errors import (
    EvenWindow,
    MalformedLine,
    MalformedRow,
    NoData,
    OutOfRange,
    UnequalDurations,
    ValidationError,
)
from resprof.model import MetricCatalog, PairedWindow, require_valid_window

logger = logging.getLogger(__name__)

CSV_HEADER = ("metric", "timestamp", "value")

# half a nanosecond-scale slack so that t = start + k*step lands in bucket k
_BUCKET_EPS = 1e-9


class Record(NamedTuple):
    metric: str
    timestamp: float
    value: float


class RawExport(list):
    """Records in input order; may be unsorted, ragged or duplicated."""

    def metrics(self) -> set[str]:
        return {r.metric for r in self}


def parse_metrics_csv(text: str) -> RawExport:
    records = RawExport()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise MalformedRow(line_no, f"expected 3 fields, got {len(parts)}")
        if line_no == 1 and tuple(p.lower() for p in parts) == CSV_HEADER:
            continue
        name, ts, val = parts
        if not name:
            raise MalformedRow(line_no, "empty metric name")
        try:
            records.append(Record(name, float(ts), float(val)))
        except ValueError:
            raise MalformedRow(line_no, "unparseable number") from None
    return records


_EXPOSITION = re.compile(
    r"""^(?P<name>[A-Za-z_:][A-Za-z0-9_:]*)
        (?:\{(?P<labels>.*)\})?
        \s+(?P<value>\S+)
        \s+(?P<ts>\S+)\s*$""",
    re.VERBOSE,
)
_LABEL = re.compile(r'\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*"((?:[^"\\]|\\.)*)"\s*(?:,|$)')
_UNESCAPE = {"\\\\": "\\", '\\"': '"', "\\n": "\n"}


def _parse_labels(body: str) -> dict[str, str] | None:
    labels = {}
    pos = 0
    body = body.strip()
    while pos < len(body):
        m = _LABEL.match(body, pos)
        if not m:
            return None
        labels[m.group(1)] = re.sub(r"\\.", lambda e: _UNESCAPE.get(e.group(0), e.group(0)), m.group(2))
        pos = m.end()
    return labels


def fold_metric_name(name: str, labels: Mapping[str, str]) -> str:
    """``name|k=v|k=v`` with label keys sorted; bare ``name`` when unlabeled."""
    return "|".join([name, *(f"{k}={labels[k]}" for k in sorted(labels))])


def parse_exposition_text(text: str) -> RawExport:
    """Parse text-exposition lines ``name{labels} value timestamp_ms``.

    Timestamps are mandatory here since windows are cut by time; they are
    converted from milliseconds to seconds.
    """
    records = RawExport()
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _EXPOSITION.match(stripped)
        if not m:
            raise MalformedLine(line_no, "expected 'name{labels} value timestamp_ms'")
        labels = {}
        if m.group("labels") is not None:
            labels = _parse_labels(m.group("labels"))
            if labels is None:
                raise MalformedLine(line_no, "bad label set")
        try:
            value = float(m.group("value"))
            ts_ms = float(m.group("ts"))
        except ValueError:
            raise MalformedLine(line_no, "unparseable number") from None
        if not math.isfinite(ts_ms):
            raise MalformedLine(line_no, "timestamp must be finite")
        records.append(Record(fold_metric_name(m.group("name"), labels), ts_ms / 1000.0, value))
    return records


def resample_align(raw, catalog: MetricCatalog, start: float, end: float, step_seconds: float) -> dict[str, np.ndarray]:
    """Bucket every catalog metric onto ``floor((end - start) / step)`` slots.

    Buckets hold the mean of their samples. Interior gaps are linearly
    interpolated; leading and trailing gaps hold the nearest observed bucket.
    Non-finite samples count as missing.
    """
    if not end > start:
        raise ValidationError(f"end ({end}) must be after start ({start})")
    if not step_seconds > 0:
        raise ValidationError("step_seconds must be positive")
    n = int(math.floor((end - start) / step_seconds + _BUCKET_EPS))
    if n < 1:
        raise ValidationError("range shorter than one step")

    wanted = set(catalog.names)
    sums = {m: np.zeros(n) for m in wanted}
    counts = {m: np.zeros(n, dtype=int) for m in wanted}
    dropped = 0
    for rec in raw:
        if rec.metric not in wanted:
            continue
        idx = int(math.floor((rec.timestamp - start) / step_seconds + _BUCKET_EPS))
        if not 0 <= idx < n:
            continue
        if not math.isfinite(rec.value):
            dropped += 1
            continue
        sums[rec.metric][idx] += rec.value
        counts[rec.metric][idx] += 1
    if dropped:
        logger.warning("ignored %d non-finite samples during alignment", dropped)

    aligned = {}
    grid = np.arange(n)
    for metric in catalog.names:
        have = counts[metric] > 0
        if not have.any():
            raise NoData(metric)
        means = np.full(n, np.nan)
        means[have] = sums[metric][have] / counts[metric][have]
        # np.interp holds the end values flat outside the observed span
        aligned[metric] = np.interp(grid, grid[have], means[have])
    return aligned


def smooth_moving_average(values, window: int = 3) -> np.ndarray:
    """Centered moving average; the window shrinks to the available points at the edges."""
    if not isinstance(window, (int, np.integer)) or window < 1 or window % 2 == 0:
        raise EvenWindow(window)
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError("values must be a non-empty 1-D sequence")
    if window == 1:
        return v.copy()
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(v)))
    idx = np.arange(v.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, v.size)
    out = (csum[hi] - csum[lo]) / (hi - lo)
    # cumulative sums leave rounding noise on constant input
    if np.all(v == v[0]):
        out[:] = v[0]
    return out


def smooth_window(window: PairedWindow, size: int = 3) -> PairedWindow:
    """Smooth the faulty and normal vectors separately so neither period leaks into the other."""
    return window.map_values(lambda v: smooth_moving_average(v, size))


@dataclass(frozen=True)
class WindowBounds:
    faulty_start: float
    faulty_end: float
    normal_start: float
    normal_end: float

    @property
    def faulty_duration(self) -> float:
        return self.faulty_end - self.faulty_start

    @property
    def normal_duration(self) -> float:
        return self.normal_end - self.normal_start

    def check(self, tol: float = 1e-9) -> None:
        if self.faulty_duration <= 0 or self.normal_duration <= 0:
            raise ValidationError("window intervals must be non-empty")
        if abs(self.faulty_duration - self.normal_duration) > tol * max(1.0, abs(self.faulty_duration)):
            raise UnequalDurations(self.faulty_duration, self.normal_duration)
        if self.faulty_start < self.normal_end and self.normal_start < self.faulty_end:
            raise ValidationError("faulty and normal intervals overlap")

    def to_json_obj(self) -> dict:
        return {
            "faulty_start": self.faulty_start,
            "faulty_end": self.faulty_end,
            "normal_start": self.normal_start,
            "normal_end": self.normal_end,
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "WindowBounds":
        try:
            return cls(*(float(obj[k]) for k in ("faulty_start", "faulty_end", "normal_start", "normal_end")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad window bounds: {exc}") from None


def _grid_index(t: float, origin: float, step: float) -> int:
    pos = (t - origin) / step
    idx = int(round(pos))
    if abs(pos - idx) > 1e-6:
        raise ValidationError(f"timestamp {t} is not on the {step}s grid starting at {origin}")
    return idx


def split_windows(aligned: Mapping[str, np.ndarray], bounds: WindowBounds, catalog: MetricCatalog,
                  step_seconds: float, origin: float = 0.0) -> PairedWindow:
    """Slice ``[faulty_start, faulty_end)`` and ``[normal_start, normal_end)`` out of an aligned timeline.

    ``origin`` is the timestamp of element 0 of every aligned vector.
    """
    bounds.check()
    length = min((len(aligned[m]) for m in catalog.names if m in aligned), default=0)
    fs = _grid_index(bounds.faulty_start, origin, step_seconds)
    ns = _grid_index(bounds.normal_start, origin, step_seconds)
    T = _grid_index(bounds.faulty_start + bounds.faulty_duration, bounds.faulty_start, step_seconds)
    for start in (fs, ns):
        if start < 0 or start + T > length:
            raise OutOfRange(f"window [{start}, {start + T}) outside aligned timeline of length {length}")
    if T < 1:
        raise ValidationError("window shorter than one step")
    missing = [m for m in catalog.names if m not in aligned]
    if missing:
        raise NoData(missing[0])
    window = PairedWindow(
        catalog=catalog,
        faulty={m: np.asarray(aligned[m][fs:fs + T]) for m in catalog.names},
        normal={m: np.asarray(aligned[m][ns:ns + T]) for m in catalog.names},
        step_seconds=float(step_seconds),
        T=T,
    )
    return require_valid_window(window)
