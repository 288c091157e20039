"""Seeded synthesis of paired normal/faulty metric traces for failure scenarios.

Random numbers come from NumPy's ``PCG64`` bit generator seeded with the
scenario seed, consumed in a fixed order:

1. one baseline level per metric (catalog names sorted),
2. the normal-period noise matrix, then the faulty-period noise matrix
   (rows in sorted metric order),
3. timing jitter for the failure signature,
4. per-affected-metric magnitude and shape draws (sorted order).

Identical specs therefore produce bit-identical windows on any platform
with the same NumPy PCG64 stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from resprof.errors import InvalidSpec, ValidationError
from resprof.indexing import Verdict
from resprof.ingest import WindowBounds
from resprof.model import MetricCatalog, MetricClass, PairedWindow, require_valid_window, validate_catalog

STEP = "step"
SPIKE_TRAIN = "spike_train"
DROP_TO_FLOOR = "drop_to_floor"


@dataclass(frozen=True)
class FailurePreset:
    name: str
    level: str  # infrastructure | container
    resource: str
    shape: str
    degradation: str


def _p(name, level, resource, shape, degradation):
    return FailurePreset(name, level, resource, shape, degradation)


PRESETS: tuple[FailurePreset, ...] = (
    _p("cpu_overload", "infrastructure", "cpu", STEP, "physical CPU saturated, slower responses"),
    _p("memory_overload", "infrastructure", "memory", STEP, "physical memory saturated, slower responses"),
    _p("disk_partition_full", "infrastructure", "storage", DROP_TO_FLOOR, "reads/writes fail, HTTP 500s"),
    _p("high_disk_io_throughput", "infrastructure", "storage", STEP, "raised physical I/O throughput"),
    _p("high_disk_io_latency", "infrastructure", "storage", STEP, "slow I/O"),
    _p("high_disk_io_error", "infrastructure", "storage", SPIKE_TRAIN, "slow and failing I/O"),
    _p("block_storage_service_stopped", "infrastructure", "storage", DROP_TO_FLOOR, "I/O rate falls to zero, HTTP 500s"),
    _p("high_http_packet_loss_rate", "infrastructure", "network", SPIKE_TRAIN, "retransmission bursts"),
    _p("high_http_request_latency", "infrastructure", "network", STEP, "slow connections and responses"),
    _p("tcp_disconnection", "infrastructure", "network", SPIKE_TRAIN, "intermittent connection errors"),
    _p("port_in_use", "infrastructure", "network", SPIKE_TRAIN, "connection set-up errors"),
    _p("nic_down", "infrastructure", "network", DROP_TO_FLOOR, "network unreachable"),
    _p("running_out_of_network_connections", "infrastructure", "network", SPIKE_TRAIN, "new connections refused"),
    _p("critical_process_killed", "infrastructure", "process", DROP_TO_FLOOR, "process unresponsive, connections dropped"),
    _p("unplanned_reboot", "infrastructure", "machine", DROP_TO_FLOOR, "machine offline"),
    _p("power_outage", "infrastructure", "machine", DROP_TO_FLOOR, "machine offline"),
    _p("system_time_shift", "infrastructure", "machine", SPIKE_TRAIN, "process errors"),
    _p("container_cpu_overload", "container", "cpu", STEP, "container CPU saturated, slower responses"),
    _p("container_memory_overload", "container", "memory", STEP, "container memory saturated, slower responses"),
    _p("container_tcp_disconnection", "container", "network", SPIKE_TRAIN, "connection errors inside the container"),
    _p("unreachable_network", "container", "network", DROP_TO_FLOOR, "network unreachable from the container"),
    _p("container_port_in_use", "container", "network", SPIKE_TRAIN, "connection set-up errors"),
    _p("container_network_packet_loss", "container", "network", SPIKE_TRAIN, "retransmission bursts"),
    _p("container_virtual_nic_down", "container", "network", DROP_TO_FLOOR, "container connection errors"),
    _p("container_disk_full", "container", "storage", DROP_TO_FLOOR, "reads/writes fail, HTTP 500s"),
    _p("container_instance_killed", "container", "instance", DROP_TO_FLOOR, "instance offline, endpoint unresponsive"),
    _p("container_instance_suspended", "container", "instance", DROP_TO_FLOOR, "instance offline, endpoint unresponsive"),
)

_BY_NAME = {p.name: p for p in PRESETS}


def preset_catalog() -> list[FailurePreset]:
    return list(PRESETS)


def get_preset(name: str) -> FailurePreset:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise InvalidSpec(f"unknown failure preset {name!r}") from None


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    catalog: MetricCatalog
    T: int
    failure_preset: str
    affected_system_metrics: Sequence[str]
    disseminate: bool
    step_seconds: float = 1.0
    dissemination_lag_steps: int = 2
    degradation_gain: float = 1.5
    noise_std: float = 0.0005
    # distance-based measures map d -> 1/(1+d) on raw magnitudes, so the
    # defaults keep signatures in normalised units where d stays O(1)
    amplitude: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "affected_system_metrics", tuple(self.affected_system_metrics))
        problems = []
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= int(self.seed) < 2**64:
            problems.append("seed must be an integer in [0, 2**64)")
        cat_problems = validate_catalog(self.catalog)
        problems += [p.describe() for p in cat_problems]
        if not isinstance(self.T, (int, np.integer)) or self.T < 8:
            problems.append("T must be an integer >= 8")
        if not self.step_seconds > 0:
            problems.append("step_seconds must be positive")
        if self.failure_preset not in _BY_NAME:
            problems.append(f"unknown failure preset {self.failure_preset!r}")
        if not self.affected_system_metrics:
            problems.append("affected_system_metrics must not be empty")
        if not cat_problems:
            for m in self.affected_system_metrics:
                if m not in self.catalog or self.catalog.class_of(m) is not MetricClass.SYSTEM_PERFORMANCE:
                    problems.append(f"affected metric {m!r} is not a system-performance metric of the catalog")
        if len(set(self.affected_system_metrics)) != len(self.affected_system_metrics):
            problems.append("affected_system_metrics has duplicates")
        if not isinstance(self.dissemination_lag_steps, (int, np.integer)) or self.dissemination_lag_steps < 0:
            problems.append("dissemination_lag_steps must be a non-negative integer")
        if not self.degradation_gain > 0:
            problems.append("degradation_gain must be positive")
        if not self.noise_std >= 0:
            problems.append("noise_std must be non-negative")
        if not self.amplitude > 0:
            problems.append("amplitude must be positive")
        if problems:
            raise InvalidSpec("; ".join(problems))

    @property
    def ground_truth(self) -> Verdict:
        return Verdict.FAIL if self.disseminate else Verdict.PASS

    def to_json_obj(self) -> dict:
        obj = {f.name: getattr(self, f.name) for f in fields(self)}
        obj["catalog"] = self.catalog.to_json_obj()
        obj["affected_system_metrics"] = list(self.affected_system_metrics)
        obj["seed"] = int(self.seed)
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "ScenarioSpec":
        if not isinstance(obj, Mapping):
            raise InvalidSpec("scenario spec must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InvalidSpec(f"unknown scenario fields: {sorted(unknown)}")
        kwargs = dict(obj)
        if "catalog" not in kwargs:
            raise InvalidSpec("scenario spec needs a catalog")
        try:
            kwargs["catalog"] = MetricCatalog(kwargs["catalog"])
        except ValidationError as exc:
            raise InvalidSpec(str(exc)) from None
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidSpec(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        try:
            return cls.from_json_obj(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"scenario spec is not valid JSON: {exc}") from None


@dataclass(frozen=True, eq=False)
class GeneratedScenario:
    window: PairedWindow
    ground_truth: Verdict
    spec: ScenarioSpec
    signature: np.ndarray = field(repr=False, default=None)


def _signature(shape: str, T: int, rng: np.random.Generator, magnitude: float, level: float,
               onset: int, stop: int) -> np.ndarray:
    sig = np.zeros(T)
    if shape == STEP:
        ramp = max(1, T // 30)
        up = np.minimum(1.0, (np.arange(T) - onset + 1) / ramp)
        down = np.minimum(1.0, (stop - np.arange(T)) / ramp)
        sig = magnitude * np.clip(np.minimum(up, down), 0.0, 1.0)
    elif shape == SPIKE_TRAIN:
        period = max(3, T // 20)
        heights = rng.uniform(0.6, 1.0, size=T)
        for t in range(onset, stop, period):
            sig[t] = magnitude * heights[t]
            if t + 1 < stop:
                sig[t + 1] = 0.5 * magnitude * heights[t]
    elif shape == DROP_TO_FLOOR:
        # the metric falls to zero: the signature cancels the baseline level
        sig[onset:stop] = -level
    else:
        raise InvalidSpec(f"unknown signature shape {shape!r}")
    return sig


def generate(spec: ScenarioSpec) -> GeneratedScenario:
    """Build the paired window for ``spec``.

    Normal vectors are baseline level plus noise. Faulty vectors add the
    preset's signature to each affected system metric and, when the scenario
    disseminates, a gain-scaled and lag-shifted copy of the mean affected
    signature to every user-aware metric.
    """
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    names = sorted(spec.catalog.names)
    T = int(spec.T)
    preset = get_preset(spec.failure_preset)

    levels = dict(zip(names, spec.amplitude * rng.uniform(1.0, 2.0, size=len(names))))
    noise_normal = rng.normal(0.0, 1.0, size=(len(names), T)) * spec.noise_std
    noise_faulty = rng.normal(0.0, 1.0, size=(len(names), T)) * spec.noise_std

    jitter = max(1, T // 20)
    onset = T // 5 + int(rng.integers(-jitter, jitter + 1))
    stop = min(T - 2, onset + T // 2 + int(rng.integers(-jitter, jitter + 1)))

    signatures = {}
    for metric in sorted(spec.affected_system_metrics):
        magnitude = spec.amplitude * rng.uniform(0.8, 1.2)
        signatures[metric] = _signature(preset.shape, T, rng, magnitude, levels[metric], onset, stop)
    mean_sig = np.mean([signatures[m] for m in sorted(signatures)], axis=0)

    lag = int(spec.dissemination_lag_steps)
    spread = np.zeros(T)
    if lag < T:
        spread[lag:] = mean_sig[: T - lag]
    spread *= spec.degradation_gain

    faulty, normal = {}, {}
    for i, metric in enumerate(names):
        normal[metric] = levels[metric] + noise_normal[i]
        f = levels[metric] + noise_faulty[i]
        if metric in signatures:
            f = f + signatures[metric]
        elif spec.disseminate and spec.catalog.class_of(metric) is MetricClass.USER_AWARE:
            f = f + spread
        faulty[metric] = f

    order = spec.catalog.names
    window = PairedWindow(
        catalog=spec.catalog,
        faulty={m: faulty[m] for m in order},
        normal={m: normal[m] for m in order},
        step_seconds=float(spec.step_seconds),
        T=T,
    )
    require_valid_window(window)
    return GeneratedScenario(window, spec.ground_truth, spec, mean_sig)


# -- export ------------------------------------------------------------------

def window_bounds(window: PairedWindow, origin: float = 0.0) -> WindowBounds:
    """Faulty period first, normal (clearance) period straight after."""
    span = window.T * window.step_seconds
    return WindowBounds(origin, origin + span, origin + span, origin + 2 * span)


def window_to_csv(window: PairedWindow, origin: float = 0.0) -> str:
    """Render the window as ``metric,timestamp,value`` rows on the ingestion grid."""
    lines = ["metric,timestamp,value"]
    step = window.step_seconds
    for metric in window.catalog.names:
        series = np.concatenate([window.faulty[metric], window.normal[metric]])
        for k, value in enumerate(series):
            lines.append(f"{metric},{origin + k * step!r},{float(value)!r}")
    return "\n".join(lines) + "\n"


_USER_NAMES = ("latency_avg", "error_rate", "throughput", "latency_p99", "success_rate", "latency_p50")
_SYSTEM_NAMES = (
    "cpu_usage", "memory_usage", "fs_reads", "fs_writes", "net_rx_bytes", "net_tx_bytes",
    "net_rx_errors", "net_tx_errors", "cpu_throttled", "memory_cache", "fs_usage", "net_rx_packets",
    "net_tx_packets", "memory_rss",
)


def default_catalog(n_user: int = 2, n_system: int = 12) -> MetricCatalog:
    """A plausible catalog with ``n_user`` user-aware and ``n_system`` system metrics."""
    def names(base, n):
        return [base[i] if i < len(base) else f"{base[i % len(base)]}_{i // len(base)}" for i in range(n)]

    pairs = [(n, MetricClass.USER_AWARE) for n in names(_USER_NAMES, n_user)]
    pairs += [(n, MetricClass.SYSTEM_PERFORMANCE) for n in names(_SYSTEM_NAMES, n_system)]
    return MetricCatalog(pairs)
