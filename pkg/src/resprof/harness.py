"""Pipeline wiring: window analysis, window directories and sequential failure campaigns."""

from __future__ import annotations

import json
import logging
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from resprof import __version__
from resprof.errors import HookFailed, IngestionError, IngestionFailed, InvalidSpec, ResprofError, ValidationError
from resprof.evaluation import EvaluationReport, LabeledOutcome, evaluate
from resprof.indexing import ResilienceReport, Verdict, build_report, check_threshold
from resprof.ingest import (
    WindowBounds,
    parse_exposition_text,
    parse_metrics_csv,
    resample_align,
    smooth_window,
    split_windows,
)
from resprof.lattice import rank_by_elimination
from resprof.measures import ContributionMeasure
from resprof.model import (
    CampaignSpec,
    FailureDescriptor,
    MetricCatalog,
    PairedWindow,
    require_valid_catalog,
    require_valid_window,
)
from resprof.simulator import ScenarioSpec, generate, get_preset

logger = logging.getLogger(__name__)

DEFAULT_TAU = 0.4
DEFAULT_SMOOTHING = 3
DEFAULT_WARPING_WINDOW = 5

SIMULATOR = "simulator"


def analyze_window(window: PairedWindow, measure: ContributionMeasure, tau: float = DEFAULT_TAU,
                   failure_name: str = "failure", provenance: Mapping | None = None) -> ResilienceReport:
    """Rank the window's metrics and turn the ranking into a resilience report."""
    check_threshold(tau)
    require_valid_catalog(window.catalog)
    require_valid_window(window)
    ranked = rank_by_elimination(window, measure)
    prov = {"tool": "resprof", "version": __version__, "T": window.T, "step_seconds": window.step_seconds}
    prov.update(provenance or {})
    return build_report(ranked, window.catalog, measure, tau, failure_name, prov)


# -- window directories ------------------------------------------------------
#
# A window directory holds the raw timeline plus the bounds needed to cut it:
#   metrics.csv | metrics.prom   raw samples
#   window.json                  {"bounds": {...}, "step_seconds": s, "origin": t0, "format": "csv"}
#   catalog.json                 optional; the CLI may pass one explicitly
#   ground_truth.json            written by the simulator only

def parse_raw(text: str, fmt: str):
    if fmt == "csv":
        return parse_metrics_csv(text)
    if fmt in ("exposition", "prom"):
        return parse_exposition_text(text)
    raise ValidationError(f"unknown metric format {fmt!r}")


def load_window_dir(path, catalog: MetricCatalog | None = None,
                    smoothing: int = DEFAULT_SMOOTHING) -> tuple[PairedWindow, str]:
    """Read, align, split and smooth a window directory. Returns the window and its failure name."""
    root = Path(path)
    try:
        meta = json.loads((root / "window.json").read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IngestionError(f"{root} has no window.json") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"window.json is not valid JSON: {exc}") from None
    if catalog is None:
        catalog = MetricCatalog.load(root / "catalog.json")
    require_valid_catalog(catalog)
    fmt = meta.get("format", "csv")
    data_file = root / meta.get("data", "metrics.prom" if fmt in ("exposition", "prom") else "metrics.csv")
    try:
        raw = parse_raw(data_file.read_text(encoding="utf-8"), fmt)
    except FileNotFoundError:
        raise IngestionError(f"missing metric data file {data_file}") from None
    bounds = WindowBounds.from_json_obj(meta.get("bounds", {}))
    step = float(meta.get("step_seconds", 1.0))
    origin = float(meta.get("origin", min(bounds.faulty_start, bounds.normal_start)))
    end = max(bounds.faulty_end, bounds.normal_end)
    aligned = resample_align(raw, catalog, origin, end, step)
    window = split_windows(aligned, bounds, catalog, step, origin)
    if smoothing > 1:
        window = smooth_window(window, smoothing)
    return window, str(meta.get("failure", root.name))


def write_window_dir(path, window: PairedWindow, failure: str, ground_truth: Verdict | None = None,
                     spec: ScenarioSpec | None = None, origin: float = 0.0) -> Path:
    from resprof.simulator import window_bounds, window_to_csv

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "metrics.csv").write_text(window_to_csv(window, origin), encoding="utf-8")
    meta = {
        "failure": failure,
        "format": "csv",
        "step_seconds": window.step_seconds,
        "origin": origin,
        "bounds": window_bounds(window, origin).to_json_obj(),
    }
    (root / "window.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    (root / "catalog.json").write_text(json.dumps(window.catalog.to_json_obj(), indent=2) + "\n", encoding="utf-8")
    if ground_truth is not None:
        truth = {"failure": failure, "label": ground_truth.value}
        if spec is not None:
            truth["spec"] = spec.to_json_obj()
        (root / "ground_truth.json").write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    return root


# -- campaigns ---------------------------------------------------------------

@dataclass
class HookRun:
    failure: str
    phase: str
    command: str
    exit_code: int
    stdout: str
    stderr: str
    seconds: float

    def to_json_obj(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CampaignResult:
    reports: list[ResilienceReport] = field(default_factory=list)
    evaluation: EvaluationReport | None = None
    timings: list[dict] = field(default_factory=list)
    hooks: list[HookRun] = field(default_factory=list)
    error: ResprofError | None = None

    @property
    def aborted(self) -> bool:
        return self.error is not None

    def to_json_obj(self) -> dict:
        return {
            "aborted": self.aborted,
            "error": None if self.error is None else {"type": type(self.error).__name__, "message": str(self.error)},
            "reports": [r.to_json_obj() for r in self.reports],
            "evaluation": None if self.evaluation is None else self.evaluation.to_json_obj(),
            "timings": self.timings,
            "hooks": [h.to_json_obj() for h in self.hooks],
        }


def run_hook(command: str, failure: str, phase: str, timeout: float | None = None) -> HookRun:
    started = time.monotonic()
    try:
        proc = subprocess.run(command, shell=True, capture_output=True, text=True, timeout=timeout)
        code, out, err = proc.returncode, proc.stdout, proc.stderr
    except subprocess.TimeoutExpired as exc:
        code, out, err = -1, exc.stdout or "", f"timed out after {timeout}s"
        out = out.decode() if isinstance(out, bytes) else out
    return HookRun(failure, phase, command, code, out, err, time.monotonic() - started)


def parse_campaign_spec(obj: Mapping, base_dir: Path | None = None) -> CampaignSpec:
    """Build a :class:`CampaignSpec` from its JSON form.

    Separate ``injection_duration_seconds`` / ``clearance_duration_seconds``
    keys are accepted only when equal.
    """
    if not isinstance(obj, Mapping):
        raise ValidationError("campaign spec must be a JSON object")
    base_dir = base_dir or Path(".")
    inj = obj.get("injection_duration_seconds")
    clr = obj.get("clearance_duration_seconds")
    duration = obj.get("window_duration_seconds")
    if inj is not None or clr is not None:
        if inj is None or clr is None or float(inj) != float(clr):
            raise ValidationError(
                f"injection and clearance durations must be equal (got {inj} and {clr})")
        if duration is not None and float(duration) != float(inj):
            raise ValidationError("window_duration_seconds conflicts with the phase durations")
        duration = inj
    if duration is None:
        raise ValidationError("campaign spec needs window_duration_seconds")

    catalog = obj.get("catalog")
    if isinstance(catalog, str):
        catalog = MetricCatalog.load(base_dir / catalog)
    elif isinstance(catalog, Mapping):
        catalog = MetricCatalog(catalog)
    elif catalog is not None:
        raise ValidationError("catalog must be an object or a path")

    failures = []
    for item in obj.get("failures") or []:
        if not isinstance(item, Mapping) or not item.get("name"):
            raise ValidationError(f"bad failure entry {item!r}")
        failures.append(FailureDescriptor(
            name=str(item["name"]),
            inject=str(item.get("inject", "")),
            clear=str(item.get("clear", "")),
            scenario=dict(item.get("scenario") or {}),
        ))
    source = obj.get("metric_source", {"kind": SIMULATOR})
    if isinstance(source, str):
        source = {"kind": SIMULATOR} if source == SIMULATOR else {"kind": "csv", "path": source}
    source = dict(source)
    if "path" in source:
        source["path"] = str(base_dir / source["path"])
    return CampaignSpec(
        failures=failures,
        window_duration_seconds=float(duration),
        metric_source=source,
        catalog=catalog,
        step_seconds=float(obj.get("step_seconds", 1.0)),
    )


def _scenario_for(spec: CampaignSpec, failure: FailureDescriptor, position: int) -> ScenarioSpec:
    params = dict(failure.scenario)
    catalog = params.pop("catalog", None)
    catalog = MetricCatalog(catalog) if catalog is not None else spec.catalog
    if catalog is None:
        raise InvalidSpec(f"failure {failure.name!r}: simulator needs a catalog")
    params.setdefault("seed", position)
    params.setdefault("T", int(round(spec.window_duration_seconds / spec.step_seconds)))
    params.setdefault("step_seconds", spec.step_seconds)
    if "failure_preset" not in params:
        get_preset(failure.name)
        params["failure_preset"] = failure.name
    params.setdefault("affected_system_metrics", list(catalog.system_performance[:1]))
    params.setdefault("disseminate", False)
    params["catalog"] = catalog.to_json_obj()
    return ScenarioSpec.from_json_obj(params)


def _pull_raw(source: Mapping, failure: str):
    kind = source.get("kind", "csv")
    fmt = source.get("format", kind if kind in ("csv", "exposition") else "csv")
    if kind in ("csv", "exposition"):
        text = Path(source["path"]).read_text(encoding="utf-8")
    elif kind == "command":
        run = run_hook(source["command"], failure, "collect", source.get("timeout"))
        if run.exit_code != 0:
            raise IngestionError(f"collector exited with {run.exit_code}: {run.stderr.strip()}")
        text = run.stdout
    else:
        raise ValidationError(f"unknown metric source kind {kind!r}")
    return parse_raw(text, fmt)


def _collect_window(spec: CampaignSpec, failure: str, bounds: WindowBounds) -> PairedWindow:
    catalog = require_valid_catalog(spec.catalog)
    raw = _pull_raw(spec.metric_source, failure)
    step = spec.step_seconds
    # the two periods are resampled separately so hook latency between them
    # never shifts one period off the other's grid
    faulty = resample_align(raw, catalog, bounds.faulty_start, bounds.faulty_end, step)
    normal = resample_align(raw, catalog, bounds.normal_start, bounds.normal_end, step)
    T = min(len(next(iter(faulty.values()))), len(next(iter(normal.values()))))
    window = PairedWindow(catalog, {m: v[:T] for m, v in faulty.items()},
                          {m: v[:T] for m, v in normal.items()}, step, T)
    return require_valid_window(window)


def run_campaign(spec: CampaignSpec, measure: ContributionMeasure, tau: float = DEFAULT_TAU, *,
                 smoothing: int = DEFAULT_SMOOTHING, labels: Mapping[str, int] | None = None,
                 sleep: Callable[[float], None] = time.sleep, clock: Callable[[], float] = time.time,
                 hook_timeout: float | None = None) -> CampaignResult:
    """Execute the campaign's failures strictly one after another.

    For each failure: inject, wait one window, clear, wait one window, pull
    metrics, analyse. Simulator-backed campaigns still run any configured
    hooks but skip the waits. A failing hook or collection aborts the
    campaign; the partial result carries the error.
    """
    check_threshold(tau)
    simulated = spec.metric_source.get("kind") == SIMULATOR
    if not simulated and spec.catalog is None:
        raise ValidationError("campaigns against real systems need a catalog")
    d = spec.window_duration_seconds
    result = CampaignResult()
    truth = {}

    for position, failure in enumerate(spec.failures):
        timing = {"failure": failure.name}
        phase_start = time.monotonic()

        def hook(phase, command):
            if not command:
                return
            run = run_hook(command, failure.name, phase, hook_timeout)
            result.hooks.append(run)
            if run.exit_code != 0:
                raise HookFailed(failure.name, run.exit_code, phase)

        try:
            t_inject = clock()
            try:
                hook("inject", failure.inject)
            except HookFailed:
                # best effort: leave the system clean before aborting
                if failure.clear:
                    result.hooks.append(run_hook(failure.clear, failure.name, "clear", hook_timeout))
                raise
            if not simulated:
                sleep(d)
            t_clear = clock()
            hook("clear", failure.clear)
            if not simulated:
                sleep(d)
            timing["execution_s"] = time.monotonic() - phase_start

            t0 = time.monotonic()
            try:
                if simulated:
                    scenario = _scenario_for(spec, failure, position)
                    window = generate(scenario).window
                    truth[failure.name] = 0 if scenario.disseminate else 1
                else:
                    bounds = WindowBounds(t_inject, t_inject + d, t_clear, t_clear + d)
                    window = _collect_window(spec, failure.name, bounds)
                if smoothing > 1:
                    window = smooth_window(window, smoothing)
            except (IngestionError, OSError) as exc:
                raise IngestionFailed(failure.name, exc) from exc
            timing["ingest_s"] = time.monotonic() - t0

            t0 = time.monotonic()
            report = analyze_window(window, measure, tau, failure.name, {"smoothing_window": smoothing})
            timing["analyze_s"] = time.monotonic() - t0
        except HookFailed as exc:
            result.error = exc
            result.timings.append(timing)
            logger.error("%s", exc)
            break
        except IngestionFailed as exc:
            result.error = exc
            result.timings.append(timing)
            logger.error("%s", exc)
            break
        result.reports.append(report)
        result.timings.append(timing)

    labels = dict(labels) if labels is not None else (truth if simulated else None)
    if labels:
        outcomes = [LabeledOutcome(r.failure_name, labels[r.failure_name], r.index)
                    for r in result.reports if r.failure_name in labels]
        if outcomes:
            result.evaluation = evaluate(outcomes, tau)
    return result


def load_reports(directory) -> list[dict]:
    """Every ``*.json`` file in ``directory`` that looks like a resilience report, sorted by name."""
    reports = []
    for path in sorted(Path(directory).glob("*.json")):
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict) and {"failure", "index", "verdict"} <= obj.keys():
            reports.append(obj)
    return reports


def evaluate_reports(reports: list[dict], labels: Mapping[str, int], tau: float | None = None) -> EvaluationReport:
    if tau is None:
        taus = {float(r["tau"]) for r in reports if "tau" in r}
        tau = taus.pop() if len(taus) == 1 else DEFAULT_TAU
    outcomes = [LabeledOutcome(r["failure"], labels[r["failure"]], float(r["index"]))
                for r in reports if r["failure"] in labels]
    unmatched = sorted({r["failure"] for r in reports} - labels.keys())
    if unmatched:
        logger.warning("no label for %s", ", ".join(unmatched))
    return evaluate(outcomes, tau)

