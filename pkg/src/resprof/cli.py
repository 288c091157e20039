"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 hook failure, 3 ingestion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from resprof.errors import HookFailed, IngestionError, ResprofError
from resprof.evaluation import parse_labels
from resprof.harness import (
    DEFAULT_SMOOTHING,
    DEFAULT_TAU,
    DEFAULT_WARPING_WINDOW,
    analyze_window,
    evaluate_reports,
    load_reports,
    load_window_dir,
    parse_campaign_spec,
    run_campaign,
    write_window_dir,
)
from resprof.indexing import ResilienceReport
from resprof.measures import MEASURE_KEYS, measure_from_name
from resprof.model import MetricCatalog
from resprof.simulator import ScenarioSpec, generate, preset_catalog

log = logging.getLogger("resprof")

EXIT_OK, EXIT_VALIDATION, EXIT_HOOK, EXIT_INGESTION = 0, 1, 2, 3


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ResprofError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ResprofError(f"{path} is not valid JSON: {exc}") from None


def ranked_csv(report: ResilienceReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "metric", "class", "contribution"])
    for k, e in enumerate(report.ranked.entries, start=1):
        writer.writerow([k, e.metric, report.catalog.class_of(e.metric).value, repr(e.contribution)])
    return buf.getvalue()


def _write_report_bundle(report: ResilienceReport, out: Path, window=None, figures=True) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json(), encoding="utf-8")
    stem = out.with_suffix("")
    Path(f"{stem}_ranked.csv").write_text(ranked_csv(report), encoding="utf-8")
    if figures:
        from resprof import plotting

        plotting.plot_ranking(report, f"{stem}_ranking.png")
        if window is not None:
            plotting.plot_degradation(window, f"{stem}_degradation.png", report.failure_name)


def cmd_simulate(args) -> int:
    obj = _read_json(args.spec)
    name = obj.pop("name", None) if isinstance(obj, dict) else None
    spec = ScenarioSpec.from_json_obj(obj)
    name = name or f"{spec.failure_preset}_seed{spec.seed}"
    scenario = generate(spec)
    out = write_window_dir(args.out, scenario.window, name, scenario.ground_truth, spec)
    if args.figures:
        from resprof import plotting

        plotting.plot_window(scenario.window, out / "window.png", name)
    print(json.dumps({"failure": name, "ground_truth": scenario.ground_truth.value, "out": str(out)}))
    return EXIT_OK


def cmd_analyze(args) -> int:
    measure = measure_from_name(args.measure, args.warping_window)
    catalog = MetricCatalog.load(args.catalog) if args.catalog else None
    window, name = load_window_dir(args.window, catalog, args.smoothing)
    report = analyze_window(window, measure, args.tau, args.name or name,
                            {"smoothing_window": args.smoothing})
    if args.out:
        _write_report_bundle(report, Path(args.out), window, args.figures)
    else:
        sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_campaign(args) -> int:
    spec_path = Path(args.spec)
    spec = parse_campaign_spec(_read_json(spec_path), spec_path.parent)
    measure = measure_from_name(args.measure, args.warping_window)
    labels = parse_labels(Path(args.labels).read_text(encoding="utf-8")) if args.labels else None
    result = run_campaign(spec, measure, args.tau, smoothing=args.smoothing, labels=labels)
    summary = json.dumps(result.to_json_obj(), indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for report in result.reports:
            _write_report_bundle(report, out / f"{report.failure_name}.json", figures=args.figures)
        (out / "campaign_summary.json").write_text(summary, encoding="utf-8")
    sys.stdout.write(summary)
    if isinstance(result.error, HookFailed):
        return EXIT_HOOK
    if isinstance(result.error, IngestionError):
        return EXIT_INGESTION
    return EXIT_OK


def cmd_evaluate(args) -> int:
    reports = load_reports(args.reports)
    labels = parse_labels(Path(args.labels).read_text(encoding="utf-8"))
    evaluation = evaluate_reports(reports, labels, args.tau)
    text = json.dumps(evaluation.to_json_obj(), indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        if args.figures:
            from resprof import plotting

            plotting.plot_evaluation(reports, labels, evaluation.tau, out.with_suffix(".png"))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_presets(args) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["name", "level", "resource", "shape", "degradation"])
    for p in preset_catalog():
        writer.writerow([p.name, p.level, p.resource, p.shape, p.degradation])
    return EXIT_OK


def _add_analysis_knobs(p):
    p.add_argument("--measure", choices=MEASURE_KEYS, default="dtw")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU,
                   help="resilience threshold in (0, 1)")
    p.add_argument("--warping-window", type=int, default=DEFAULT_WARPING_WINDOW,
                   help="DTW band half-width in steps")
    p.add_argument("--smoothing", type=int, default=DEFAULT_SMOOTHING,
                   help="odd moving-average window applied to each period; 1 disables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resprof", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a seeded scenario window directory")
    p.add_argument("--spec", required=True, help="scenario spec JSON")
    p.add_argument("--out", required=True, help="output window directory")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="rank metrics and index one window directory")
    p.add_argument("--window", required=True, help="window directory")
    p.add_argument("--catalog", help="catalog JSON (defaults to <window>/catalog.json)")
    p.add_argument("--out", help="report JSON path; CSV and figures are written next to it")
    p.add_argument("--name", help="failure name recorded in the report")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    _add_analysis_knobs(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("campaign", help="run a sequential failure campaign")
    p.add_argument("--spec", required=True, help="campaign spec JSON")
    p.add_argument("--out", help="directory for per-failure reports")
    p.add_argument("--labels", help="labels JSON for evaluation")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    _add_analysis_knobs(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("evaluate", help="score report indices against PASS/FAIL labels")
    p.add_argument("--reports", required=True, help="directory of report JSON files")
    p.add_argument("--labels", required=True, help="labels JSON")
    p.add_argument("--tau", type=float, default=None, help="threshold; defaults to the reports' tau")
    p.add_argument("--out", help="write the evaluation JSON here")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("presets", help="list failure presets of the simulator")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HookFailed as exc:
        log.error("%s", exc)
        return EXIT_HOOK
    except IngestionError as exc:
        log.error("%s", exc)
        return EXIT_INGESTION
    except ResprofError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
