import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from resprof.model import MetricCatalog, PairedWindow  # noqa: E402

_criteria = {}
_notes = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        passed = call.excinfo is None
        prev = _criteria.get(number)
        ok = passed and (prev is None or prev[1])
        _criteria[number] = (title, ok, (prev[2] if prev else 0.0) + call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, seconds = _criteria[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({seconds:.1f}s)")
        for note in _notes.get(number, []):
            terminalreporter.write_line(f"        {note}")


@pytest.fixture
def note(request):
    """Attach a measurement line to the acceptance summary of the current criterion."""
    marker = request.node.get_closest_marker("criterion")
    key = marker.args[0] if marker else request.node.name

    def add(text):
        _notes.setdefault(key, []).append(text)

    return add


@pytest.fixture
def small_catalog():
    return MetricCatalog({"cpu": "system_performance", "latency": "user_aware"})


def make_window(faulty, normal, classes=None, step=1.0):
    """Window from ``{metric: vector}`` dicts; classes default to system metrics except names starting with 'b'."""
    names = list(faulty)
    if classes is None:
        classes = {m: ("user_aware" if m.startswith("b") else "system_performance") for m in names}
    catalog = MetricCatalog([(m, classes[m]) for m in names])
    T = len(next(iter(faulty.values())))
    return PairedWindow(catalog, faulty, normal, step, T)


def random_window(rng, n_metrics, T, n_user=None):
    n_user = max(1, n_metrics // 2) if n_user is None else n_user
    names = [f"b{i}" for i in range(n_user)] + [f"p{i}" for i in range(n_metrics - n_user)]
    faulty = {m: rng.normal(size=T) + rng.uniform(0, 3) * (rng.random(T) > 0.5) for m in names}
    normal = {m: rng.normal(size=T) for m in names}
    return make_window(faulty, normal)


@pytest.fixture
def window_factory():
    return make_window


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
