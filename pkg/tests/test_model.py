import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from resprof.errors import ValidationError
from resprof.model import (
    DuplicateId,
    EmptyCatalog,
    KeySetMismatch,
    LengthMismatch,
    MetricCatalog,
    MetricClass,
    MetricSeries,
    MissingClass,
    NonFiniteValue,
    PairedWindow,
    validate_catalog,
    validate_window,
)


def test_minimal_partition_is_valid(small_catalog):
    assert validate_catalog(small_catalog) == []


def test_missing_user_aware_class():
    assert validate_catalog(MetricCatalog({"cpu": "system_performance"})) == [MissingClass(MetricClass.USER_AWARE)]


def test_empty_catalog():
    assert validate_catalog(MetricCatalog({})) == [EmptyCatalog()]


def test_duplicate_id_from_json():
    cat = MetricCatalog.from_json('{"cpu": "system_performance", "lat": "user_aware", "cpu": "user_aware"}')
    assert DuplicateId("cpu") in validate_catalog(cat)


def test_unknown_class_rejected():
    with pytest.raises(ValidationError):
        MetricCatalog({"cpu": "cpu-ish"})


def test_catalog_json_round_trip(small_catalog):
    text = json.dumps(small_catalog.to_json_obj())
    assert MetricCatalog.from_json(text) == small_catalog


@given(st.dictionaries(st.text(min_size=1, max_size=6), st.sampled_from(list(MetricClass)), min_size=1, max_size=12))
def test_every_metric_in_exactly_one_class(mapping):
    cat = MetricCatalog(mapping)
    users, systems = set(cat.user_aware), set(cat.system_performance)
    assert users.isdisjoint(systems)
    assert users | systems == set(mapping)
    assert len(cat) == len(users) + len(systems)


def _window(small_catalog, faulty=None, normal=None, T=3):
    faulty = faulty or {"cpu": [1.0, 2.0, 3.0], "latency": [1.0, 1.0, 1.0]}
    normal = normal or {"cpu": [0.0, 0.0, 0.0], "latency": [1.0, 1.0, 1.0]}
    return PairedWindow(small_catalog, faulty, normal, 1.0, T)


def test_valid_window(small_catalog):
    assert validate_window(_window(small_catalog)) == []


def test_length_mismatch(small_catalog):
    w = _window(small_catalog, faulty={"cpu": [1.0, 2.0], "latency": [1.0, 1.0, 1.0]})
    assert validate_window(w) == [LengthMismatch("cpu", 2, 3)]


def test_non_finite_value(small_catalog):
    w = _window(small_catalog, normal={"cpu": [0.0, 0.0, 0.0], "latency": [1.0, float("nan"), 1.0]})
    [problem] = validate_window(w)
    assert isinstance(problem, NonFiniteValue)
    assert (problem.metric, problem.index) == ("latency", 1)


def test_key_set_mismatch(small_catalog):
    w = _window(small_catalog, faulty={"cpu": [1.0, 2.0, 3.0]})
    assert validate_window(w) == [KeySetMismatch("faulty", ("latency",), ())]


def test_window_vectors_are_read_only(small_catalog):
    w = _window(small_catalog)
    with pytest.raises(ValueError):
        w.faulty["cpu"][0] = 5.0


def test_metric_series_invariants():
    s = MetricSeries("cpu", [0.0, 1.0], [1.0, 2.0])
    assert s.values.tolist() == [1.0, 2.0]
    with pytest.raises(ValidationError):
        MetricSeries("cpu", [1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        MetricSeries("cpu", [0.0, 1.0], [1.0, np.inf])
