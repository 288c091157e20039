import numpy as np
import pytest
from hypothesis import given, strategies as st

from resprof.errors import EvenWindow, MalformedLine, MalformedRow, NoData, OutOfRange, UnequalDurations
from resprof.ingest import (
    Record,
    WindowBounds,
    parse_exposition_text,
    parse_metrics_csv,
    resample_align,
    smooth_moving_average,
    split_windows,
)
from resprof.model import MetricCatalog, validate_window


class TestCsv:
    def test_rows(self):
        assert parse_metrics_csv("cpu,0,1.5\ncpu,1,2.0") == [Record("cpu", 0.0, 1.5), Record("cpu", 1.0, 2.0)]

    def test_header_skipped(self):
        assert parse_metrics_csv("metric,timestamp,value\ncpu,0,1.5") == [Record("cpu", 0.0, 1.5)]

    def test_wrong_arity(self):
        with pytest.raises(MalformedRow) as err:
            parse_metrics_csv("cpu,0")
        assert err.value.line_no == 1

    def test_bad_number(self):
        with pytest.raises(MalformedRow) as err:
            parse_metrics_csv("cpu,0,1\ncpu,x,2")
        assert err.value.line_no == 2


class TestExposition:
    def test_comment_and_ms_conversion(self):
        assert parse_exposition_text("# HELP x\ncpu 1.5 1000") == [Record("cpu", 1.0, 1.5)]

    def test_labels_folded(self):
        assert parse_exposition_text('rx_bytes{pod="a"} 7 2000') == [Record("rx_bytes|pod=a", 2.0, 7.0)]

    def test_labels_sorted(self):
        [rec] = parse_exposition_text('rx{pod="a",container="web"} 1 0')
        assert rec.metric == "rx|container=web|pod=a"

    def test_escaped_label_value(self):
        [rec] = parse_exposition_text('rx{path="a\\"b,c"} 1 0')
        assert rec.metric == 'rx|path=a"b,c'

    def test_malformed_value(self):
        with pytest.raises(MalformedLine) as err:
            parse_exposition_text("# HELP x\ncpu one 1000")
        assert err.value.line_no == 2

    def test_missing_timestamp(self):
        with pytest.raises(MalformedLine):
            parse_exposition_text("cpu 1.0")


class TestResample:
    cat = MetricCatalog({"cpu": "system_performance", "latency": "user_aware"})

    def _raw(self, cpu, latency=((0, 1.0),)):
        return [Record("cpu", t, v) for t, v in cpu] + [Record("latency", t, v) for t, v in latency]

    def test_direct_buckets(self):
        out = resample_align(self._raw([(0, 2.0), (1, 4.0)]), self.cat, 0, 2, 1)
        assert out["cpu"].tolist() == [2.0, 4.0]

    def test_interior_gap_interpolated(self):
        out = resample_align(self._raw([(0, 2.0), (2, 6.0)]), self.cat, 0, 3, 1)
        assert out["cpu"].tolist() == [2.0, 4.0, 6.0]

    def test_edges_held(self):
        out = resample_align(self._raw([(1, 5.0)]), self.cat, 0, 3, 1)
        assert out["cpu"].tolist() == [5.0, 5.0, 5.0]

    def test_bucket_mean(self):
        out = resample_align(self._raw([(0.1, 1.0), (0.6, 3.0), (1.2, 10.0)]), self.cat, 0, 2, 1)
        assert out["cpu"].tolist() == [2.0, 10.0]

    def test_no_data(self):
        with pytest.raises(NoData) as err:
            resample_align([Record("cpu", 0, 1.0)], self.cat, 0, 2, 1)
        assert err.value.metric == "latency"

    def test_non_finite_samples_count_as_missing(self):
        out = resample_align(self._raw([(0, 1.0), (1, float("nan")), (2, 3.0)]), self.cat, 0, 3, 1)
        assert out["cpu"].tolist() == [1.0, 2.0, 3.0]

    @given(st.lists(st.tuples(st.floats(0, 20), st.floats(-1e3, 1e3)), min_size=1, max_size=40),
           st.floats(0.25, 5))
    def test_equal_lengths(self, samples, step):
        raw = [Record("cpu", t, v) for t, v in samples] + [Record("latency", t, v) for t, v in samples]
        out = resample_align(raw, self.cat, 0.0, 20.5, step)
        lengths = {len(v) for v in out.values()}
        assert len(lengths) == 1
        assert all(np.isfinite(v).all() for v in out.values())


class TestSmoothing:
    def test_edges_truncate(self):
        assert smooth_moving_average([2, 4, 6], 3).tolist() == [3.0, 4.0, 5.0]

    def test_single_point(self):
        assert smooth_moving_average([5], 3).tolist() == [5.0]

    def test_window_one_is_identity(self):
        v = [1.0, -2.0, 7.5]
        assert smooth_moving_average(v, 1).tolist() == v

    def test_even_window(self):
        with pytest.raises(EvenWindow):
            smooth_moving_average([1, 2, 3], 2)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        v = rng.normal(size=23)
        for w in (3, 5, 7):
            h = w // 2
            expected = [np.mean(v[max(0, i - h): i + h + 1]) for i in range(v.size)]
            assert np.allclose(smooth_moving_average(v, w), expected, atol=1e-12)

    @given(st.floats(-1e6, 1e6), st.integers(1, 30), st.sampled_from([1, 3, 5, 9]))
    def test_constant_series_fixed_point(self, c, n, w):
        v = np.full(n, c)
        once = smooth_moving_average(v, w)
        assert once.tolist() == v.tolist()
        assert smooth_moving_average(once, w).tolist() == v.tolist()


class TestSplit:
    cat = MetricCatalog({"cpu": "system_performance", "latency": "user_aware"})
    aligned = {"cpu": np.arange(10.0), "latency": np.arange(10.0) * 2}

    def test_halves(self):
        w = split_windows(self.aligned, WindowBounds(0, 5, 5, 10), self.cat, 1.0)
        assert w.T == 5
        assert w.faulty["cpu"].tolist() == [0, 1, 2, 3, 4]
        assert w.normal["latency"].tolist() == [10, 12, 14, 16, 18]

    def test_unequal(self):
        with pytest.raises(UnequalDurations):
            split_windows(self.aligned, WindowBounds(0, 5, 5, 9), self.cat, 1.0)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            split_windows(self.aligned, WindowBounds(8, 13, 0, 5), self.cat, 1.0)

    def test_origin_offset(self):
        w = split_windows(self.aligned, WindowBounds(102, 104, 106, 108), self.cat, 1.0, origin=100)
        assert w.faulty["cpu"].tolist() == [2, 3]
        assert w.normal["cpu"].tolist() == [6, 7]

    @given(st.integers(1, 12), st.integers(0, 6), st.sampled_from([0.5, 1.0, 2.0]))
    def test_resample_then_split_always_valid(self, T, gap, step):
        total = 2 * T + gap
        raw = [Record(m, k * step, float(k % 4)) for m in ("cpu", "latency") for k in range(0, total, 2)]
        aligned = resample_align(raw, self.cat, 0.0, total * step, step)
        bounds = WindowBounds(0.0, T * step, (T + gap) * step, (2 * T + gap) * step)
        w = split_windows(aligned, bounds, self.cat, step)
        assert validate_window(w) == []
        assert w.T == T
