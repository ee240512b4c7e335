import numpy as np
import pytest

from fdiadet.timeseries import (
    DataFormatError,
    TimeSeries,
    NormalizationParams,
    load_csv,
    save_csv,
    load_labels,
    save_labels,
    synthesize_profile,
    fit_normalizer,
    normalize,
    denormalize,
    split,
    make_windows,
)


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_three_row_file(self, tmp_path):
        path = _write(tmp_path, "timestamp,value\n0,1.0\n1,2.0\n2,3.0\n")
        series = load_csv(path)
        assert len(series) == 3
        assert series.sample_interval == 1
        assert np.allclose(series.values, [1.0, 2.0, 3.0])

    def test_nan_value_names_row(self, tmp_path):
        rows = "\n".join(f"{i},{float(i)}" for i in range(4))
        path = _write(tmp_path, f"timestamp,value\n{rows}\n4,NaN\n")
        with pytest.raises(DataFormatError, match="row 5"):
            load_csv(path)

    def test_week_of_minutes(self, tmp_path):
        rows = "\n".join(f"{i},{1.0 + 0.001 * (i % 7)}" for i in range(10080))
        path = _write(tmp_path, f"timestamp,value\n{rows}\n")
        series = load_csv(path)
        assert len(series) == 10080

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_irregular_spacing_rejected(self, tmp_path):
        path = _write(tmp_path, "timestamp,value\n0,1.0\n1,2.0\n3,3.0\n")
        with pytest.raises(DataFormatError, match="uniformly spaced"):
            load_csv(path)

    def test_non_increasing_rejected(self, tmp_path):
        path = _write(tmp_path, "timestamp,value\n0,1.0\n0,2.0\n")
        with pytest.raises(DataFormatError, match="strictly increasing"):
            load_csv(path)

    def test_bad_header(self, tmp_path):
        path = _write(tmp_path, "time,val\n0,1.0\n")
        with pytest.raises(DataFormatError, match="header"):
            load_csv(path)

    def test_iso_timestamps(self, tmp_path):
        path = _write(tmp_path, "timestamp,value\n"
                                "2021-01-01T00:00:00+00:00,1.0\n"
                                "2021-01-01T00:01:00+00:00,2.0\n")
        series = load_csv(path)
        assert series.timestamp_kind == "epoch"
        assert series.sample_interval == 60

    def test_round_trip(self, tmp_path):
        series = synthesize_profile(50, 1.0, 0.2, 0.05, seed=3)
        path = tmp_path / "out.csv"
        save_csv(series, path)
        back = load_csv(path)
        assert np.array_equal(back.values, series.values)
        assert np.array_equal(back.timestamps, series.timestamps)


class TestLabels:
    def test_round_trip(self, tmp_path):
        labels = np.array([0, 1, 1, 0, 1], dtype=bool)
        path = tmp_path / "labels.csv"
        save_labels(np.arange(5), labels, path)
        assert np.array_equal(load_labels(path), labels)

    def test_bad_label_rejected(self, tmp_path):
        path = _write(tmp_path, "timestamp,label\n0,2\n", name="labels.csv")
        with pytest.raises(DataFormatError, match="row 1"):
            load_labels(path)


class TestSynthesize:
    def test_degenerate_constant(self):
        series = synthesize_profile(100, 2.5, 0.0, 0.0, seed=0)
        assert np.allclose(series.values, 2.5)

    def test_deterministic(self):
        a = synthesize_profile(500, 1.0, 0.2, 0.01, seed=7)
        b = synthesize_profile(500, 1.0, 0.2, 0.01, seed=7)
        assert np.array_equal(a.values, b.values)

    def test_week_mean_near_base(self):
        series = synthesize_profile(10080, 1.0, 0.2, 0.01, seed=7)
        assert abs(float(np.mean(series.values)) - 1.0) < 0.05

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            synthesize_profile(0, 1.0, 0.1, 0.0, seed=1)


class TestNormalization:
    def test_fit_extracts_extrema(self):
        series = TimeSeries(np.arange(3), [0.0, 5.0, 10.0])
        params = fit_normalizer(series, -1.0, 1.0)
        assert params == NormalizationParams(0.0, 10.0, -1.0, 1.0)

    def test_constant_series_rejected(self):
        series = TimeSeries(np.arange(3), [4.0, 4.0, 4.0])
        with pytest.raises(ValueError, match="constant"):
            fit_normalizer(series)

    def test_endpoints_and_midpoint(self):
        params = NormalizationParams(0.0, 10.0, -1.0, 1.0)
        series = TimeSeries(np.arange(3), [0.0, 2.5, 10.0])
        normed = normalize(series, params)
        assert np.allclose(normed.values, [-1.0, -0.5, 1.0])

    def test_denormalize_endpoints(self):
        params = NormalizationParams(0.0, 10.0, -1.0, 1.0)
        series = TimeSeries(np.arange(2), [-1.0, 0.0])
        assert np.allclose(denormalize(series, params).values, [0.0, 5.0])

    def test_round_trip_property(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            vals = rng.uniform(-50.0, 50.0, size=rng.integers(2, 40))
            if np.ptp(vals) == 0:
                continue
            series = TimeSeries(np.arange(len(vals)), vals)
            params = fit_normalizer(series, -1.0, 1.0)
            back = denormalize(normalize(series, params), params)
            assert np.all(np.abs(back.values - vals) <= 1e-9 * np.maximum(1.0, np.abs(vals)))

    def test_order_preserving(self):
        rng = np.random.default_rng(12)
        params = NormalizationParams(-3.0, 7.0, -1.0, 1.0)
        x = np.sort(rng.uniform(-10, 10, size=100))
        x = x[np.diff(x, prepend=-np.inf) > 0]
        series = TimeSeries(np.arange(len(x)), x)
        normed = normalize(series, params).values
        assert np.all(np.diff(normed) > 0)


class TestSplit:
    def test_paper_sized_split(self):
        series = synthesize_profile(10080, 1.0, 0.2, 0.0, seed=1)
        train, test = split(series, 0.8)
        assert len(train) == 8064
        assert len(test) == 2016

    def test_even_split(self):
        series = TimeSeries(np.arange(10), np.arange(10.0))
        train, test = split(series, 0.5)
        assert len(train) == 5 and len(test) == 5
        assert np.array_equal(np.concatenate([train.values, test.values]), series.values)

    def test_rejects_full_fraction(self):
        series = TimeSeries(np.arange(10), np.arange(10.0))
        with pytest.raises(ValueError):
            split(series, 1.0)


class TestMakeWindows:
    def test_small_example(self):
        series = TimeSeries(np.arange(10), np.arange(10.0))
        ws = make_windows(series, 4, 2)
        assert len(ws) == 3
        assert list(ws.starts) == [0, 2, 4]
        assert np.array_equal(ws.windows[1], [2.0, 3.0, 4.0, 5.0])

    def test_train_sized(self):
        ws = make_windows(np.zeros(8064), 40, 1)
        assert len(ws) == 8024

    def test_window_equals_length(self):
        ws = make_windows(np.arange(5.0), 5, 1)
        assert len(ws) == 0

    def test_window_too_large(self):
        with pytest.raises(ValueError):
            make_windows(np.arange(5.0), 6, 1)

    def test_count_formula_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            m = int(rng.integers(1, 400))
            n_w = int(rng.integers(1, m + 1))
            n_s = int(rng.integers(1, 50))
            values = rng.normal(size=m)
            ws = make_windows(values, n_w, n_s)
            assert len(ws) == (m - n_w) // n_s
            for i in range(len(ws)):
                start = i * n_s
                assert ws.starts[i] == start
                assert np.array_equal(ws.windows[i], values[start:start + n_w])

    def test_overlap_reconstruction(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            m = int(rng.integers(10, 200))
            n_w = int(rng.integers(2, min(m, 30) + 1))
            n_s = int(rng.integers(1, n_w + 1))
            values = rng.normal(size=m)
            ws = make_windows(values, n_w, n_s)
            if len(ws) == 0:
                continue
            rebuilt = list(ws.windows[0])
            for i in range(1, len(ws)):
                rebuilt.extend(ws.windows[i][n_w - n_s:])
            covered = int(ws.starts[-1]) + n_w
            assert np.array_equal(np.array(rebuilt), values[:covered])
