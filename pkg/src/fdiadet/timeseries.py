"""Ingestion, synthesis, normalization, splitting and windowing of measurement series."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

MINUTES_PER_DAY = 1440
MINUTES_PER_WEEK = 10080


class DataFormatError(ValueError):
    """Raised when an input file or series violates the expected format."""


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled univariate measurement sequence.

    ``timestamps`` holds integer sample indices (``timestamp_kind="index"``)
    or epoch seconds parsed from ISO-8601 instants (``timestamp_kind="epoch"``).
    """

    timestamps: np.ndarray
    values: np.ndarray
    channel: str = "channel0"
    timestamp_kind: str = "index"

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1:
            raise DataFormatError("series must contain at least one sample")
        if len(ts) != len(vals):
            raise DataFormatError("timestamps and values differ in length")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise DataFormatError(f"non-finite value at position {bad}")
        if len(ts) > 1:
            steps = np.diff(ts)
            if np.any(steps <= 0):
                raise DataFormatError("timestamps must be strictly increasing")
            if np.any(steps != steps[0]):
                raise DataFormatError("timestamps must be uniformly spaced")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def sample_interval(self) -> int:
        """Spacing between consecutive samples, in timestamp units."""
        if len(self.timestamps) < 2:
            return 1
        return int(self.timestamps[1] - self.timestamps[0])

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        """Same timestamps and metadata, new values."""
        return replace(self, values=np.asarray(values, dtype=np.float64))


@dataclass(frozen=True)
class NormalizationParams:
    """Min-max scaling parameters mapping [x_min, x_max] onto [low, high]."""

    x_min: float
    x_max: float
    low: float
    high: float

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"degenerate range: x_max={self.x_max} <= x_min={self.x_min}")
        if not self.high > self.low:
            raise ValueError(f"invalid target range: high={self.high} <= low={self.low}")


@dataclass(frozen=True)
class WindowSet:
    """Overlapping fixed-length windows cut from a source series.

    ``windows[i][j] == source[i * step_size + j]``; trailing samples that do
    not fill a further window are left uncovered by design.
    """

    windows: np.ndarray
    starts: np.ndarray
    window_size: int
    step_size: int

    def __len__(self) -> int:
        return len(self.windows)


def load_csv(path, channel: str | None = None) -> TimeSeries:
    """Load a `timestamp,value` CSV into a TimeSeries.

    Timestamps are either integer indices or ISO-8601 instants; mixing the two
    is rejected, as are non-finite values and irregular spacing. Errors name
    the offending data row (1-based, header excluded).
    """
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise FileNotFoundError(f"input file not found: {path}")
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "value"]:
            raise DataFormatError(f"{path}: expected header 'timestamp,value'")
        ticks: list[int] = []
        vals: list[float] = []
        kind = None
        for row_no, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise DataFormatError(f"{path}: malformed row {row_no}: {row!r}")
            tick, row_kind = _parse_timestamp(row[0].strip(), path, row_no)
            if kind is None:
                kind = row_kind
            elif kind != row_kind:
                raise DataFormatError(f"{path}: mixed timestamp styles at row {row_no}")
            try:
                val = float(row[1])
            except ValueError:
                raise DataFormatError(f"{path}: malformed value at row {row_no}: {row[1]!r}")
            if not math.isfinite(val):
                raise DataFormatError(f"{path}: non-finite value at row {row_no}")
            ticks.append(tick)
            vals.append(val)
    if not ticks:
        raise DataFormatError(f"{path}: no data rows")
    name = channel if channel is not None else "channel0"
    try:
        return TimeSeries(np.array(ticks, dtype=np.int64), np.array(vals), channel=name,
                          timestamp_kind=kind)
    except DataFormatError as exc:
        raise DataFormatError(f"{path}: {exc}")


def _parse_timestamp(text: str, path, row_no: int) -> tuple[int, str]:
    try:
        return int(text), "index"
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise DataFormatError(f"{path}: malformed timestamp at row {row_no}: {text!r}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp()), "epoch"


def save_csv(series: TimeSeries, path) -> None:
    """Write a series in the `timestamp,value` format accepted by load_csv."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "value"])
        for tick, val in zip(series.timestamps, series.values):
            writer.writerow([_format_timestamp(int(tick), series.timestamp_kind), repr(float(val))])


def _format_timestamp(tick: int, kind: str) -> str:
    if kind == "epoch":
        return datetime.fromtimestamp(tick, tz=timezone.utc).isoformat()
    return str(tick)


def load_labels(path) -> np.ndarray:
    """Load a `timestamp,label` CSV; labels must be 0 or 1."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "label"]:
            raise DataFormatError(f"{path}: expected header 'timestamp,label'")
        labels = []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) < 2 or row[1].strip() not in ("0", "1"):
                raise DataFormatError(f"{path}: malformed label at row {row_no}: {row!r}")
            labels.append(int(row[1]))
    return np.array(labels, dtype=bool)


def save_labels(timestamps: np.ndarray, labels: np.ndarray, path, kind: str = "index") -> None:
    """Write per-point boolean labels in the `timestamp,label` format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "label"])
        for tick, lab in zip(timestamps, labels):
            writer.writerow([_format_timestamp(int(tick), kind), int(bool(lab))])


def synthesize_profile(length: int, base: float, daily_amplitude: float,
                       noise_std: float, seed: int, channel: str = "synthetic") -> TimeSeries:
    """Generate a load-shaped profile: daily sinusoid, weekly modulation, Gaussian noise.

    One sample per minute; the weekly modulation amplitude is fixed at 30% of
    the daily amplitude. Deterministic for a fixed seed.
    """
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    if noise_std < 0:
        raise ValueError(f"noise_std must be non-negative, got {noise_std}")
    t = np.arange(length, dtype=np.float64)
    daily = daily_amplitude * np.sin(2.0 * np.pi * t / MINUTES_PER_DAY)
    weekly = 0.3 * daily_amplitude * np.sin(2.0 * np.pi * t / MINUTES_PER_WEEK)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_std, size=length) if noise_std > 0 else np.zeros(length)
    values = base + daily + weekly + noise
    return TimeSeries(np.arange(length, dtype=np.int64), values, channel=channel)


def fit_normalizer(series: TimeSeries, low: float = -1.0, high: float = 1.0) -> NormalizationParams:
    """Capture the series min/max and the target range for min-max scaling."""
    x_min = float(np.min(series.values))
    x_max = float(np.max(series.values))
    if x_max == x_min:
        raise ValueError(f"cannot normalize a constant series (all values {x_min})")
    return NormalizationParams(x_min=x_min, x_max=x_max, low=low, high=high)


def normalize(series: TimeSeries, params: NormalizationParams) -> TimeSeries:
    """Min-max scale into [low, high]; out-of-range inputs extrapolate linearly."""
    return series.with_values(normalize_values(series.values, params))


def normalize_values(values: np.ndarray, params: NormalizationParams) -> np.ndarray:
    scale = (params.high - params.low) / (params.x_max - params.x_min)
    return params.low + (np.asarray(values, dtype=np.float64) - params.x_min) * scale


def denormalize(series: TimeSeries, params: NormalizationParams) -> TimeSeries:
    """Algebraic inverse of normalize, up to floating-point rounding."""
    return series.with_values(denormalize_values(series.values, params))


def denormalize_values(values: np.ndarray, params: NormalizationParams) -> np.ndarray:
    scale = (params.x_max - params.x_min) / (params.high - params.low)
    return params.x_min + (np.asarray(values, dtype=np.float64) - params.low) * scale


def split(series: TimeSeries, train_fraction: float) -> tuple[TimeSeries, TimeSeries]:
    """Chronological split: first floor(m * fraction) samples train, rest test."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    m = len(series)
    cut = int(math.floor(m * train_fraction))
    if cut < 1 or cut >= m:
        raise ValueError(f"split of {m} samples at fraction {train_fraction} leaves an empty part")
    train = TimeSeries(series.timestamps[:cut], series.values[:cut],
                       channel=series.channel, timestamp_kind=series.timestamp_kind)
    test = TimeSeries(series.timestamps[cut:], series.values[cut:],
                      channel=series.channel, timestamp_kind=series.timestamp_kind)
    return train, test


def make_windows(series_or_values, window_size: int, step_size: int) -> WindowSet:
    """Cut rolling windows: n = floor((m - N_w) / N_s), starts at multiples of N_s.

    A window size equal to the series length yields zero windows (the count
    formula is followed exactly); trailing samples beyond the last start
    remain uncovered.
    """
    values = series_or_values.values if isinstance(series_or_values, TimeSeries) else \
        np.asarray(series_or_values, dtype=np.float64)
    m = len(values)
    if window_size < 1 or step_size < 1:
        raise ValueError("window_size and step_size must be positive")
    if window_size > m:
        raise ValueError(f"window_size {window_size} exceeds series length {m}")
    n = (m - window_size) // step_size
    starts = np.arange(n, dtype=np.int64) * step_size
    windows = np.empty((n, window_size), dtype=np.float64)
    for i in range(n):
        windows[i] = values[starts[i]:starts[i] + window_size]
    return WindowSet(windows=windows, starts=starts, window_size=window_size, step_size=step_size)
