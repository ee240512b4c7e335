"""Anomaly scoring: DTW reconstruction errors, critic scores, combined score, verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fdiadet import aae
from fdiadet.timeseries import TimeSeries, WindowSet, NormalizationParams, normalize, make_windows


@dataclass(frozen=True)
class AnomalyScores:
    """Per-window scores: DTW reconstruction error, raw critic output, their
    z-scores, and the combined product score."""

    re: np.ndarray
    cs: np.ndarray
    z_re: np.ndarray
    z_cs: np.ndarray
    a: np.ndarray
    mu_re: float
    sigma_re: float
    mu_cs: float
    sigma_cs: float


@dataclass(frozen=True)
class Detection:
    """Per-point verdicts: flag[i] is point_scores[i] > threshold."""

    point_scores: np.ndarray
    flags: np.ndarray
    threshold: float
    rule: str = "max-window/three-sigma"


def dtw_distance(a, b) -> float:
    """Dynamic time warping with absolute-difference cost and no band constraint.

    Classic full dynamic program over match/insert/delete steps; symmetric,
    zero for identical sequences, but not a metric.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("dtw_distance requires nonempty sequences")
    n, m = len(a), len(b)
    prev = np.full(m + 1, np.inf)
    prev[0] = 0.0
    curr = np.empty(m + 1)
    for i in range(n):
        curr[0] = np.inf
        cost = np.abs(a[i] - b)
        best_up = np.minimum(prev[1:], prev[:-1])
        running = prev[0]
        for j in range(m):
            running = cost[j] + min(best_up[j], running)
            curr[j + 1] = running
        prev, curr = curr, prev
    return float(prev[m])


def reconstruction_errors(model: aae.AAEModel, windows: WindowSet | np.ndarray) -> np.ndarray:
    """DTW distance between each window and its reconstruction (inference mode)."""
    mat = windows.windows if isinstance(windows, WindowSet) else np.asarray(windows, dtype=np.float64)
    if len(mat) == 0:
        return np.empty(0)
    recs = aae.reconstruct(model, mat)
    return np.array([dtw_distance(mat[i], recs[i]) for i in range(len(mat))])


def critic_scores(model: aae.AAEModel, windows: WindowSet | np.ndarray) -> np.ndarray:
    """Raw window-critic outputs (higher means more normal-looking)."""
    mat = windows.windows if isinstance(windows, WindowSet) else np.asarray(windows, dtype=np.float64)
    if len(mat) == 0:
        return np.empty(0)
    return np.asarray(aae.critic_x_values(model, mat))


def zscore(v) -> np.ndarray:
    """(v - mean) / population-std; an all-equal vector standardizes to zeros."""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise ValueError("zscore requires at least two values")
    mu = float(np.mean(v))
    sigma = float(np.std(v))
    if sigma == 0.0:
        return np.zeros_like(v)
    return (v - mu) / sigma


def anomaly_scores(re: np.ndarray, cs: np.ndarray, orientation: str = "negate_cs") -> AnomalyScores:
    """Combine reconstruction errors and critic scores into the product score.

    Anomalies show high RE and low critic score; with the default orientation
    the critic score is negated before standardizing so both factors point the
    same way and the product is thresholded from above. orientation="raw"
    standardizes the critic output as-is.
    """
    re = np.asarray(re, dtype=np.float64)
    cs = np.asarray(cs, dtype=np.float64)
    if re.shape != cs.shape:
        raise ValueError(f"length mismatch: RE {re.shape} vs CS {cs.shape}")
    if orientation not in ("negate_cs", "raw"):
        raise ValueError(f"unknown orientation {orientation!r}")
    z_re = zscore(re)
    z_cs = zscore(-cs) if orientation == "negate_cs" else zscore(cs)
    return AnomalyScores(
        re=re, cs=cs, z_re=z_re, z_cs=z_cs, a=z_re * z_cs,
        mu_re=float(np.mean(re)), sigma_re=float(np.std(re)),
        mu_cs=float(np.mean(cs)), sigma_cs=float(np.std(cs)),
    )


def threshold_three_sigma(scores) -> float:
    """mean + 3 * population-std of the supplied scores."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("cannot threshold an empty score population")
    return float(np.mean(scores) + 3.0 * np.std(scores))


def windows_to_points(window_scores, starts, window_size: int, series_length: int) -> np.ndarray:
    """Per-point score = max score among windows covering the point.

    Points covered by no window score -inf and can never be flagged.
    """
    window_scores = np.asarray(window_scores, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.int64)
    points = np.full(series_length, -np.inf)
    for score, start in zip(window_scores, starts):
        seg = points[start:start + window_size]
        np.maximum(seg, score, out=seg)
    return points


def score_series(model: aae.AAEModel, series: TimeSeries, window_size: int, step_size: int,
                 norm: NormalizationParams | None = None,
                 orientation: str = "negate_cs") -> tuple[WindowSet, AnomalyScores]:
    """Window a series (normalizing first when params are given) and score it."""
    if norm is not None:
        series = normalize(series, norm)
    if window_size > len(series):
        raise ValueError(f"series of {len(series)} samples is shorter than window {window_size}")
    windows = make_windows(series, window_size, step_size)
    re = reconstruction_errors(model, windows)
    cs = critic_scores(model, windows)
    return windows, anomaly_scores(re, cs, orientation=orientation)


def detect(model: aae.AAEModel, test_series: TimeSeries, window_size: int, step_size: int,
           norm: NormalizationParams | None = None,
           orientation: str = "negate_cs") -> Detection:
    """Full testing path: windows, scores, point aggregation, three-sigma flags."""
    windows, scores = score_series(model, test_series, window_size, step_size,
                                   norm=norm, orientation=orientation)
    points = windows_to_points(scores.a, windows.starts, window_size, len(test_series))
    covered = np.isfinite(points)
    if not np.any(covered):
        raise ValueError("no point is covered by any window")
    threshold = threshold_three_sigma(points[covered])
    return Detection(point_scores=points, flags=points > threshold, threshold=threshold)
