"""Report figures: loss curves, raw vs reconstructed overlay, scores with threshold.

Rendered with matplotlib straight to SVG files next to the CSV artifacts.
Outputs are byte-stable across reruns: the SVG hash salt is pinned and the
date metadata is dropped.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fdiadet import aae
from fdiadet.scoring import windows_to_points
from fdiadet.timeseries import TimeSeries, NormalizationParams, denormalize_values, \
    make_windows, normalize

plt.rcParams["svg.hashsalt"] = "fdiadet"

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def plot_losses(report: aae.TrainReport, path) -> None:
    """Decoder and window-critic loss trajectories, with the reconstruction
    loss on a twin log-scaled axis."""
    fig, ax = _new_axes("Training losses", "epoch", "adversarial loss")
    ax.plot(report.epochs, report.loss_dec, label="decoder", lw=1.0)
    ax.plot(report.epochs, report.loss_cx, label="window critic", lw=1.0)
    ax2 = ax.twinx()
    ax2.plot(report.epochs, report.loss_ae, label="reconstruction", lw=1.0,
             color="tab:green", alpha=0.7)
    ax2.set_yscale("log")
    ax2.set_ylabel("reconstruction loss")
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def pointwise_reconstruction(model: aae.AAEModel, series: TimeSeries,
                             norm: NormalizationParams, window_size: int,
                             step_size: int) -> np.ndarray:
    """Average the window reconstructions covering each point, in raw units.

    Uncovered trailing points are NaN so plots leave them blank.
    """
    normed = normalize(series, norm)
    windows = make_windows(normed, window_size, step_size)
    recs = aae.reconstruct(model, windows.windows)
    acc = np.zeros(len(series))
    count = np.zeros(len(series))
    for i, start in enumerate(windows.starts):
        acc[start:start + window_size] += recs[i]
        count[start:start + window_size] += 1.0
    out = np.full(len(series), np.nan)
    covered = count > 0
    out[covered] = denormalize_values(acc[covered] / count[covered], norm)
    return out


def plot_reconstruction(model: aae.AAEModel, series: TimeSeries, norm: NormalizationParams,
                        window_size: int, step_size: int, path,
                        labels: np.ndarray | None = None) -> None:
    """Overlay the measured series with its model reconstruction; shade attacks."""
    rec = pointwise_reconstruction(model, series, norm, window_size, step_size)
    fig, ax = _new_axes("Measured vs reconstructed", "sample", "measurement")
    x = np.arange(len(series))
    ax.plot(x, series.values, label="measured", lw=0.8)
    ax.plot(x, rec, label="reconstructed", lw=0.8)
    if labels is not None and labels.any():
        idx = np.flatnonzero(labels)
        breaks = np.flatnonzero(np.diff(idx) > 1)
        for seg in np.split(idx, breaks + 1):
            ax.axvspan(seg[0], seg[-1], color="tab:red", alpha=0.15,
                       label="attacked" if seg[0] == idx[0] else None)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def plot_scores(window_scores: np.ndarray, starts: np.ndarray, window_size: int,
                series_length: int, threshold: float, path,
                labels: np.ndarray | None = None) -> None:
    """Per-point anomaly score with the three-sigma threshold line."""
    points = windows_to_points(window_scores, starts, window_size, series_length)
    plot_vals = np.where(np.isfinite(points), points, np.nan)
    fig, ax = _new_axes("Anomaly score", "sample", "combined score")
    ax.plot(np.arange(series_length), plot_vals, lw=0.8, label="score")
    ax.axhline(threshold, color="tab:red", ls="--", lw=1.0, label="threshold")
    if labels is not None and labels.any():
        idx = np.flatnonzero(labels)
        breaks = np.flatnonzero(np.diff(idx) > 1)
        for seg in np.split(idx, breaks + 1):
            ax.axvspan(seg[0], seg[-1], color="tab:red", alpha=0.15,
                       label="attacked" if seg[0] == idx[0] else None)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
