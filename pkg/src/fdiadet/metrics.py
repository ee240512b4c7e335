"""Confusion-matrix detection metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predicted, truth) -> Confusion:
    """Count TP/FP/TN/FN between boolean vectors of equal length."""
    predicted = np.asarray(predicted, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if predicted.shape != truth.shape:
        raise ValueError(f"length mismatch: predicted {predicted.shape} vs truth {truth.shape}")
    return Confusion(
        tp=int(np.sum(predicted & truth)),
        fp=int(np.sum(predicted & ~truth)),
        tn=int(np.sum(~predicted & ~truth)),
        fn=int(np.sum(~predicted & truth)),
    )


def accuracy(c: Confusion) -> float:
    """(TP + TN) / total; 0 for an empty population."""
    return (c.tp + c.tn) / c.total if c.total else 0.0


def precision(c: Confusion) -> float:
    """TP / (TP + FP); 0 when nothing was flagged (degenerate case)."""
    denom = c.tp + c.fp
    return c.tp / denom if denom else 0.0


def recall(c: Confusion) -> float:
    """TP / (TP + FN); 0 when no positives exist (degenerate case)."""
    denom = c.tp + c.fn
    return c.tp / denom if denom else 0.0


def f1(c: Confusion) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    p = precision(c)
    r = recall(c)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def metrics_summary(c: Confusion) -> dict:
    """All four metrics plus flags marking zero-denominator degenerate values."""
    return {
        "tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn,
        "accuracy": accuracy(c),
        "precision": precision(c),
        "recall": recall(c),
        "f1": f1(c),
        "precision_degenerate": c.tp + c.fp == 0,
        "recall_degenerate": c.tp + c.fn == 0,
        "f1_degenerate": precision(c) + recall(c) == 0,
    }


def roc_auc(scores, truth) -> float:
    """Area under the ROC curve via the rank statistic, ties handled by midranks."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=bool)
    if scores.shape != truth.shape:
        raise ValueError("length mismatch between scores and truth")
    n_pos = int(np.sum(truth))
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum = float(np.sum(ranks[truth]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
