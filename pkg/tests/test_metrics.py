import numpy as np
import pytest

from fdiadet.metrics import (
    Confusion,
    confusion,
    accuracy,
    precision,
    recall,
    f1,
    metrics_summary,
    roc_auc,
)


def _oracle_counts(pred, truth):
    tp = fp = tn = fn = 0
    for p, t in zip(pred, truth):
        if p and t:
            tp += 1
        elif p and not t:
            fp += 1
        elif not p and t:
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


class TestConfusion:
    def test_simple_pair(self):
        c = confusion([1, 0], [1, 0])
        assert (c.tp, c.tn, c.fp, c.fn) == (1, 1, 0, 0)

    def test_false_positive(self):
        c = confusion([1], [0])
        assert c.fp == 1 and c.tp == 0

    def test_all_negative(self):
        c = confusion(np.zeros(7), np.zeros(7))
        assert c.tn == 7 and c.total == 7

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([1, 0], [1])


class TestMetricFormulas:
    def test_worked_example(self):
        c = Confusion(tp=2, fp=1, tn=6, fn=1)
        assert accuracy(c) == pytest.approx(0.8)
        assert precision(c) == pytest.approx(2 / 3)
        assert recall(c) == pytest.approx(2 / 3)
        assert f1(c) == pytest.approx(2 / 3)

    def test_zero_denominator_sentinel(self):
        c = Confusion(tp=0, fp=0, tn=5, fn=2)
        assert precision(c) == 0.0
        assert metrics_summary(c)["precision_degenerate"]

    def test_perfect_prediction(self):
        c = Confusion(tp=4, fp=0, tn=6, fn=0)
        assert accuracy(c) == precision(c) == recall(c) == f1(c) == 1.0

    def test_random_pairs_against_oracle(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            pred = rng.random(n) < rng.random()
            truth = rng.random(n) < rng.random()
            c = confusion(pred, truth)
            tp, fp, tn, fn = _oracle_counts(pred, truth)
            assert (c.tp, c.fp, c.tn, c.fn) == (tp, fp, tn, fn)
            assert c.total == n
            acc = (tp + tn) / n
            prec = tp / (tp + fp) if tp + fp else 0.0
            rec = tp / (tp + fn) if tp + fn else 0.0
            fval = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
            assert accuracy(c) == acc
            assert precision(c) == prec
            assert recall(c) == rec
            assert f1(c) == fval
            for metric in (accuracy(c), precision(c), recall(c), f1(c)):
                assert 0.0 <= metric <= 1.0

    def test_f1_harmonic_mean_crosscheck(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            c = Confusion(tp=int(rng.integers(0, 20)), fp=int(rng.integers(0, 20)),
                          tn=int(rng.integers(0, 20)), fn=int(rng.integers(0, 20)))
            p, r = precision(c), recall(c)
            if p + r > 0:
                assert f1(c) == pytest.approx(2.0 / (1.0 / p + 1.0 / r) if p and r else 0.0)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(8)
        pred = rng.random(50) < 0.3
        truth = rng.random(50) < 0.2
        perm = rng.permutation(50)
        a = confusion(pred, truth)
        b = confusion(pred[perm], truth[perm])
        assert a == b


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.1, 0.2, 0.9, 0.8], [0, 0, 1, 1]) == 1.0

    def test_random_is_half(self):
        rng = np.random.default_rng(9)
        scores = rng.normal(size=4000)
        truth = rng.random(4000) < 0.5
        assert roc_auc(scores, truth) == pytest.approx(0.5, abs=0.05)

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(10)
        scores = rng.integers(0, 5, size=40).astype(float)
        truth = rng.random(40) < 0.4
        if truth.all() or not truth.any():
            truth[0] = ~truth[0]
        pos = scores[truth]
        neg = scores[~truth]
        wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
        assert roc_auc(scores, truth) == pytest.approx(wins / (len(pos) * len(neg)))
