"""Six comparison detectors run under the same preprocessing and evaluation protocol.

Three reconstruction autoencoders (LSTM, CNN, fully connected) trained on the
plain reconstruction loss, k-means distance-to-centroid, an autoregressive
least-squares forecaster, and a from-scratch nu-one-class SVM with a sigmoid
kernel. run_comparison trains all of them plus the adversarial model on one
clean train split and evaluates point-level detections on one attacked test
series.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from fdiadet import aae, scoring
from fdiadet.metrics import confusion, metrics_summary
from fdiadet.nn import LayerSpec, Network
from fdiadet.optim import OptimizerState, adam_step
from fdiadet.timeseries import TimeSeries, WindowSet, NormalizationParams, make_windows, normalize

BASELINE_KINDS = ("ae_lstm", "ae_cnn", "ae_fc", "kmeans", "linreg", "ocsvm")


@dataclass(frozen=True)
class BaselineConfig:
    """Per-kind hyperparameters; the architecture sizes are fixed by the protocol."""

    kmeans_k: int = 32
    linreg_window: int = 72
    linreg_step: int = 36
    ocsvm_nu: float = 0.05
    ocsvm_gamma: float | None = None
    ocsvm_coef0: float = 0.0
    ocsvm_tol: float = 1e-6
    ocsvm_max_iter: int = 200000
    ocsvm_max_train: int = 2000

    def __post_init__(self):
        if self.kmeans_k < 1 or self.linreg_window < 1 or self.linreg_step < 1:
            raise ValueError("kmeans_k, linreg_window and linreg_step must be positive")
        if not 0.0 < self.ocsvm_nu <= 1.0:
            raise ValueError(f"ocsvm_nu must lie in (0, 1], got {self.ocsvm_nu}")


class ReconstructionDetector:
    """Autoencoder baseline: plain reconstruction training, DTW-error scoring."""

    def __init__(self, name: str, network: Network, window_size: int):
        self.name = name
        self.network = network
        self.window_size = window_size

    def reconstruct(self, windows: np.ndarray) -> np.ndarray:
        x = np.asarray(windows, dtype=np.float64)
        y = self.network.forward(x[:, :, None])
        return y[:, :, 0] if y.ndim == 3 else y

    def fit(self, windows: np.ndarray, epochs: int, batch_size: int = 64,
            learning_rate: float = 0.001, decay: float = 0.99, l2_coeff: float = 1e-4,
            seed: int = 0, full_pass: bool = False) -> list[float]:
        """Minimize mean squared reconstruction error plus the squared-weight
        penalty; same one-batch-per-epoch semantics as the adversarial loop."""
        x_all = np.asarray(windows, dtype=np.float64)
        n = len(x_all)
        if n == 0:
            raise ValueError("empty window set")
        rng = np.random.default_rng(seed)
        opt = OptimizerState(learning_rate=learning_rate, decay=decay)
        history = []
        for epoch in range(epochs):
            opt.epoch = epoch
            if full_pass:
                order = rng.permutation(n)
                batches = [order[i:i + batch_size] for i in range(0, n, batch_size)]
            else:
                batches = [rng.integers(0, n, size=batch_size) if batch_size > n else
                           rng.choice(n, size=batch_size, replace=False)]
            epoch_loss = 0.0
            for idx in batches:
                x = x_all[idx]
                y, caches = self.network.forward_with_cache(x[:, :, None], training=True, rng=rng)
                rec = y[:, :, 0] if y.ndim == 3 else y
                diff = rec - x
                loss = float(np.mean(diff ** 2)) + l2_coeff * self.network.params.l2_sum()
                if not np.isfinite(loss):
                    raise aae.TrainingDivergenceError(
                        f"non-finite {self.name} loss at epoch {epoch}: {loss}")
                dy = 2.0 * diff / diff.size
                if y.ndim == 3:
                    dy = dy[:, :, None]
                _, grads = self.network.backward(caches, dy)
                if l2_coeff:
                    grads.add_scaled(self.network.params, 2.0 * l2_coeff)
                adam_step(opt, self.network.params, grads)
                epoch_loss += loss
            history.append(epoch_loss / len(batches))
        return history

    def window_scores(self, windows: np.ndarray) -> np.ndarray:
        """z-scored DTW reconstruction error per window."""
        x = np.asarray(windows, dtype=np.float64)
        recs = self.reconstruct(x)
        re = np.array([scoring.dtw_distance(x[i], recs[i]) for i in range(len(x))])
        return scoring.zscore(re)


def build_ae_lstm(window_size: int = 40, latent_dim: int = 20,
                  encoder_units: tuple[int, ...] = (40, 40, 40),
                  decoder_units: tuple[int, ...] = (40, 80, 40, 20),
                  dropout_rate: float = 0.2, seed: int = 0) -> ReconstructionDetector:
    """LSTM autoencoder with the same layer sizes as the adversarial model."""
    specs: list[LayerSpec] = []
    for idx, u in enumerate(encoder_units):
        last = idx == len(encoder_units) - 1
        specs.append(LayerSpec("lstm", units=u, return_sequences=not last))
        specs.append(LayerSpec("dropout", rate=dropout_rate))
    specs.append(LayerSpec("dense", units=latent_dim))
    for idx, u in enumerate(decoder_units):
        specs.append(LayerSpec("lstm", units=u, return_sequences=True,
                               repeat_input=window_size if idx == 0 else 0))
        specs.append(LayerSpec("dropout", rate=dropout_rate))
    specs.append(LayerSpec("dense", units=1, time_distributed=True))
    specs.append(LayerSpec("activation", activation="tanh"))
    return ReconstructionDetector("ae_lstm", Network(specs, (window_size, 1), seed), window_size)


def build_ae_cnn(window_size: int = 40, latent_dim: int = 20,
                 dropout_rate: float = 0.2, seed: int = 0) -> ReconstructionDetector:
    """Conv encoder (64/5 then 32/3) to a dense latent, mirrored conv decoder.

    Kernel sizes shrink when the window or latent is too short for them."""
    k1 = min(5, window_size)
    k2 = min(3, window_size - k1 + 1)
    k3 = min(3, latent_dim)
    k4 = min(5, latent_dim - k3 + 1)
    specs = [
        LayerSpec("conv1d", filters=64, kernel_size=k1),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("conv1d", filters=32, kernel_size=k2),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=latent_dim),
        LayerSpec("conv1d", filters=32, kernel_size=k3),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("conv1d", filters=64, kernel_size=k4),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=window_size),
        LayerSpec("activation", activation="tanh"),
    ]
    return ReconstructionDetector("ae_cnn", Network(specs, (window_size, 1), seed), window_size)


def build_ae_fc(window_size: int = 40, latent_dim: int = 20,
                dropout_rate: float = 0.2, seed: int = 0) -> ReconstructionDetector:
    """Fully connected autoencoder: 100/100/latent encoder, mirrored decoder."""
    specs = [
        LayerSpec("dense", units=100),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=100),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=latent_dim),
        LayerSpec("dense", units=100),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=100),
        LayerSpec("activation", activation="relu"),
        LayerSpec("dropout", rate=dropout_rate),
        LayerSpec("dense", units=window_size),
        LayerSpec("activation", activation="tanh"),
    ]
    return ReconstructionDetector("ae_fc", Network(specs, (window_size, 1), seed), window_size)


class KMeansDetector:
    """Lloyd's algorithm with greedy farthest-point seeding; the anomaly score
    of a window is its distance to the nearest centroid."""

    def __init__(self, k: int, max_iter: int = 300, tol: float = 1e-6, seed: int = 0):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.centroids: np.ndarray | None = None
        self.inertia_history: list[float] = []

    def _seed_centroids(self, x: np.ndarray) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        first = int(rng.integers(0, len(x)))
        chosen = [first]
        dist = np.linalg.norm(x - x[first], axis=1)
        for _ in range(1, self.k):
            nxt = int(np.argmax(dist))
            chosen.append(nxt)
            dist = np.minimum(dist, np.linalg.norm(x - x[nxt], axis=1))
        return x[chosen].copy()

    def fit(self, windows: np.ndarray) -> "KMeansDetector":
        x = np.asarray(windows, dtype=np.float64)
        if self.k > len(x):
            raise ValueError(f"k={self.k} exceeds the {len(x)} available windows")
        centroids = self._seed_centroids(x)
        self.inertia_history = []
        for _ in range(self.max_iter):
            d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            assign = np.argmin(d2, axis=1)
            self.inertia_history.append(float(d2[np.arange(len(x)), assign].sum()))
            new_centroids = centroids.copy()
            for c in range(self.k):
                members = assign == c
                if members.any():
                    new_centroids[c] = x[members].mean(axis=0)
            movement = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
            centroids = new_centroids
            if movement < self.tol:
                break
        self.centroids = centroids
        return self

    def window_scores(self, windows: np.ndarray) -> np.ndarray:
        if self.centroids is None:
            raise RuntimeError("fit the detector first")
        x = np.asarray(windows, dtype=np.float64)
        d2 = ((x[:, None, :] - self.centroids[None, :, :]) ** 2).sum(axis=2)
        return np.sqrt(d2.min(axis=1))


class LinRegDetector:
    """Ordinary least squares forecaster over lag windows.

    Each training pair maps one window of lags (plus intercept) to the next
    `step` values; scoring walks the test series in non-overlapping steps and
    reports absolute prediction residuals per point. Points before the first
    complete window (and any partial tail block) receive no score.
    """

    def __init__(self, window: int = 72, step: int = 36):
        if window < 1 or step < 1:
            raise ValueError("window and step must be positive")
        self.window = window
        self.step = step
        self.coef: np.ndarray | None = None

    @staticmethod
    def _design(lags: np.ndarray) -> np.ndarray:
        return np.hstack([lags, np.ones((len(lags), 1))])

    def fit(self, values: np.ndarray) -> "LinRegDetector":
        values = np.asarray(values, dtype=np.float64)
        need = self.window + self.step
        if len(values) < need:
            raise ValueError(f"series of {len(values)} samples is shorter than {need}")
        rows_x, rows_y = [], []
        for start in range(0, len(values) - need + 1, self.step):
            rows_x.append(values[start:start + self.window])
            rows_y.append(values[start + self.window:start + need])
        design = self._design(np.asarray(rows_x))
        targets = np.asarray(rows_y)
        # lstsq returns the minimum-norm solution, covering rank deficiency.
        self.coef, *_ = np.linalg.lstsq(design, targets, rcond=None)
        self.train_residuals = targets - design @ self.coef
        self.train_design = design
        return self

    def point_scores(self, values: np.ndarray) -> np.ndarray:
        if self.coef is None:
            raise RuntimeError("fit the detector first")
        values = np.asarray(values, dtype=np.float64)
        scores = np.full(len(values), -np.inf)
        need = self.window + self.step
        for start in range(0, len(values) - need + 1, self.step):
            lags = values[start:start + self.window]
            pred = self._design(lags[None, :]) @ self.coef
            actual = values[start + self.window:start + need]
            scores[start + self.window:start + need] = np.abs(actual - pred[0])
        return scores


class OneClassSVMDetector:
    """nu-parameterized one-class SVM solved by a deterministic SMO ascent.

    Kernel k(a, b) = tanh(gamma * <a, b> + coef0). The dual minimizes
    0.5 a'Qa subject to 0 <= a_i <= 1/(nu n), sum(a) = 1; pairs are picked by
    maximum KKT violation, so the solve is reproducible. The sigmoid kernel is
    indefinite, so descent steps guard against non-positive curvature.
    """

    def __init__(self, nu: float = 0.05, gamma: float | None = None, coef0: float = 0.0,
                 tol: float = 1e-6, max_iter: int = 200000):
        if not 0.0 < nu <= 1.0:
            raise ValueError(f"nu must lie in (0, 1], got {nu}")
        self.nu = nu
        self.gamma = gamma
        self.coef0 = coef0
        self.tol = tol
        self.max_iter = max_iter
        self.alpha: np.ndarray | None = None
        self.support: np.ndarray | None = None
        self.rho: float = 0.0

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        gamma = self.gamma if self.gamma is not None else 1.0 / a.shape[1]
        return np.tanh(gamma * (a @ b.T) + self.coef0)

    def fit(self, windows: np.ndarray) -> "OneClassSVMDetector":
        x = np.asarray(windows, dtype=np.float64)
        n = len(x)
        if n < 1:
            raise ValueError("empty training set")
        q = self._kernel(x, x)
        c = 1.0 / (self.nu * n)
        alpha = np.zeros(n)
        n_full = int(self.nu * n)
        alpha[:n_full] = c
        if n_full < n:
            alpha[n_full] = 1.0 - n_full * c
        grad = q @ alpha
        box = 1e-12
        violation = 0.0
        for iteration in range(self.max_iter):
            can_up = alpha < c - box
            can_down = alpha > box
            if not can_up.any() or not can_down.any():
                break
            i = int(np.flatnonzero(can_up)[np.argmin(grad[can_up])])
            j = int(np.flatnonzero(can_down)[np.argmax(grad[can_down])])
            violation = grad[j] - grad[i]
            if violation < self.tol:
                break
            curvature = max(q[i, i] + q[j, j] - 2.0 * q[i, j], 1e-12)
            step = min(violation / curvature, c - alpha[i], alpha[j])
            alpha[i] += step
            alpha[j] -= step
            grad += step * (q[:, i] - q[:, j])
        else:
            raise RuntimeError(
                f"one-class SVM did not converge within {self.max_iter} iterations "
                f"(n={n}, remaining KKT violation {violation:.3e})")
        sv = alpha > box
        self.alpha = alpha[sv]
        self.support = x[sv]
        free = sv & (alpha < c - box)
        if free.any():
            self.rho = float(np.mean(grad[free]))
        else:
            self.rho = float(0.5 * (grad[sv].min() + grad[sv].max()))
        return self

    def decision(self, windows: np.ndarray) -> np.ndarray:
        """Kernel expansion minus offset; negative means outside the boundary."""
        if self.alpha is None:
            raise RuntimeError("fit the detector first")
        x = np.asarray(windows, dtype=np.float64)
        return self._kernel(x, self.support) @ self.alpha - self.rho

    def window_scores(self, windows: np.ndarray) -> np.ndarray:
        """Higher means more anomalous: the negated decision function."""
        return -self.decision(windows)

    @property
    def n_support(self) -> int:
        return 0 if self.alpha is None else len(self.alpha)


@dataclass
class ComparisonResult:
    """One metrics row per method, in protocol order."""

    rows: list[dict] = field(default_factory=list)

    def row(self, method: str) -> dict:
        for row in self.rows:
            if row["method"] == method:
                return row
        raise KeyError(method)

    def to_markdown(self) -> str:
        header = "| method | accuracy | precision | recall | f1 |"
        sep = "|--------|----------|-----------|--------|----|"
        lines = [header, sep]
        for row in self.rows:
            lines.append("| {method} | {accuracy:.4f} | {precision:.4f} | {recall:.4f} | {f1:.4f} |"
                         .format(**row))
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("method,accuracy,precision,recall,f1,tp,fp,tn,fn\n")
            for row in self.rows:
                fh.write("{method},{accuracy!r},{precision!r},{recall!r},{f1!r},"
                         "{tp},{fp},{tn},{fn}\n".format(**row))


def _evaluate_points(point_scores: np.ndarray, truth: np.ndarray, method: str) -> dict:
    finite = np.isfinite(point_scores)
    threshold = scoring.threshold_three_sigma(point_scores[finite])
    flags = point_scores > threshold
    summary = metrics_summary(confusion(flags, truth))
    summary["method"] = method
    summary["threshold"] = threshold
    return summary


def run_comparison(model: aae.AAEModel, norm: NormalizationParams,
                   train_series: TimeSeries, attacked_series: TimeSeries,
                   truth_labels: np.ndarray, window_size: int, step_size: int,
                   train_cfg: aae.TrainConfig, baseline_cfg: BaselineConfig | None = None,
                   detectors: tuple[str, ...] = BASELINE_KINDS) -> ComparisonResult:
    """Score the trained adversarial model and every requested baseline on the
    same attacked test series, with identical preprocessing and thresholds."""
    baseline_cfg = baseline_cfg or BaselineConfig()
    train_norm = normalize(train_series, norm)
    test_norm = normalize(attacked_series, norm)
    train_windows = make_windows(train_norm, window_size, step_size)
    test_windows = make_windows(test_norm, window_size, step_size)
    n_points = len(attacked_series)
    result = ComparisonResult()

    detection = scoring.detect(model, attacked_series, window_size, step_size, norm=norm)
    summary = metrics_summary(confusion(detection.flags, truth_labels))
    summary["method"] = "aae"
    summary["threshold"] = detection.threshold
    result.rows.append(summary)

    cfg = model.config
    fit_kwargs = dict(epochs=train_cfg.epochs, batch_size=train_cfg.batch_size,
                      learning_rate=train_cfg.learning_rate, decay=train_cfg.lr_decay,
                      l2_coeff=train_cfg.l2_coeff, seed=train_cfg.seed,
                      full_pass=train_cfg.full_pass)
    for kind in detectors:
        if kind == "ae_lstm":
            det = build_ae_lstm(window_size, cfg.latent_dim, cfg.encoder_lstm_units,
                                cfg.decoder_lstm_units, cfg.dropout_rate, seed=train_cfg.seed)
            det.fit(train_windows.windows, **fit_kwargs)
            w_scores = det.window_scores(test_windows.windows)
        elif kind == "ae_cnn":
            det = build_ae_cnn(window_size, cfg.latent_dim, cfg.dropout_rate, seed=train_cfg.seed)
            det.fit(train_windows.windows, **fit_kwargs)
            w_scores = det.window_scores(test_windows.windows)
        elif kind == "ae_fc":
            det = build_ae_fc(window_size, cfg.latent_dim, cfg.dropout_rate, seed=train_cfg.seed)
            det.fit(train_windows.windows, **fit_kwargs)
            w_scores = det.window_scores(test_windows.windows)
        elif kind == "kmeans":
            det = KMeansDetector(baseline_cfg.kmeans_k, seed=train_cfg.seed)
            det.fit(train_windows.windows)
            w_scores = det.window_scores(test_windows.windows)
        elif kind == "linreg":
            det = LinRegDetector(baseline_cfg.linreg_window, baseline_cfg.linreg_step)
            det.fit(train_norm.values)
            points = det.point_scores(test_norm.values)
            result.rows.append(_evaluate_points(points, truth_labels, "linreg"))
            continue
        elif kind == "ocsvm":
            stride = max(1, int(np.ceil(len(train_windows) / baseline_cfg.ocsvm_max_train)))
            det = OneClassSVMDetector(baseline_cfg.ocsvm_nu, baseline_cfg.ocsvm_gamma,
                                      baseline_cfg.ocsvm_coef0, baseline_cfg.ocsvm_tol,
                                      baseline_cfg.ocsvm_max_iter)
            det.fit(train_windows.windows[::stride])
            w_scores = det.window_scores(test_windows.windows)
        else:
            raise ValueError(f"unknown detector kind {kind!r}")
        points = scoring.windows_to_points(w_scores, test_windows.starts, window_size, n_points)
        result.rows.append(_evaluate_points(points, truth_labels, kind))
    return result
