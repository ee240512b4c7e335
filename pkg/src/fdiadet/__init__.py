"""Unsupervised detection of false data injection attacks in univariate grid measurements.

The package covers the full desk-scale pipeline: synthetic or CSV measurement
ingestion, attack injection with ground-truth labels, adversarial training of
an LSTM autoencoder policed by two Wasserstein critics, DTW-based anomaly
scoring with three-sigma thresholding, confusion-matrix metrics, and six
comparison detectors.
"""

__version__ = "0.1.0"

from fdiadet.timeseries import (
    TimeSeries,
    NormalizationParams,
    WindowSet,
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
from fdiadet.attacks import (
    AttackSpec,
    AttackedSeries,
    inject_deductive,
    inject_additive,
    inject_combined,
    verify_stealth,
)
from fdiadet.aae import (
    AAEConfig,
    TrainConfig,
    AAEModel,
    TrainReport,
    build_model,
    encode,
    decode,
    reconstruct,
    loss_ae,
    wasserstein_loss_z,
    wasserstein_loss_x,
    gradient_penalty,
    train,
)
from fdiadet.scoring import (
    AnomalyScores,
    Detection,
    dtw_distance,
    reconstruction_errors,
    critic_scores,
    zscore,
    anomaly_scores,
    threshold_three_sigma,
    windows_to_points,
    score_series,
    detect,
)
from fdiadet.metrics import Confusion, confusion, accuracy, precision, recall, f1

__all__ = [
    "TimeSeries",
    "NormalizationParams",
    "WindowSet",
    "load_csv",
    "save_csv",
    "load_labels",
    "save_labels",
    "synthesize_profile",
    "fit_normalizer",
    "normalize",
    "denormalize",
    "split",
    "make_windows",
    "AttackSpec",
    "AttackedSeries",
    "inject_deductive",
    "inject_additive",
    "inject_combined",
    "verify_stealth",
    "AAEConfig",
    "TrainConfig",
    "AAEModel",
    "TrainReport",
    "build_model",
    "encode",
    "decode",
    "reconstruct",
    "loss_ae",
    "wasserstein_loss_z",
    "wasserstein_loss_x",
    "gradient_penalty",
    "train",
    "AnomalyScores",
    "Detection",
    "dtw_distance",
    "reconstruction_errors",
    "critic_scores",
    "zscore",
    "anomaly_scores",
    "threshold_three_sigma",
    "windows_to_points",
    "score_series",
    "detect",
    "Confusion",
    "confusion",
    "accuracy",
    "precision",
    "recall",
    "f1",
]
