"""Command-line orchestration: generate | attack | train | detect | evaluate | compare | report.

Every command reads one config (file plus dotted overrides), writes its
artifacts into the output directory, and is idempotent for fixed inputs and
seeds. Errors exit nonzero with a single `error: ...` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from fdiadet import aae, baselines, report, scoring
from fdiadet.attacks import AttackSpec, inject, verify_stealth
from fdiadet.config import ConfigError, ExperimentConfig
from fdiadet.metrics import confusion, metrics_summary
from fdiadet.timeseries import (
    TimeSeries,
    NormalizationParams,
    fit_normalizer,
    load_csv,
    load_labels,
    make_windows,
    normalize,
    save_csv,
    save_labels,
    split,
    synthesize_profile,
)

COMMANDS = ("generate", "attack", "train", "detect", "evaluate", "compare", "report")


class MissingArtifactError(FileNotFoundError):
    pass


def _out_dir(cfg: ExperimentConfig) -> Path:
    path = Path(cfg["run.out_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require(path: Path, producer: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"missing artifact {path} (run `fdiadet {producer}` first)")
    return path


def _load_series(cfg: ExperimentConfig) -> TimeSeries:
    if cfg["data.source"] == "csv":
        if not cfg["data.csv_path"]:
            raise ConfigError("data.source is 'csv' but data.csv_path is empty")
        return load_csv(cfg["data.csv_path"], channel=cfg["data.channel"])
    return synthesize_profile(cfg["synthetic.length"], cfg["synthetic.base"],
                              cfg["synthetic.daily_amplitude"], cfg["synthetic.noise_std"],
                              seed=cfg["run.seed"], channel=cfg["data.channel"])


def _attack_spec(cfg: ExperimentConfig, test_length: int) -> AttackSpec:
    common = dict(kind=cfg["attack.kind"], delta=cfg["attack.delta"],
                  per_point_uniform=cfg["attack.per_point_uniform"],
                  draw_seed=cfg["run.seed"] + 1)
    explicit = cfg["attack.segments_list"]
    if explicit:
        segments = tuple(tuple(int(v) for v in part.split(":")) for part in explicit.split(";"))
        return AttackSpec(segments=segments, **common)
    count = cfg["attack.segments"]
    total = max(count, int(round(cfg["attack.fraction"] * test_length)))
    length = max(1, total // count)
    if cfg["attack.placement"] == "random":
        return AttackSpec(segment_count=count, segment_length=length,
                          placement_seed=cfg["run.seed"] + 2, **common)
    if cfg["attack.placement"] != "spread":
        raise ConfigError(f"unknown attack.placement {cfg['attack.placement']!r}")
    gap = test_length // count
    if length > gap:
        raise ConfigError(f"{count} segments of {length} points do not fit {test_length} samples")
    segments = tuple((i * gap + (gap - length) // 2, length) for i in range(count))
    return AttackSpec(segments=segments, **common)


def _aae_config(cfg: ExperimentConfig) -> aae.AAEConfig:
    return aae.AAEConfig(
        window_size=cfg["window.size"],
        latent_dim=cfg["aae.latent_dim"],
        norm_low=cfg["normalize.low"],
        norm_high=cfg["normalize.high"],
        encoder_lstm_units=cfg["aae.encoder_units"],
        decoder_lstm_units=cfg["aae.decoder_units"],
        dropout_rate=cfg["aae.dropout"],
        critic_x_filters=cfg["aae.critic_x_filters"],
        critic_x_kernel=cfg["aae.critic_x_kernel"],
        critic_z_filters=cfg["aae.critic_z_filters"],
        critic_z_kernel=cfg["aae.critic_z_kernel"],
        leaky_slope=cfg["aae.leaky_slope"],
    )


def _train_config(cfg: ExperimentConfig) -> aae.TrainConfig:
    return aae.TrainConfig(
        epochs=cfg["train.epochs"],
        batch_size=cfg["train.batch_size"],
        n_critic=cfg["train.n_critic"],
        learning_rate=cfg["train.learning_rate"],
        lr_decay=cfg["train.lr_decay"],
        gp_coeff=cfg["train.gp_coeff"],
        l2_coeff=cfg["train.l2_coeff"],
        seed=cfg["run.seed"],
        reconstruction_form=cfg["train.reconstruction_form"],
        full_pass=cfg["train.full_pass"],
    )


def _baseline_config(cfg: ExperimentConfig) -> baselines.BaselineConfig:
    return baselines.BaselineConfig(
        kmeans_k=cfg["kmeans.k"],
        linreg_window=cfg["linreg.window"],
        linreg_step=cfg["linreg.step"],
        ocsvm_nu=cfg["ocsvm.nu"],
        ocsvm_gamma=cfg["ocsvm.gamma"] or None,
        ocsvm_coef0=cfg["ocsvm.coef0"],
        ocsvm_max_train=cfg["ocsvm.max_train"],
    )


def _norm_from_pipeline(pipeline: dict) -> NormalizationParams:
    return NormalizationParams(x_min=pipeline["x_min"], x_max=pipeline["x_max"],
                               low=pipeline["low"], high=pipeline["high"])


def cmd_generate(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    series = _load_series(cfg)
    save_csv(series, out / "data.csv")
    print(f"wrote {out / 'data.csv'} ({len(series)} samples)")


def cmd_attack(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    series = load_csv(_require(out / "data.csv", "generate"))
    train_series, test_series = split(series, cfg["split.train_fraction"])
    spec = _attack_spec(cfg, len(test_series))
    attacked = inject(test_series, spec)
    if not verify_stealth(test_series, attacked):
        raise RuntimeError("injected attack failed the stealth bound check")
    full_values = np.concatenate([train_series.values, attacked.series.values])
    full_labels = np.concatenate([np.zeros(len(train_series), dtype=bool), attacked.labels])
    save_csv(series.with_values(full_values), out / "attacked.csv")
    save_labels(series.timestamps, full_labels, out / "labels.csv", kind=series.timestamp_kind)
    print(f"wrote {out / 'attacked.csv'} and {out / 'labels.csv'} "
          f"({int(attacked.labels.sum())} attacked points)")


def cmd_train(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    series = load_csv(_require(out / "data.csv", "generate"))
    train_series, _test = split(series, cfg["split.train_fraction"])
    norm = fit_normalizer(train_series, cfg["normalize.low"], cfg["normalize.high"])
    windows = make_windows(normalize(train_series, norm), cfg["window.size"], cfg["window.step"])
    model = aae.build_model(_aae_config(cfg), seed=cfg["run.seed"])
    model, train_report = aae.train(model, windows, _train_config(cfg))
    pipeline = {
        "x_min": norm.x_min, "x_max": norm.x_max, "low": norm.low, "high": norm.high,
        "window_size": cfg["window.size"], "step_size": cfg["window.step"],
        "train_fraction": cfg["split.train_fraction"],
        "orientation": cfg["score.orientation"],
    }
    aae.save_model(model, out / "model.json", pipeline=pipeline)
    train_report.to_csv(out / "train_report.csv")
    print(f"wrote {out / 'model.json'} after {model.epochs_completed} epochs")


def cmd_detect(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    model, pipeline = aae.load_model(_require(out / "model.json", "train"))
    attacked = load_csv(_require(out / "attacked.csv", "attack"))
    _train_part, test_series = split(attacked, pipeline["train_fraction"])
    norm = _norm_from_pipeline(pipeline)
    window_size = pipeline["window_size"]
    step_size = pipeline["step_size"]
    orientation = pipeline.get("orientation", "negate_cs")
    windows, scores = scoring.score_series(model, test_series, window_size, step_size,
                                           norm=norm, orientation=orientation)
    points = scoring.windows_to_points(scores.a, windows.starts, window_size, len(test_series))
    covered = np.isfinite(points)
    threshold = scoring.threshold_three_sigma(points[covered])
    flags = points > threshold
    with open(out / "scores.csv", "w", newline="") as fh:
        fh.write("window_start,RE,CS,zRE,zCS,A\n")
        for i in range(len(windows)):
            row = [scores.re[i], scores.cs[i], scores.z_re[i], scores.z_cs[i], scores.a[i]]
            fh.write(f"{int(windows.starts[i])}," + ",".join(repr(float(v)) for v in row) + "\n")
    save_labels(test_series.timestamps, flags, out / "detections.csv",
                kind=test_series.timestamp_kind)
    summary = {
        "threshold": threshold,
        "rule": "max-window/three-sigma",
        "orientation": orientation,
        "window_size": window_size,
        "step_size": step_size,
        "test_length": len(test_series),
        "windows": len(windows),
        "flagged_points": int(flags.sum()),
    }
    with open(out / "detect.json", "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out / 'scores.csv'} and {out / 'detections.csv'} "
          f"({int(flags.sum())} flagged points)")


def cmd_evaluate(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    flags = load_labels(_require(out / "detections.csv", "detect"))
    truth_full = load_labels(_require(out / "labels.csv", "attack"))
    if len(truth_full) < len(flags):
        raise RuntimeError(f"labels.csv has {len(truth_full)} rows but detections.csv has {len(flags)}")
    truth = truth_full[-len(flags):]
    summary = metrics_summary(confusion(flags, truth))
    with open(out / "metrics.json", "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    md = ("| accuracy | precision | recall | f1 |\n"
          "|----------|-----------|--------|----|\n"
          "| {accuracy:.4f} | {precision:.4f} | {recall:.4f} | {f1:.4f} |\n").format(**summary)
    (out / "metrics.md").write_text(md)
    print(f"accuracy={summary['accuracy']:.4f} precision={summary['precision']:.4f} "
          f"recall={summary['recall']:.4f} f1={summary['f1']:.4f}")


def cmd_compare(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    model, pipeline = aae.load_model(_require(out / "model.json", "train"))
    clean = load_csv(_require(out / "data.csv", "generate"))
    attacked = load_csv(_require(out / "attacked.csv", "attack"))
    truth_full = load_labels(_require(out / "labels.csv", "attack"))
    train_series, _ = split(clean, pipeline["train_fraction"])
    _, test_attacked = split(attacked, pipeline["train_fraction"])
    truth = truth_full[-len(test_attacked):]
    norm = _norm_from_pipeline(pipeline)
    result = baselines.run_comparison(
        model, norm, train_series, test_attacked, truth,
        pipeline["window_size"], pipeline["step_size"],
        _train_config(cfg), _baseline_config(cfg),
        detectors=tuple(cfg["compare.detectors"]),
    )
    result.to_csv(out / "comparison.csv")
    (out / "comparison.md").write_text(result.to_markdown())
    print(result.to_markdown(), end="")


def cmd_report(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    model, pipeline = aae.load_model(_require(out / "model.json", "train"))
    train_report = aae.TrainReport.from_csv(_require(out / "train_report.csv", "train"))
    attacked = load_csv(_require(out / "attacked.csv", "attack"))
    with open(_require(out / "detect.json", "detect")) as fh:
        detect_meta = json.load(fh)
    _, test_series = split(attacked, pipeline["train_fraction"])
    labels_path = out / "labels.csv"
    labels = load_labels(labels_path)[-len(test_series):] if labels_path.exists() else None
    starts, a_scores = [], []
    with open(_require(out / "scores.csv", "detect")) as fh:
        next(fh)
        for line in fh:
            parts = line.strip().split(",")
            starts.append(int(parts[0]))
            a_scores.append(float(parts[5]))
    norm = _norm_from_pipeline(pipeline)
    report.plot_losses(train_report, out / "report_loss.svg")
    report.plot_reconstruction(model, test_series, norm, pipeline["window_size"],
                               pipeline["step_size"], out / "report_reconstruction.svg",
                               labels=labels)
    report.plot_scores(np.array(a_scores), np.array(starts), pipeline["window_size"],
                       len(test_series), detect_meta["threshold"],
                       out / "report_scores.svg", labels=labels)
    print(f"wrote {out / 'report_loss.svg'}, {out / 'report_reconstruction.svg'}, "
          f"{out / 'report_scores.svg'}")


_DISPATCH = {
    "generate": cmd_generate,
    "attack": cmd_attack,
    "train": cmd_train,
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "report": cmd_report,
}


def _split_overrides(extras: list[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    i = 0
    while i < len(extras):
        token = extras[i]
        if not token.startswith("--") or "." not in token:
            raise ConfigError(f"unrecognized argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, _, value = key.partition("=")
        else:
            if i + 1 >= len(extras):
                raise ConfigError(f"flag --{key} expects a value")
            i += 1
            value = extras[i]
        overrides[key] = value
        i += 1
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fdiadet",
        description="Falsified-measurement detection experiments: synthesis, attack "
                    "injection, adversarial training, scoring, and comparisons.",
        allow_abbrev=False,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to a section.key = value config file")
    parser.add_argument("--seed", type=int, help="override run.seed")
    parser.add_argument("--out", help="override run.out_dir")
    args, extras = parser.parse_known_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        cfg.apply_overrides(_split_overrides(extras))
        if args.seed is not None:
            cfg.set("run.seed", args.seed)
        if args.out is not None:
            cfg.set("run.out_dir", args.out)
        _DISPATCH[args.command](cfg)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # surface one parsable line, no traceback
        message = str(exc).replace("\n", " ")
        print(f"error: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
