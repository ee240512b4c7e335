"""Experiment configuration: dotted key-value files, typed access, CLI overrides.

The on-disk format is one `section.key = value` per line; `#` starts a
comment. Every knob can also be overridden on the command line by a flag of
the same dotted name.
"""

from __future__ import annotations

import math

# key -> (type tag, default). Tags: int, float, str, bool, ints, strs.
SCHEMA: dict[str, tuple[str, object]] = {
    "data.source": ("str", "synthetic"),
    "data.csv_path": ("str", ""),
    "data.channel": ("str", "channel0"),
    "synthetic.length": ("int", 10080),
    "synthetic.base": ("float", 1.0),
    "synthetic.daily_amplitude": ("float", 0.2),
    "synthetic.noise_std": ("float", 0.01),
    "split.train_fraction": ("float", 0.8),
    "normalize.low": ("float", -1.0),
    "normalize.high": ("float", 1.0),
    "window.size": ("int", 40),
    "window.step": ("int", 1),
    "attack.kind": ("str", "combined"),
    "attack.delta": ("float", 0.05),
    "attack.fraction": ("float", 0.05),
    "attack.segments": ("int", 4),
    "attack.placement": ("str", "spread"),
    "attack.segments_list": ("str", ""),
    "attack.per_point_uniform": ("bool", False),
    "aae.latent_dim": ("int", 20),
    "aae.encoder_units": ("ints", (40, 40, 40)),
    "aae.decoder_units": ("ints", (40, 80, 40, 20)),
    "aae.dropout": ("float", 0.2),
    "aae.critic_x_filters": ("int", 32),
    "aae.critic_x_kernel": ("int", 5),
    "aae.critic_z_filters": ("int", 16),
    "aae.critic_z_kernel": ("int", 3),
    "aae.leaky_slope": ("float", 0.2),
    "train.epochs": ("int", 2000),
    "train.batch_size": ("int", 64),
    "train.n_critic": ("int", 5),
    "train.learning_rate": ("float", 0.001),
    "train.lr_decay": ("float", 0.99),
    "train.gp_coeff": ("float", 10.0),
    "train.l2_coeff": ("float", 1e-4),
    "train.reconstruction_form": ("str", "l2"),
    "train.full_pass": ("bool", False),
    "score.orientation": ("str", "negate_cs"),
    "compare.detectors": ("strs", ("ae_lstm", "ae_cnn", "ae_fc", "kmeans", "linreg", "ocsvm")),
    "kmeans.k": ("int", 32),
    "linreg.window": ("int", 72),
    "linreg.step": ("int", 36),
    "ocsvm.nu": ("float", 0.05),
    "ocsvm.gamma": ("float", 0.0),
    "ocsvm.coef0": ("float", 0.0),
    "ocsvm.max_train": ("int", 2000),
    "run.seed": ("int", 0),
    "run.out_dir": ("str", "out"),
}


class ConfigError(ValueError):
    """Unknown key, missing key, or unparsable value."""


def _parse_value(key: str, tag: str, text: str):
    text = text.strip()
    try:
        if tag == "int":
            return int(text)
        if tag == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
        if tag == "bool":
            if text.lower() in ("true", "1", "yes", "on"):
                return True
            if text.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError
        if tag == "ints":
            return tuple(int(p) for p in text.split(",") if p.strip()) if text else ()
        if tag == "strs":
            return tuple(p.strip() for p in text.split(",") if p.strip()) if text else ()
        return text
    except ValueError:
        raise ConfigError(f"cannot parse value {text!r} for key {key!r} (expected {tag})")


def _format_value(tag: str, value) -> str:
    if tag in ("ints", "strs"):
        return ",".join(str(v) for v in value)
    if tag == "bool":
        return "true" if value else "false"
    if tag == "float":
        return repr(float(value))
    return str(value)


class ExperimentConfig:
    """Typed view over the full knob set, with schema defaults filled in."""

    def __init__(self, values: dict | None = None):
        self._values = {key: default for key, (_tag, default) in SCHEMA.items()}
        for key, value in (values or {}).items():
            self.set(key, value)

    def __getitem__(self, key: str):
        try:
            return self._values[key]
        except KeyError:
            raise ConfigError(f"unknown config key {key!r}")

    def set(self, key: str, value) -> None:
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        tag = SCHEMA[key][0]
        if isinstance(value, str):
            value = _parse_value(key, tag, value)
        self._values[key] = value

    def as_dict(self) -> dict:
        return dict(self._values)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentConfig) and self._values == other._values

    def serialize(self) -> str:
        lines = []
        section = None
        for key, (tag, _default) in SCHEMA.items():
            head = key.split(".", 1)[0]
            if head != section:
                if section is not None:
                    lines.append("")
                section = head
            lines.append(f"{key} = {_format_value(tag, self._values[key])}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.serialize())

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {line_no}: expected 'section.key = value', got {raw!r}")
            key, _, value = line.partition("=")
            cfg.set(key.strip(), value.strip())
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return cls.parse(fh.read())
        except FileNotFoundError:
            raise FileNotFoundError(f"config file not found: {path}")

    def apply_overrides(self, overrides: dict[str, str]) -> None:
        for key, value in overrides.items():
            self.set(key, value)
