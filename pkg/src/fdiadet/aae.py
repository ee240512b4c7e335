"""Adversarial autoencoder: architecture, losses, gradient penalty, training loop.

An LSTM encoder/decoder pair reconstructs measurement windows while two
convolutional Wasserstein critics police the latent codes and the
reconstructions. Each training epoch draws one window batch and one prior
batch, runs n_critic critic updates with both generator networks frozen, then
one encoder and one decoder update against the combined objective.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from fdiadet.nn import LayerSpec, Network, ParamSet
from fdiadet.optim import OptimizerState, adam_step
from fdiadet.timeseries import WindowSet

MODEL_SCHEMA_VERSION = 1

# Step used by the central-difference estimate of the gradient-penalty
# second-order term. The critics are piecewise linear, so the estimate is
# exact away from activation kinks.
_GP_FD_EPS = 1e-6


class TrainingDivergenceError(RuntimeError):
    """A training loss went non-finite; message names the epoch and term."""


@dataclass(frozen=True)
class AAEConfig:
    """Architecture knobs. Defaults follow the reference setup: a three-layer
    40-unit LSTM encoder, a 40/80/40/20 LSTM decoder with a per-step tanh
    head, and one-conv-plus-dense critics with LeakyReLU."""

    window_size: int = 40
    latent_dim: int = 20
    norm_low: float = -1.0
    norm_high: float = 1.0
    encoder_lstm_units: tuple[int, ...] = (40, 40, 40)
    decoder_lstm_units: tuple[int, ...] = (40, 80, 40, 20)
    dropout_rate: float = 0.2
    critic_x_filters: int = 32
    critic_x_kernel: int = 5
    critic_z_filters: int = 16
    critic_z_kernel: int = 3
    leaky_slope: float = 0.2

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ValueError(f"latent_dim must be positive, got {self.latent_dim}")
        if self.window_size < 1:
            raise ValueError(f"window_size must be positive, got {self.window_size}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if not self.encoder_lstm_units or not self.decoder_lstm_units:
            raise ValueError("encoder and decoder need at least one LSTM layer each")
        object.__setattr__(self, "encoder_lstm_units", tuple(int(u) for u in self.encoder_lstm_units))
        object.__setattr__(self, "decoder_lstm_units", tuple(int(u) for u in self.decoder_lstm_units))


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs for the adversarial loop."""

    epochs: int = 2000
    batch_size: int = 64
    n_critic: int = 5
    learning_rate: float = 0.001
    lr_decay: float = 0.99
    gp_coeff: float = 10.0
    l2_coeff: float = 1e-4
    seed: int = 0
    reconstruction_form: str = "l2"
    full_pass: bool = False
    fake_mode: str = "inference"

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1 or self.n_critic < 1:
            raise ValueError("batch_size and n_critic must be positive")
        if self.reconstruction_form not in ("l2", "mse"):
            raise ValueError(f"reconstruction_form must be 'l2' or 'mse', got {self.reconstruction_form!r}")
        if self.fake_mode not in ("inference", "dropout"):
            raise ValueError(f"fake_mode must be 'inference' or 'dropout', got {self.fake_mode!r}")


@dataclass
class AAEModel:
    """Encoder, decoder and the two critics, plus training provenance."""

    encoder: Network
    decoder: Network
    critic_x: Network
    critic_z: Network
    config: AAEConfig
    seed: int
    epochs_completed: int = 0


@dataclass
class TrainReport:
    """Per-epoch loss trajectory of one train() call."""

    epochs: list[int] = field(default_factory=list)
    loss_ae: list[float] = field(default_factory=list)
    loss_cx: list[float] = field(default_factory=list)
    loss_cz: list[float] = field(default_factory=list)
    loss_enc: list[float] = field(default_factory=list)
    loss_dec: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    def append(self, epoch, ae, cx, cz, enc, dec, secs):
        self.epochs.append(int(epoch))
        self.loss_ae.append(float(ae))
        self.loss_cx.append(float(cx))
        self.loss_cz.append(float(cz))
        self.loss_enc.append(float(enc))
        self.loss_dec.append(float(dec))
        self.seconds.append(float(secs))

    def __len__(self) -> int:
        return len(self.epochs)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("epoch,loss_ae,loss_cx,loss_cz,loss_enc,loss_dec\n")
            for row in zip(self.epochs, self.loss_ae, self.loss_cx, self.loss_cz,
                           self.loss_enc, self.loss_dec):
                fh.write(f"{row[0]}," + ",".join(repr(v) for v in row[1:]) + "\n")

    @classmethod
    def from_csv(cls, path) -> "TrainReport":
        report = cls()
        with open(path) as fh:
            next(fh)
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) == 6:
                    report.append(int(parts[0]), *[float(p) for p in parts[1:]], 0.0)
        return report


def _encoder_specs(cfg: AAEConfig) -> list[LayerSpec]:
    specs: list[LayerSpec] = []
    units = cfg.encoder_lstm_units
    for idx, u in enumerate(units):
        last = idx == len(units) - 1
        specs.append(LayerSpec("lstm", units=u, return_sequences=not last))
        specs.append(LayerSpec("dropout", rate=cfg.dropout_rate))
    specs.append(LayerSpec("dense", units=cfg.latent_dim))
    return specs


def _decoder_specs(cfg: AAEConfig) -> list[LayerSpec]:
    specs: list[LayerSpec] = []
    for idx, u in enumerate(cfg.decoder_lstm_units):
        repeat = cfg.window_size if idx == 0 else 0
        specs.append(LayerSpec("lstm", units=u, return_sequences=True, repeat_input=repeat))
        specs.append(LayerSpec("dropout", rate=cfg.dropout_rate))
    specs.append(LayerSpec("dense", units=1, time_distributed=True))
    specs.append(LayerSpec("activation", activation="tanh"))
    return specs


def _critic_specs(filters: int, kernel: int, slope: float, dropout: float) -> list[LayerSpec]:
    return [
        LayerSpec("conv1d", filters=filters, kernel_size=kernel),
        LayerSpec("activation", activation="leaky_relu", slope=slope),
        LayerSpec("dropout", rate=dropout),
        LayerSpec("dense", units=1),
    ]


def build_model(config: AAEConfig, seed: int) -> AAEModel:
    """Deterministically initialize the four networks from one seed."""
    children = np.random.SeedSequence(seed).spawn(4)
    encoder = Network(_encoder_specs(config), (config.window_size, 1),
                      np.random.default_rng(children[0]))
    decoder = Network(_decoder_specs(config), (config.latent_dim,),
                      np.random.default_rng(children[1]))
    critic_x = Network(_critic_specs(config.critic_x_filters, config.critic_x_kernel,
                                     config.leaky_slope, config.dropout_rate),
                       (config.window_size, 1), np.random.default_rng(children[2]))
    critic_z = Network(_critic_specs(config.critic_z_filters, config.critic_z_kernel,
                                     config.leaky_slope, config.dropout_rate),
                       (config.latent_dim, 1), np.random.default_rng(children[3]))
    return AAEModel(encoder=encoder, decoder=decoder, critic_x=critic_x,
                    critic_z=critic_z, config=config, seed=seed)


def _as_batch(x, width: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != width:
        raise ValueError(f"expected vectors of length {width}, got {x.shape[1]}")
    return x, single


def encode(model: AAEModel, windows) -> np.ndarray:
    """Map windows to latent codes (inference mode, dropout off)."""
    x, single = _as_batch(windows, model.config.window_size)
    z = model.encoder.forward(x[:, :, None])
    return z[0] if single else z


def decode(model: AAEModel, latents) -> np.ndarray:
    """Map latent codes back to windows; outputs lie in the tanh range (-1, 1)."""
    z, single = _as_batch(latents, model.config.latent_dim)
    y = model.decoder.forward(z)[:, :, 0]
    return y[0] if single else y


def reconstruct(model: AAEModel, windows) -> np.ndarray:
    """decode(encode(windows)); the reconstruction used for anomaly scoring."""
    x, single = _as_batch(windows, model.config.window_size)
    y = model.decoder.forward(model.encoder.forward(x[:, :, None]))[:, :, 0]
    return y[0] if single else y


def critic_x_values(model: AAEModel, windows) -> np.ndarray:
    """Raw realness scores of the window critic (inference mode)."""
    x, single = _as_batch(windows, model.config.window_size)
    y = model.critic_x.forward(x[:, :, None])[:, 0]
    return float(y[0]) if single else y


def critic_z_values(model: AAEModel, latents) -> np.ndarray:
    z, single = _as_batch(latents, model.config.latent_dim)
    y = model.critic_z.forward(z[:, :, None])[:, 0]
    return float(y[0]) if single else y


def loss_ae(model: AAEModel, windows, l2_coeff: float = 0.0) -> float:
    """Mean squared reconstruction error over all elements, plus the optional
    squared-weight penalty over encoder and decoder parameters."""
    x, _ = _as_batch(windows, model.config.window_size)
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    rec = reconstruct(model, x)
    value = float(np.mean((x - rec) ** 2))
    if l2_coeff:
        value += l2_coeff * (model.encoder.params.l2_sum() + model.decoder.params.l2_sum())
    return value


def wasserstein_loss_z(model: AAEModel, real_batch, z_batch) -> float:
    """Mean critic score over prior samples minus mean over encoded windows."""
    x, _ = _as_batch(real_batch, model.config.window_size)
    z, _ = _as_batch(z_batch, model.config.latent_dim)
    enc = model.encoder.forward(x[:, :, None])
    return float(np.mean(model.critic_z.forward(z[:, :, None])[:, 0])
                 - np.mean(model.critic_z.forward(enc[:, :, None])[:, 0]))


def wasserstein_loss_x(model: AAEModel, real_batch, z_batch) -> float:
    """Mean critic score over real windows minus mean over decoded prior samples."""
    x, _ = _as_batch(real_batch, model.config.window_size)
    z, _ = _as_batch(z_batch, model.config.latent_dim)
    fake = model.decoder.forward(z)[:, :, 0]
    return float(np.mean(model.critic_x.forward(x[:, :, None])[:, 0])
                 - np.mean(model.critic_x.forward(fake[:, :, None])[:, 0]))


def _expand(batch) -> np.ndarray:
    """Lift (features,) or (batch, features) to the (batch, steps, 1) layout
    the critics consume; 3-D input passes through unchanged."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim == 1:
        batch = batch[None, :]
    if batch.ndim == 2:
        batch = batch[:, :, None]
    return batch


def gradient_penalty(critic: Network, real_sample, fake_sample, gp_coeff: float, rng) -> float:
    """Penalty pushing the critic's input-gradient norm toward 1.

    Interpolates real and fake per sample with a uniform draw, measures the
    L2 norm of the critic gradient at the interpolate, and returns
    gp_coeff * mean((norm - 1)^2). Dropout stays off: the Lipschitz surrogate
    is measured on the deterministic critic.
    """
    value, _, _ = _gradient_penalty_pieces(critic, real_sample, fake_sample, gp_coeff, rng)
    return value


def _gradient_penalty_pieces(critic: Network, real_sample, fake_sample, gp_coeff: float, rng):
    real = _expand(real_sample)
    fake = _expand(fake_sample)
    if real.shape != fake.shape:
        raise ValueError(f"shape mismatch: real {real.shape} vs fake {fake.shape}")
    u = rng.random((real.shape[0], 1, 1))
    xhat = u * real + (1.0 - u) * fake
    grads_in = critic.input_gradients(xhat)
    norms = np.sqrt(np.sum(grads_in ** 2, axis=(1, 2)))
    value = gp_coeff * float(np.mean((norms - 1.0) ** 2))
    return value, xhat, (grads_in, norms)


def _gradient_penalty_param_grads(critic: Network, xhat, grads_in, norms, gp_coeff: float) -> ParamSet:
    """Parameter gradient of the penalty via a central-difference estimate of
    the second-order term: d/dtheta (v . grad_x C) for the fixed direction
    v = grad / ||grad||, evaluated as [grad_theta C(x+eps v) - grad_theta C(x-eps v)] / 2eps.
    """
    b = xhat.shape[0]
    nz = norms > 0.0
    weights = np.zeros(b)
    weights[nz] = gp_coeff * 2.0 * (norms[nz] - 1.0) / b
    v = np.zeros_like(grads_in)
    v[nz] = grads_in[nz] / norms[nz, None, None]
    eps = _GP_FD_EPS
    per_sample = (weights / (2.0 * eps))[:, None]
    _, caches = critic.forward_with_cache(xhat + eps * v)
    _, g_plus = critic.backward(caches, per_sample)
    _, caches = critic.forward_with_cache(xhat - eps * v)
    _, g_minus = critic.backward(caches, -per_sample)
    g_plus.add_scaled(g_minus, 1.0)
    return g_plus


def critic_update(critic: Network, opt: OptimizerState, real, fake,
                  gp_coeff: float, rng, training: bool = True) -> float:
    """One descent step on the critic loss mean C(fake) - mean C(real) + penalty."""
    real = _expand(real)
    fake = _expand(fake)
    b = real.shape[0]
    y_fake, caches_fake = critic.forward_with_cache(fake, training=training, rng=rng)
    _, g_fake = critic.backward(caches_fake, np.full((b, 1), 1.0 / b))
    y_real, caches_real = critic.forward_with_cache(real, training=training, rng=rng)
    _, g_real = critic.backward(caches_real, np.full((b, 1), -1.0 / b))
    gp_value, xhat, (grads_in, norms) = _gradient_penalty_pieces(critic, real, fake, gp_coeff, rng)
    g_gp = _gradient_penalty_param_grads(critic, xhat, grads_in, norms, gp_coeff)
    g_fake.add_scaled(g_real, 1.0)
    g_fake.add_scaled(g_gp, 1.0)
    loss = float(np.mean(y_fake) - np.mean(y_real)) + gp_value
    adam_step(opt, critic.params, g_fake)
    return loss


def _recon_term(x3, rec3, form: str):
    """Value and d(value)/d(rec) of the reconstruction term."""
    r = x3 - rec3
    if form == "l2":
        norms = np.sqrt(np.sum(r ** 2, axis=(1, 2)))
        value = float(np.sum(norms))
        d_rec = np.zeros_like(r)
        nz = norms > 0.0
        d_rec[nz] = -r[nz] / norms[nz, None, None]
        return value, d_rec
    value = float(np.mean(r ** 2))
    d_rec = -2.0 * r / r.size
    return value, d_rec


def generator_objective(model: AAEModel, x_batch, z_batch,
                        reconstruction_form: str = "l2") -> float:
    """The per-step objective the encoder and decoder updates descend:
    both Wasserstein terms plus the reconstruction term (inference mode)."""
    x, _ = _as_batch(x_batch, model.config.window_size)
    z, _ = _as_batch(z_batch, model.config.latent_dim)
    rec = reconstruct(model, x)
    value, _ = _recon_term(x[:, :, None], rec[:, :, None], reconstruction_form)
    return wasserstein_loss_x(model, x, z) + wasserstein_loss_z(model, x, z) + value


def encoder_update(model: AAEModel, opt: OptimizerState, x_batch, z_batch,
                   config: TrainConfig, rng) -> float:
    """One descent step of the encoder against the combined objective.

    Only the latent-critic term and the reconstruction term carry encoder
    gradient; the remaining terms contribute value only. Frozen networks run
    in inference mode, the encoder applies dropout.
    """
    cfg = model.config
    x3 = _expand(x_batch)
    z = np.asarray(z_batch, dtype=np.float64)
    b = x3.shape[0]
    z_enc, caches_e = model.encoder.forward_with_cache(x3, training=True, rng=rng)
    y_cz_enc, caches_cz = model.critic_z.forward_with_cache(z_enc[:, :, None])
    rec3, caches_d = model.decoder.forward_with_cache(z_enc)
    recon_value, d_rec = _recon_term(x3, rec3, config.reconstruction_form)

    value = float(np.mean(model.critic_x.forward(x3)[:, 0])
                  - np.mean(model.critic_x.forward(model.decoder.forward(z))[:, 0])
                  + np.mean(model.critic_z.forward(z[:, :, None])[:, 0])
                  - np.mean(y_cz_enc[:, 0])) + recon_value

    dz_from_dec, _ = model.decoder.backward(caches_d, d_rec)
    dz_from_cz, _ = model.critic_z.backward(caches_cz, np.full((b, 1), -1.0 / b))
    dz = dz_from_dec + dz_from_cz[:, :, 0]
    _, grads_e = model.encoder.backward(caches_e, dz)
    if config.reconstruction_form == "mse" and config.l2_coeff:
        value += config.l2_coeff * (model.encoder.params.l2_sum() + model.decoder.params.l2_sum())
        grads_e.add_scaled(model.encoder.params, 2.0 * config.l2_coeff)
    adam_step(opt, model.encoder.params, grads_e)
    return value


def decoder_update(model: AAEModel, opt: OptimizerState, x_batch, z_batch,
                   config: TrainConfig, rng) -> float:
    """One descent step of the decoder; mirror of encoder_update with gradient
    through the window-critic term and the reconstruction term."""
    cfg = model.config
    x3 = _expand(x_batch)
    z = np.asarray(z_batch, dtype=np.float64)
    b = x3.shape[0]
    z_enc = model.encoder.forward(x3)
    rec3, caches_drec = model.decoder.forward_with_cache(z_enc, training=True, rng=rng)
    fake3, caches_dfake = model.decoder.forward_with_cache(z, training=True, rng=rng)
    y_cx_fake, caches_cx = model.critic_x.forward_with_cache(fake3)
    recon_value, d_rec = _recon_term(x3, rec3, config.reconstruction_form)

    value = float(np.mean(model.critic_x.forward(x3)[:, 0])
                  - np.mean(y_cx_fake[:, 0])
                  + np.mean(model.critic_z.forward(z[:, :, None])[:, 0])
                  - np.mean(model.critic_z.forward(z_enc[:, :, None])[:, 0])) + recon_value

    d_fake, _ = model.critic_x.backward(caches_cx, np.full((b, 1), -1.0 / b))
    _, grads_fake = model.decoder.backward(caches_dfake, d_fake)
    _, grads_rec = model.decoder.backward(caches_drec, d_rec)
    grads_fake.add_scaled(grads_rec, 1.0)
    if config.reconstruction_form == "mse" and config.l2_coeff:
        value += config.l2_coeff * (model.encoder.params.l2_sum() + model.decoder.params.l2_sum())
        grads_fake.add_scaled(model.decoder.params, 2.0 * config.l2_coeff)
    adam_step(opt, model.decoder.params, grads_fake)
    return value


def _check_finite(value: float, term: str, epoch: int) -> float:
    if not np.isfinite(value):
        raise TrainingDivergenceError(f"non-finite {term} loss at epoch {epoch}: {value}")
    return value


def train(model: AAEModel, train_windows: WindowSet, config: TrainConfig) -> tuple[AAEModel, TrainReport]:
    """Run the adversarial loop; deterministic for a fixed config seed.

    One epoch is one batch draw, n_critic critic update pairs, one encoder
    update and one decoder update; full_pass instead sweeps every window once
    per epoch in shuffled batches.
    """
    x_all = np.asarray(train_windows.windows, dtype=np.float64)
    n = x_all.shape[0]
    if n == 0:
        raise ValueError("empty window set")
    if x_all.shape[1] != model.config.window_size:
        raise ValueError(f"windows of length {x_all.shape[1]} do not match model window {model.config.window_size}")
    report = TrainReport()
    if config.epochs == 0:
        return model, report
    rng = np.random.default_rng(config.seed)
    latent = model.config.latent_dim
    b = config.batch_size
    opts = {name: OptimizerState(learning_rate=config.learning_rate, decay=config.lr_decay)
            for name in ("encoder", "decoder", "critic_x", "critic_z")}
    start_epoch = model.epochs_completed
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        for opt in opts.values():
            opt.epoch = start_epoch + epoch
        if config.full_pass:
            order = rng.permutation(n)
            batches = [order[i:i + b] for i in range(0, n, b)]
        else:
            batches = [rng.integers(0, n, size=b) if b > n else
                       rng.choice(n, size=b, replace=False)]
        sums = np.zeros(5)
        for idx in batches:
            x = x_all[idx]
            z = rng.standard_normal((len(idx), latent))
            if config.fake_mode == "dropout":
                # Frozen weights, stochastic regularization left on: critics
                # then see near-manifold perturbations as fakes, which keeps
                # them sensitive to small off-manifold deviations.
                x_fake = model.decoder.forward(z, training=True, rng=rng)[:, :, 0]
                z_enc = model.encoder.forward(x[:, :, None], training=True, rng=rng)
            else:
                x_fake = decode(model, z)
                z_enc = encode(model, x)
            for _ in range(config.n_critic):
                loss_cx = critic_update(model.critic_x, opts["critic_x"], x, x_fake,
                                        config.gp_coeff, rng)
                loss_cz = critic_update(model.critic_z, opts["critic_z"], z, z_enc,
                                        config.gp_coeff, rng)
            _check_finite(loss_cx, "critic_x", epoch)
            _check_finite(loss_cz, "critic_z", epoch)
            loss_enc = _check_finite(encoder_update(model, opts["encoder"], x, z, config, rng),
                                     "encoder", epoch)
            loss_dec = _check_finite(decoder_update(model, opts["decoder"], x, z, config, rng),
                                     "decoder", epoch)
            ae = _check_finite(loss_ae(model, x, config.l2_coeff), "autoencoder", epoch)
            sums += (ae, loss_cx, loss_cz, loss_enc, loss_dec)
        sums /= len(batches)
        report.append(start_epoch + epoch, *sums, time.perf_counter() - t0)
        model.epochs_completed = start_epoch + epoch + 1
    return model, report


def _network_doc(net: Network) -> dict:
    return {
        "specs": [asdict(spec) for spec in net.specs],
        "input_shape": list(net.input_shape),
        "params": {name: {"shape": list(arr.shape), "data": arr.ravel().tolist()}
                   for name, arr in net.params.items()},
    }


def _network_from_doc(doc: dict) -> Network:
    specs = [LayerSpec(**spec) for spec in doc["specs"]]
    net = Network(specs, tuple(doc["input_shape"]), np.random.default_rng(0))
    for name, entry in doc["params"].items():
        net.params[name] = np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
    return net


def save_model(model: AAEModel, path, pipeline: dict | None = None) -> None:
    """Serialize the model (and optional pipeline metadata) as versioned JSON."""
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": "aae",
        "seed": model.seed,
        "epochs_completed": model.epochs_completed,
        "config": asdict(model.config),
        "pipeline": pipeline or {},
        "networks": {
            "encoder": _network_doc(model.encoder),
            "decoder": _network_doc(model.decoder),
            "critic_x": _network_doc(model.critic_x),
            "critic_z": _network_doc(model.critic_z),
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> tuple[AAEModel, dict]:
    """Load a model bundle; rejects unknown schema versions."""
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema version {version!r} in {path} "
                         f"(expected {MODEL_SCHEMA_VERSION})")
    cfg_doc = dict(doc["config"])
    cfg_doc["encoder_lstm_units"] = tuple(cfg_doc["encoder_lstm_units"])
    cfg_doc["decoder_lstm_units"] = tuple(cfg_doc["decoder_lstm_units"])
    config = AAEConfig(**cfg_doc)
    model = AAEModel(
        encoder=_network_from_doc(doc["networks"]["encoder"]),
        decoder=_network_from_doc(doc["networks"]["decoder"]),
        critic_x=_network_from_doc(doc["networks"]["critic_x"]),
        critic_z=_network_from_doc(doc["networks"]["critic_z"]),
        config=config,
        seed=doc["seed"],
        epochs_completed=doc["epochs_completed"],
    )
    return model, doc.get("pipeline", {})
