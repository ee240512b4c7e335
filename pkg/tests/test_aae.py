import numpy as np
import pytest

from fdiadet.aae import (
    AAEConfig,
    TrainConfig,
    TrainReport,
    TrainingDivergenceError,
    build_model,
    encode,
    decode,
    reconstruct,
    critic_x_values,
    loss_ae,
    wasserstein_loss_z,
    wasserstein_loss_x,
    gradient_penalty,
    generator_objective,
    critic_update,
    encoder_update,
    decoder_update,
    train,
    save_model,
    load_model,
    _gradient_penalty_pieces,
    _gradient_penalty_param_grads,
)
from fdiadet.nn import LayerSpec, Network, finite_difference_gradient
from fdiadet.optim import OptimizerState
from fdiadet.timeseries import make_windows


TINY = AAEConfig(window_size=8, latent_dim=3, encoder_lstm_units=(4, 4),
                 decoder_lstm_units=(4, 5), dropout_rate=0.0,
                 critic_x_filters=3, critic_x_kernel=3,
                 critic_z_filters=2, critic_z_kernel=2)


def tiny_model(seed=0, dropout=0.0):
    cfg = TINY if dropout == 0.0 else AAEConfig(
        **{**TINY.__dict__, "dropout_rate": dropout})
    return build_model(cfg, seed)


def scalar_critic(width, weights, bias=0.0):
    """Critic computing a fixed linear functional of its flattened input."""
    net = Network([LayerSpec("dense", units=1)], (width, 1), 0)
    net.params["l00_dense.W"] = np.asarray(weights, dtype=float).reshape(width, 1)
    net.params["l00_dense.b"] = np.array([bias])
    return net


class TestBuildModel:
    def test_shapes(self):
        model = tiny_model()
        z = encode(model, np.zeros(8))
        assert z.shape == (3,)
        w = decode(model, z)
        assert w.shape == (8,)

    def test_deterministic_init(self):
        a = tiny_model(seed=5)
        b = tiny_model(seed=5)
        for name in ("encoder", "decoder", "critic_x", "critic_z"):
            assert np.array_equal(getattr(a, name).params.to_flat(),
                                  getattr(b, name).params.to_flat())

    def test_different_seeds_differ(self):
        assert not np.array_equal(tiny_model(seed=1).encoder.params.to_flat(),
                                  tiny_model(seed=2).encoder.params.to_flat())

    def test_zero_latent_rejected(self):
        with pytest.raises(ValueError):
            AAEConfig(latent_dim=0)


class TestCodecs:
    def test_reconstruct_deterministic(self):
        model = tiny_model()
        x = np.random.default_rng(1).uniform(-1, 1, size=(4, 8))
        assert np.array_equal(reconstruct(model, x), reconstruct(model, x))

    def test_decode_bounded_by_tanh(self):
        model = tiny_model()
        z = np.random.default_rng(2).normal(scale=10.0, size=(16, 3))
        out = decode(model, z)
        assert np.all(out > -1.0) and np.all(out < 1.0)

    def test_reconstruct_is_decode_of_encode(self):
        model = tiny_model()
        x = np.random.default_rng(3).uniform(-1, 1, size=(5, 8))
        assert np.allclose(reconstruct(model, x), decode(model, encode(model, x)))

    def test_shape_mismatch(self):
        model = tiny_model()
        with pytest.raises(ValueError):
            encode(model, np.zeros(9))


class TestLossAe:
    def test_matches_manual_mse(self):
        model = tiny_model()
        x = np.random.default_rng(4).uniform(-1, 1, size=(6, 8))
        rec = reconstruct(model, x)
        assert loss_ae(model, x) == pytest.approx(float(np.mean((x - rec) ** 2)))

    def test_constant_offset_is_one_under_mean_convention(self):
        model = tiny_model()
        # Zero the decoder head so every reconstruction is tanh(b) = 0.5.
        head = [n for n in model.decoder.params.names if n.endswith("dense.W")][0]
        bias = head[:-1] + "b"
        model.decoder.params[head] = np.zeros_like(model.decoder.params[head])
        model.decoder.params[bias] = np.array([np.arctanh(0.5)])
        x = np.full((3, 8), 1.5)
        assert loss_ae(model, x) == pytest.approx(1.0)

    def test_regularizer_isolated(self):
        model = tiny_model()
        head = [n for n in model.decoder.params.names if n.endswith("dense.W")][0]
        bias = head[:-1] + "b"
        model.decoder.params[head] = np.zeros_like(model.decoder.params[head])
        model.decoder.params[bias] = np.array([np.arctanh(0.25)])
        x = np.full((2, 8), 0.25)
        lam = 1e-3
        expected = lam * (model.encoder.params.l2_sum() + model.decoder.params.l2_sum())
        assert loss_ae(model, x, l2_coeff=lam) == pytest.approx(expected)

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            loss_ae(tiny_model(), np.zeros((0, 8)))


class TestWassersteinLosses:
    def test_constant_critic_z_cancels(self):
        model = tiny_model()
        model.critic_z = scalar_critic(3, np.zeros(3), bias=4.2)
        x = np.random.default_rng(5).uniform(-1, 1, size=(6, 8))
        z = np.random.default_rng(6).normal(size=(6, 3))
        assert wasserstein_loss_z(model, x, z) == pytest.approx(0.0)

    def test_projection_critic_z(self):
        model = tiny_model()
        model.critic_z = scalar_critic(3, [1.0, 0.0, 0.0])
        v = np.array([0.7, -0.3, 0.2])
        dense_w = [n for n in model.encoder.params.names if n.endswith("dense.W")][0]
        dense_b = dense_w[:-1] + "b"
        model.encoder.params[dense_w] = np.zeros_like(model.encoder.params[dense_w])
        model.encoder.params[dense_b] = v.copy()
        x = np.random.default_rng(7).uniform(-1, 1, size=(5, 8))
        z = np.zeros((5, 3))
        assert wasserstein_loss_z(model, x, z) == pytest.approx(-v[0])

    def test_constant_critic_x_cancels(self):
        model = tiny_model()
        model.critic_x = scalar_critic(8, np.zeros(8), bias=-1.7)
        x = np.random.default_rng(8).uniform(-1, 1, size=(4, 8))
        z = np.random.default_rng(9).normal(size=(4, 3))
        assert wasserstein_loss_x(model, x, z) == pytest.approx(0.0)

    def test_mean_critic_x(self):
        model = tiny_model()
        model.critic_x = scalar_critic(8, np.full(8, 1.0 / 8.0))
        head = [n for n in model.decoder.params.names if n.endswith("dense.W")][0]
        bias = head[:-1] + "b"
        model.decoder.params[head] = np.zeros_like(model.decoder.params[head])
        model.decoder.params[bias] = np.zeros(1)
        x = np.ones((6, 8))
        z = np.random.default_rng(10).normal(size=(6, 3))
        assert wasserstein_loss_x(model, x, z) == pytest.approx(1.0)

    def test_term_by_term_oracle(self):
        model = tiny_model(seed=3)
        rng = np.random.default_rng(11)
        x = rng.uniform(-1, 1, size=(7, 8))
        z = rng.normal(size=(7, 3))
        cz = lambda v: float(model.critic_z.forward(np.asarray(v)[None, :, None])[0, 0])
        cx = lambda w: float(model.critic_x.forward(np.asarray(w)[None, :, None])[0, 0])
        enc = encode(model, x)
        fake = decode(model, z)
        wz = np.mean([cz(zi) for zi in z]) - np.mean([cz(ei) for ei in enc])
        wx = np.mean([cx(xi) for xi in x]) - np.mean([cx(fi) for fi in fake])
        assert wasserstein_loss_z(model, x, z) == pytest.approx(wz, abs=1e-12)
        assert wasserstein_loss_x(model, x, z) == pytest.approx(wx, abs=1e-12)


class TestGradientPenalty:
    def test_unit_slope_critic_zero_penalty(self):
        critic = scalar_critic(1, [1.0])
        value = gradient_penalty(critic, np.array([[0.3]]), np.array([[0.9]]),
                                 10.0, np.random.default_rng(0))
        assert value == 0.0

    def test_constant_critic_full_penalty(self):
        critic = scalar_critic(1, [0.0], bias=2.0)
        value = gradient_penalty(critic, np.array([[0.3]]), np.array([[0.9]]),
                                 10.0, np.random.default_rng(0))
        assert value == 10.0

    def test_slope_two_critic(self):
        critic = scalar_critic(1, [2.0])
        value = gradient_penalty(critic, np.array([[0.1]]), np.array([[0.5]]),
                                 7.0, np.random.default_rng(0))
        assert value == pytest.approx(7.0)

    def test_penalty_nonnegative(self):
        rng = np.random.default_rng(12)
        critic = Network([LayerSpec("conv1d", filters=2, kernel_size=3),
                          LayerSpec("activation", activation="leaky_relu"),
                          LayerSpec("dense", units=1)], (8, 1), 13)
        for _ in range(50):
            value = gradient_penalty(critic, rng.uniform(-1, 1, (4, 8)),
                                     rng.uniform(-1, 1, (4, 8)), 10.0, rng)
            assert value >= 0.0

    def test_param_gradient_matches_finite_differences(self):
        critic = Network([LayerSpec("conv1d", filters=2, kernel_size=3),
                          LayerSpec("activation", activation="leaky_relu"),
                          LayerSpec("dense", units=1)], (6, 1), 14)
        rng = np.random.default_rng(15)
        xhat = rng.uniform(-1, 1, size=(3, 6, 1))
        coeff = 10.0

        def penalty_at(params):
            saved = critic.params
            critic.params = params
            grads_in = critic.input_gradients(xhat)
            critic.params = saved
            norms = np.sqrt(np.sum(grads_in ** 2, axis=(1, 2)))
            return coeff * float(np.mean((norms - 1.0) ** 2))

        grads_in = critic.input_gradients(xhat)
        norms = np.sqrt(np.sum(grads_in ** 2, axis=(1, 2)))
        analytic = _gradient_penalty_param_grads(critic, xhat, grads_in, norms, coeff)
        numeric = finite_difference_gradient(penalty_at, critic.params, h=1e-5)
        a, n = analytic.to_flat(), numeric.to_flat()
        rel = np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), 1e-8)
        assert np.max(rel) < 1e-4


class TestUpdates:
    def _batches(self, rng, b=5):
        return rng.uniform(-1, 1, size=(b, 8)), rng.normal(size=(b, 3))

    def test_critic_update_freezes_generators(self):
        model = tiny_model(seed=9)
        rng = np.random.default_rng(16)
        x, z = self._batches(rng)
        enc_before = model.encoder.params.to_flat()
        dec_before = model.decoder.params.to_flat()
        cx_before = model.critic_x.params.to_flat()
        critic_update(model.critic_x, OptimizerState(), x, decode(model, z), 10.0, rng)
        assert np.array_equal(model.encoder.params.to_flat(), enc_before)
        assert np.array_equal(model.decoder.params.to_flat(), dec_before)
        assert not np.array_equal(model.critic_x.params.to_flat(), cx_before)

    def test_encoder_update_freezes_others(self):
        model = tiny_model(seed=9)
        rng = np.random.default_rng(17)
        x, z = self._batches(rng)
        frozen = {n: getattr(model, n).params.to_flat()
                  for n in ("decoder", "critic_x", "critic_z")}
        enc_before = model.encoder.params.to_flat()
        encoder_update(model, OptimizerState(), x, z, TrainConfig(epochs=1), rng)
        for name, flat in frozen.items():
            assert np.array_equal(getattr(model, name).params.to_flat(), flat)
        assert not np.array_equal(model.encoder.params.to_flat(), enc_before)

    def test_decoder_update_freezes_others(self):
        model = tiny_model(seed=9)
        rng = np.random.default_rng(18)
        x, z = self._batches(rng)
        frozen = {n: getattr(model, n).params.to_flat()
                  for n in ("encoder", "critic_x", "critic_z")}
        decoder_update(model, OptimizerState(), x, z, TrainConfig(epochs=1), rng)
        for name, flat in frozen.items():
            assert np.array_equal(getattr(model, name).params.to_flat(), flat)

    def test_update_values_match_pure_objective(self):
        # With dropout off, the value each update descends equals the
        # recomposed objective: both Wasserstein terms plus reconstruction.
        model = tiny_model(seed=21)
        rng = np.random.default_rng(19)
        x, z = self._batches(rng)
        cfg = TrainConfig(epochs=1)
        expected = generator_objective(model, x, z, cfg.reconstruction_form)
        got = encoder_update(model, OptimizerState(), x, z, cfg, rng)
        assert got == pytest.approx(expected, abs=1e-10)
        expected2 = generator_objective(model, x, z, cfg.reconstruction_form)
        got2 = decoder_update(model, OptimizerState(), x, z, cfg, rng)
        assert got2 == pytest.approx(expected2, abs=1e-10)

    def test_objective_recomposition(self):
        model = tiny_model(seed=22)
        rng = np.random.default_rng(20)
        x, z = self._batches(rng, b=6)
        rec = reconstruct(model, x)
        recon = float(np.sum(np.sqrt(np.sum((x - rec) ** 2, axis=1))))
        total = wasserstein_loss_x(model, x, z) + wasserstein_loss_z(model, x, z) + recon
        assert generator_objective(model, x, z) == pytest.approx(total, abs=1e-10)

    def test_encoder_gradient_matches_finite_differences(self):
        model = tiny_model(seed=23)
        rng = np.random.default_rng(21)
        x, z = self._batches(rng, b=3)
        cfg = TrainConfig(epochs=1)

        def objective(params):
            saved = model.encoder.params
            model.encoder.params = params
            value = generator_objective(model, x, z, cfg.reconstruction_form)
            model.encoder.params = saved
            return value

        numeric = finite_difference_gradient(objective, model.encoder.params, h=1e-5)
        # Recover the analytic gradient from one SGD-free probe: run the update
        # with a tiny learning rate and invert the Adam step direction is not
        # exact, so call the internals the update uses instead.
        x3 = x[:, :, None]
        z_enc, caches_e = model.encoder.forward_with_cache(x3)
        y_cz, caches_cz = model.critic_z.forward_with_cache(z_enc[:, :, None])
        rec3, caches_d = model.decoder.forward_with_cache(z_enc)
        r = x3 - rec3
        norms = np.sqrt(np.sum(r ** 2, axis=(1, 2)))
        d_rec = np.zeros_like(r)
        nz = norms > 0
        d_rec[nz] = -r[nz] / norms[nz, None, None]
        dz_dec, _ = model.decoder.backward(caches_d, d_rec)
        dz_cz, _ = model.critic_z.backward(caches_cz, np.full((len(x), 1), -1.0 / len(x)))
        _, analytic = model.encoder.backward(caches_e, dz_dec + dz_cz[:, :, 0])
        a, n = analytic.to_flat(), numeric.to_flat()
        rel = np.abs(a - n) / np.maximum(np.abs(a) + np.abs(n), 1e-6)
        assert np.max(rel) < 1e-4


class TestTrain:
    def _windows(self, n=30, width=8, seed=24):
        rng = np.random.default_rng(seed)
        base = np.sin(np.linspace(0, 6 * np.pi, n + width))
        series = base + rng.normal(0, 0.05, size=n + width)
        return make_windows(series, width, 1)

    def test_zero_epochs_noop(self):
        model = tiny_model(seed=1)
        before = model.encoder.params.to_flat()
        out, report = train(model, self._windows(), TrainConfig(epochs=0))
        assert len(report) == 0
        assert np.array_equal(out.encoder.params.to_flat(), before)

    def test_deterministic_under_seed(self):
        cfg = TrainConfig(epochs=3, batch_size=8, n_critic=2, seed=5)
        m1, r1 = train(tiny_model(seed=2), self._windows(), cfg)
        m2, r2 = train(tiny_model(seed=2), self._windows(), cfg)
        for name in ("encoder", "decoder", "critic_x", "critic_z"):
            assert np.array_equal(getattr(m1, name).params.to_flat(),
                                  getattr(m2, name).params.to_flat())
        assert r1.loss_enc == r2.loss_enc

    def test_report_rows_and_epoch_count(self):
        model = tiny_model(seed=3)
        model, report = train(model, self._windows(), TrainConfig(epochs=4, batch_size=8, seed=1))
        assert len(report) == 4
        assert model.epochs_completed == 4
        assert report.epochs == [0, 1, 2, 3]

    def test_batch_larger_than_windows_samples_with_replacement(self):
        model = tiny_model(seed=4)
        _, report = train(model, self._windows(n=5), TrainConfig(epochs=2, batch_size=16, seed=2))
        assert len(report) == 2

    def test_divergence_reported_with_epoch_and_term(self):
        model = tiny_model(seed=5)
        flat = model.encoder.params.to_flat()
        flat[0] = np.nan
        model.encoder.params.from_flat(flat)
        with pytest.raises(TrainingDivergenceError, match="epoch 0"):
            train(model, self._windows(), TrainConfig(epochs=1, batch_size=4, seed=3))

    def test_full_pass_mode(self):
        model = tiny_model(seed=6)
        _, report = train(model, self._windows(n=20),
                          TrainConfig(epochs=2, batch_size=8, n_critic=1, seed=4, full_pass=True))
        assert len(report) == 2

    def test_mse_reconstruction_form(self):
        model = tiny_model(seed=7)
        _, report = train(model, self._windows(n=12),
                          TrainConfig(epochs=2, batch_size=6, n_critic=1, seed=5,
                                      reconstruction_form="mse"))
        assert len(report) == 2
        assert np.isfinite(report.loss_enc).all()

    def test_mismatched_window_width(self):
        model = tiny_model()
        with pytest.raises(ValueError, match="window"):
            train(model, make_windows(np.zeros(40), 10, 1), TrainConfig(epochs=1))


class TestSerialization:
    def test_round_trip_bitwise(self, tmp_path):
        model = tiny_model(seed=8)
        model, _ = train(model, make_windows(np.sin(np.arange(30.0)), 8, 1),
                         TrainConfig(epochs=2, batch_size=4, n_critic=1, seed=6))
        path = tmp_path / "model.json"
        save_model(model, path, pipeline={"x_min": 0.0, "x_max": 1.0})
        loaded, pipeline = load_model(path)
        assert pipeline == {"x_min": 0.0, "x_max": 1.0}
        assert loaded.epochs_completed == model.epochs_completed
        for name in ("encoder", "decoder", "critic_x", "critic_z"):
            assert np.array_equal(getattr(loaded, name).params.to_flat(),
                                  getattr(model, name).params.to_flat())
        x = np.random.default_rng(25).uniform(-1, 1, size=(3, 8))
        assert np.array_equal(reconstruct(loaded, x), reconstruct(model, x))

    def test_save_is_deterministic(self, tmp_path):
        model = tiny_model(seed=9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_model(model, p1)
        save_model(model, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_schema_rejected(self, tmp_path):
        model = tiny_model(seed=10)
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = path.read_text().replace('"schema_version": 1', '"schema_version": 99', 1)
        path.write_text(doc)
        with pytest.raises(ValueError, match="schema version"):
            load_model(path)


class TestReportCsv:
    def test_round_trip(self, tmp_path):
        report = TrainReport()
        report.append(0, 1.0, -0.5, -0.2, 3.0, 2.5, 0.1)
        report.append(1, 0.8, -0.4, -0.1, 2.0, 1.5, 0.1)
        path = tmp_path / "report.csv"
        report.to_csv(path)
        back = TrainReport.from_csv(path)
        assert back.epochs == report.epochs
        assert back.loss_ae == report.loss_ae
        assert back.loss_dec == report.loss_dec
