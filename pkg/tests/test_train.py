"""Training loop: dataset sampling, determinism, normalization freezing,
convergence at reference scale, and the finite-difference harness."""

import math

import numpy as np
import pytest

import noma_ae as na
from noma_ae.channel import STREAM_INIT, stream_rng
from noma_ae.model import NomaAutoencoder, end_to_end_forward
from noma_ae.train import EpochStats, gradient_check


def tiny_config(**kw):
    base = dict(
        dims=na.SystemDims(k=(1, 1), n=2),
        weights=na.LossWeights((0.5, 0.5)),
        channel=na.ChannelSpec.from_delta(15.0, 9.0, 2),
        batch_size=200,
        dataset_size=1000,
        epochs=3,
        seed=11,
    )
    base.update(kw)
    return na.TrainingConfig(**base)


# -- config validation --------------------------------------------------------


def test_config_rejects_batch_larger_than_dataset():
    with pytest.raises(ValueError, match="batch_size"):
        tiny_config(batch_size=2000, dataset_size=1000)


def test_config_rejects_weight_count_mismatch():
    with pytest.raises(ValueError, match="weight"):
        tiny_config(weights=na.LossWeights((1.0,)))


def test_config_rejects_channel_mismatch():
    with pytest.raises(ValueError, match="channel"):
        tiny_config(channel=na.ChannelSpec((15.0,)))


def test_config_defaults_are_reference_values():
    cfg = tiny_config()
    assert cfg.alpha == 0.0009
    assert cfg.beta1 == 0.9
    assert cfg.beta2 == 0.999
    assert na.TrainingConfig.batch_size == 3000
    assert na.TrainingConfig.dataset_size == 100_000
    assert na.TrainingConfig.epochs == 150


# -- dataset sampling ---------------------------------------------------------


def test_dataset_uniformity():
    dims = na.SystemDims(k=(2, 2), n=2)
    data = na.sample_dataset(dims, 100_000, np.random.default_rng(0))
    counts = np.bincount(data, minlength=16)
    expected = 100_000 / 16
    sigma = math.sqrt(100_000 * (1 / 16) * (15 / 16))
    assert np.all(np.abs(counts - expected) < 5 * sigma)


def test_dataset_deterministic_given_seed():
    dims = na.SystemDims(k=(2, 2), n=2)
    a = na.sample_dataset(dims, 1000, stream_rng(5, 1))
    b = na.sample_dataset(dims, 1000, stream_rng(5, 1))
    np.testing.assert_array_equal(a, b)


def test_dataset_degenerate_single_message():
    dims = na.SystemDims(k=(0,), n=1)
    data = na.sample_dataset(dims, 100, np.random.default_rng(0))
    assert np.all(data == 0)


def test_dataset_size_validated():
    with pytest.raises(ValueError):
        na.sample_dataset(na.SystemDims(k=(1,), n=1), 0, np.random.default_rng(0))


# -- training loop ------------------------------------------------------------


def test_train_returns_trace_per_epoch():
    model, trace = na.train(tiny_config())
    assert len(trace) == 3
    assert [s.epoch for s in trace] == [1, 2, 3]
    for s in trace:
        assert math.isfinite(s.mean_loss)
        assert len(s.per_user_ce) == 2
        assert all(isinstance(c, float) for c in s.per_user_ce)


def test_train_equal_weights_loss_is_mean_of_user_ces():
    _, trace = na.train(tiny_config())
    for s in trace:
        assert s.mean_loss == pytest.approx(
            0.5 * (s.per_user_ce[0] + s.per_user_ce[1]), rel=1e-12
        )


def test_train_bit_identical_reruns():
    m1, t1 = na.train(tiny_config())
    m2, t2 = na.train(tiny_config())
    assert t1 == t2
    for a, b in zip(m1.parameters(), m2.parameters()):
        np.testing.assert_array_equal(a, b)
    assert m1.normalization_scale == m2.normalization_scale


def test_train_seed_changes_outcome():
    _, t1 = na.train(tiny_config(seed=1))
    _, t2 = na.train(tiny_config(seed=2))
    assert t1[-1].mean_loss != t2[-1].mean_loss


def test_zero_epochs_returns_initialized_model():
    cfg = tiny_config(epochs=0)
    model, trace = na.train(cfg)
    assert trace == []
    fresh = NomaAutoencoder.build(
        cfg.dims, stream_rng(cfg.seed, STREAM_INIT), sic_chaining=True
    )
    for a, b in zip(model.parameters(), fresh.parameters()):
        np.testing.assert_array_equal(a, b)
    # normalization is still frozen so the model is usable
    assert model.normalization_scale is not None


def test_training_loss_decreases_overall():
    model, trace = na.train(tiny_config(epochs=30, seed=0))
    assert trace[-1].mean_loss < trace[0].mean_loss


def test_divergence_guard_raises_on_nan():
    cfg = tiny_config()
    model = NomaAutoencoder.build(cfg.dims, stream_rng(0, STREAM_INIT))
    model.encoder.layers[0].weights[0, 0] = math.nan
    idx = np.zeros(4, dtype=np.int64)
    noise = [np.zeros((4, 2)), np.zeros((4, 2))]
    with pytest.raises(ArithmeticError):
        end_to_end_forward(model, idx, cfg.channel, cfg.weights, noise=noise)


# -- normalization freezing ---------------------------------------------------


def test_freeze_normalization_power_exact():
    model = NomaAutoencoder.build(
        na.SystemDims(k=(2, 2), n=2), np.random.default_rng(3)
    )
    na.freeze_normalization(model)
    table = model.constellation_table()
    assert np.mean(np.sum(table * table, axis=1)) == pytest.approx(2.0, abs=1e-9)


def test_freeze_normalization_scale_invariance():
    # scaling every encoder output by 3 before freezing gives the same table
    m1 = NomaAutoencoder.build(na.SystemDims(k=(2, 2), n=2), np.random.default_rng(4))
    m2 = NomaAutoencoder.build(na.SystemDims(k=(2, 2), n=2), np.random.default_rng(4))
    m2.encoder.layers[-1].weights *= 3.0
    m2.encoder.layers[-1].biases *= 3.0
    na.freeze_normalization(m1)
    na.freeze_normalization(m2)
    np.testing.assert_allclose(
        m1.constellation_table(), m2.constellation_table(), atol=1e-12
    )


def test_freeze_normalization_degenerate_zero_encoder():
    model = NomaAutoencoder.build(na.SystemDims(k=(1, 1), n=2), np.random.default_rng(0))
    for layer in model.encoder.layers:
        layer.weights[...] = 0.0
        layer.biases[...] = 0.0
    with pytest.raises(ArithmeticError, match="zero"):
        na.freeze_normalization(model)


# -- reference-scale convergence ----------------------------------------------


def test_full_weight_on_user1_trains_well_past_uniform(lambda10_model):
    # all loss weight on user 1 at equal 6 dB: final user-1 training CE
    # at least 10x below the uniform-prediction level ln(4)
    _, trace = lambda10_model
    assert trace[-1].per_user_ce[0] < 1.3862943611198906 / 10.0


def test_full_weight_training_leaves_user2_near_uniform(lambda10_model):
    # the zero-weight user's CE stays around ln(4): its decoder gets no
    # gradient, so it cannot beat chance by much
    _, trace = lambda10_model
    assert trace[-1].per_user_ce[1] > 1.0


# -- finite-difference harness ------------------------------------------------


def test_gradient_check_small_model_tight():
    dims = na.SystemDims(k=(1, 1), n=2)
    model = NomaAutoencoder.build(dims, stream_rng(3, STREAM_INIT))
    channel = na.ChannelSpec.from_delta(15.0, 9.0, 2)
    weights = na.LossWeights((0.3, 0.7))
    rng = np.random.default_rng(8)
    idx = rng.integers(0, dims.M_c, 50)
    noise = [
        rng.normal(0.0, math.sqrt(s2), size=(50, 2)) for s2 in channel.sigma2
    ]
    err, name = gradient_check(model, channel, weights, idx, noise)
    assert err < 1e-5
    assert name  # a parameter is always identified


def test_epoch_stats_are_plain_data():
    s = EpochStats(epoch=1, mean_loss=0.5, per_user_ce=(0.4, 0.6))
    assert s == EpochStats(1, 0.5, (0.4, 0.6))
