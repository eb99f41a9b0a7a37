"""SNR bookkeeping, AWGN sampling, and the seeded stream layout."""

import numpy as np
import pytest

from noma_ae.channel import (
    STREAM_EVAL,
    STREAM_TRAIN,
    ChannelSpec,
    awgn,
    snr_to_sigma2,
    stream_rng,
)


def test_sigma2_at_zero_db():
    assert snr_to_sigma2(0.0) == 1.0


def test_sigma2_at_six_db():
    assert snr_to_sigma2(6.0) == pytest.approx(0.251188643150958, rel=1e-15)


def test_sigma2_ratio_between_regimes():
    # 6 dB worse channel -> 10^0.9 times the noise power of 15 dB
    ratio = snr_to_sigma2(6.0) / snr_to_sigma2(15.0)
    assert ratio == pytest.approx(7.943282347242816, rel=1e-12)


def test_sigma2_rejects_non_finite():
    with pytest.raises(ValueError):
        snr_to_sigma2(float("nan"))


def test_awgn_zero_variance_is_identity_copy():
    x = np.ones((4, 2))
    y = awgn(x, 0.0, np.random.default_rng(0))
    assert np.array_equal(y, x)
    assert y is not x


def test_awgn_negative_variance_rejected():
    with pytest.raises(ValueError):
        awgn(np.zeros((2, 2)), -0.1, np.random.default_rng(0))


def test_awgn_empirical_variance():
    rng = np.random.default_rng(11)
    x = np.zeros((200_000, 2))
    y = awgn(x, 0.25, rng)
    assert np.var(y) == pytest.approx(0.25, rel=0.02)
    assert np.mean(y) == pytest.approx(0.0, abs=0.005)


def test_stream_rng_reproducible():
    a = stream_rng(123, STREAM_TRAIN, 4, 7, 1).normal(size=10)
    b = stream_rng(123, STREAM_TRAIN, 4, 7, 1).normal(size=10)
    np.testing.assert_array_equal(a, b)


def test_stream_rng_paths_distinct():
    a = stream_rng(123, STREAM_TRAIN, 0, 0, 1).normal(size=1000)
    b = stream_rng(123, STREAM_TRAIN, 0, 0, 2).normal(size=1000)
    c = stream_rng(123, STREAM_EVAL, 0, 0).normal(size=1000)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # distinct streams are decorrelated
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_stream_rng_seed_matters():
    a = stream_rng(1, STREAM_EVAL, 0, 0).normal(size=8)
    b = stream_rng(2, STREAM_EVAL, 0, 0).normal(size=8)
    assert not np.array_equal(a, b)


def test_channel_spec_from_delta():
    ch = ChannelSpec.from_delta(15.0, 9.0, 2)
    assert ch.snr_db == (15.0, 6.0)
    assert ch.gains == (1.0, 1.0)
    assert ch.users == 2


def test_channel_spec_from_delta_three_users():
    ch = ChannelSpec.from_delta(15.0, 9.0, 3)
    assert ch.snr_db == (15.0, 6.0, -3.0)


def test_channel_spec_zero_delta_equal_entries():
    ch = ChannelSpec.from_delta(12.0, 0.0, 2)
    assert ch.snr_db[0] == ch.snr_db[1]


def test_channel_spec_sigma2_property():
    ch = ChannelSpec((0.0, 10.0))
    assert ch.sigma2 == pytest.approx((1.0, 0.1))


def test_channel_spec_gains_length_checked():
    with pytest.raises(ValueError):
        ChannelSpec((1.0, 2.0), gains=(1.0,))
