"""AWGN links and SNR bookkeeping for the L base-station-to-user channels.

SNR convention: the encoder output has unit average power per real
dimension (enforced by the power-normalization layer), so a per-user SNR
of s dB means a per-real-dimension noise variance of 10^(-s/10).  The
alternative per-complex-pair convention would shift every curve by 3 dB;
this one is used consistently everywhere in the package.

Randomness: all noise comes from counter-based Philox streams keyed by
(seed, stream path).  A path is a short tuple of small ints; distinct
paths give statistically independent streams, so evaluation chunks and
per-user noise draws can be made in any order (or in parallel) without
changing the numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# First path element: what the stream is for.
STREAM_INIT = 0      # weight initialization            (STREAM_INIT,)
STREAM_DATASET = 1   # training message sampling        (STREAM_DATASET,)
STREAM_TRAIN = 2     # training noise                   (STREAM_TRAIN, epoch, batch, user)
STREAM_EVAL = 3      # evaluation messages and noise    (STREAM_EVAL, chunk, 0 | user)


def stream_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator fully determined by (seed, path)."""
    seq = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(seq))


def snr_to_sigma2(snr_db: float) -> float:
    """Per-real-dimension noise variance for a given SNR in dB."""
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    return float(10.0 ** (-snr_db / 10.0))


def awgn(x: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """y = x + z with z i.i.d. zero-mean Gaussian, variance sigma2 per entry."""
    if sigma2 < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    if sigma2 == 0.0:
        return x.copy()
    return x + rng.normal(0.0, np.sqrt(sigma2), size=x.shape)


@dataclass(frozen=True)
class ChannelSpec:
    """Per-user SNRs (dB) and channel gains for the L downlink links."""

    snr_db: tuple
    gains: tuple = field(default=None)  # defaults to all-ones

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        gains = self.gains
        if gains is None:
            gains = (1.0,) * len(self.snr_db)
        gains = tuple(float(g) for g in gains)
        if len(gains) != len(self.snr_db):
            raise ValueError("gains and snr_db must have the same length")
        object.__setattr__(self, "gains", gains)

    @classmethod
    def from_delta(cls, snr1_db: float, delta_db: float, users: int) -> "ChannelSpec":
        """SNR_l = SNR_1 - (l-1) * delta, so user 1 has the best channel."""
        return cls(tuple(snr1_db - i * delta_db for i in range(users)))

    @property
    def users(self) -> int:
        return len(self.snr_db)

    @property
    def sigma2(self) -> tuple:
        return tuple(snr_to_sigma2(s) for s in self.snr_db)
