"""Training loop: fixed message dataset, fresh noise every batch, Adam.

The message dataset is drawn once per run and iterated in order; channel
noise is redrawn for every batch from a stream keyed by (epoch, batch,
user), so two runs with the same seed see bit-identical data and noise
and produce bit-identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    STREAM_DATASET,
    STREAM_INIT,
    STREAM_TRAIN,
    ChannelSpec,
    stream_rng,
)
from .model import (
    LossWeights,
    NomaAutoencoder,
    SystemDims,
    end_to_end_backward,
    end_to_end_forward,
)
from .nn import AdamState, adam_step


@dataclass(frozen=True)
class TrainingConfig:
    """One training run, fully specified."""

    dims: SystemDims
    weights: LossWeights
    channel: ChannelSpec
    batch_size: int = 3000
    dataset_size: int = 100_000
    epochs: int = 150
    alpha: float = 0.0009
    beta1: float = 0.9
    beta2: float = 0.999
    seed: int = 0
    sic_chaining: bool = True
    hidden_layers: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.batch_size > self.dataset_size:
            raise ValueError(
                f"batch_size {self.batch_size} exceeds dataset_size "
                f"{self.dataset_size}"
            )
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if len(self.weights) != self.dims.users:
            raise ValueError("need one loss weight per user")
        if self.channel.users != self.dims.users:
            raise ValueError("channel must list one SNR per user")
        if self.hidden_layers < 1:
            raise ValueError(f"hidden_layers must be >= 1, got {self.hidden_layers}")


@dataclass(frozen=True)
class EpochStats:
    epoch: int            # 1-based
    mean_loss: float
    per_user_ce: tuple


def sample_dataset(dims: SystemDims, size: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. uniform joint message indices."""
    if size < 1:
        raise ValueError(f"dataset size must be >= 1, got {size}")
    return rng.integers(0, dims.M_c, size=size, dtype=np.int64)


def freeze_normalization(model: NomaAutoencoder) -> NomaAutoencoder:
    """Fix the inference scale from the full codeword table so the mean
    squared codeword norm equals n exactly (within float arithmetic)."""
    raw = model.raw_table()
    total = float(np.sum(raw * raw))
    if total == 0.0:
        raise ArithmeticError("encoder output is identically zero; cannot "
                              "normalize the constellation")
    model.normalization_scale = float(
        np.sqrt(model.dims.n * model.dims.M_c / total)
    )
    return model


def train(config: TrainingConfig, on_epoch=None):
    """Run the full loop and return (model, per-epoch loss trace).

    The model comes back with its inference normalization scale frozen.
    on_epoch, if given, is called with each EpochStats as it is produced.
    """
    dims = config.dims
    model = NomaAutoencoder.build(
        dims,
        stream_rng(config.seed, STREAM_INIT),
        sic_chaining=config.sic_chaining,
        hidden_layers=config.hidden_layers,
    )
    dataset = sample_dataset(
        dims, config.dataset_size, stream_rng(config.seed, STREAM_DATASET)
    )
    params = model.parameters()
    adam = AdamState.for_params(
        params, alpha=config.alpha, beta1=config.beta1, beta2=config.beta2
    )
    sigma = [np.sqrt(s2) for s2 in config.channel.sigma2]
    batches = config.dataset_size // config.batch_size
    trace = []

    for epoch in range(config.epochs):
        loss_sum = 0.0
        ce_sum = np.zeros(dims.users)
        for b in range(batches):
            idx = dataset[b * config.batch_size:(b + 1) * config.batch_size]
            noise = [
                stream_rng(config.seed, STREAM_TRAIN, epoch, b, l + 1).normal(
                    0.0, sigma[l], size=(idx.shape[0], dims.n)
                )
                for l in range(dims.users)
            ]
            fp = end_to_end_forward(
                model, idx, config.channel, config.weights, noise=noise
            )
            grads = end_to_end_backward(model, fp, config.weights, config.channel)
            adam_step(params, grads, adam)
            loss_sum += fp.loss
            ce_sum += fp.per_user_ce
        stats = EpochStats(
            epoch=epoch + 1,
            mean_loss=loss_sum / batches,
            per_user_ce=tuple(float(c) / batches for c in ce_sum),
        )
        trace.append(stats)
        if on_epoch is not None:
            on_epoch(stats)

    freeze_normalization(model)
    return model, trace


def gradient_check(
    model: NomaAutoencoder,
    channel: ChannelSpec,
    weights: LossWeights,
    joint_indices: np.ndarray,
    noise: list,
    h: float = 1e-5,
):
    """Compare analytic gradients against central finite differences.

    Uses one frozen noise realization so the loss is a deterministic
    function of the parameters.  Returns (max relative error, name of the
    worst parameter array).  Entries where both gradients are below 1e-6
    are compared at that absolute scale, since finite differences cannot
    resolve them relatively.
    """
    params = model.parameters()
    names = model.parameter_names()
    fp = end_to_end_forward(model, joint_indices, channel, weights, noise=noise)
    analytic = end_to_end_backward(model, fp, weights, channel)

    def loss_now() -> float:
        return end_to_end_forward(
            model, joint_indices, channel, weights, noise=noise
        ).loss

    worst = 0.0
    worst_name = ""
    for p, g, name in zip(params, analytic, names):
        flat_p = p.ravel()
        flat_g = g.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + h
            lp = loss_now()
            flat_p[i] = orig - h
            lm = loss_now()
            flat_p[i] = orig
            fd = (lp - lm) / (2.0 * h)
            rel = abs(flat_g[i] - fd) / max(abs(flat_g[i]), abs(fd), 1e-6)
            if rel > worst:
                worst = rel
                worst_name = name
    return worst, worst_name
