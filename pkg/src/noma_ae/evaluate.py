"""Monte-Carlo error-rate estimation, parameter sweeps, and constellation
export.

Trials are processed in fixed-size chunks, each with its own random
stream keyed by (seed, chunk index), so totals do not depend on the
order chunks are processed in and a run can be reproduced or parallelized
chunk by chunk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .baseline import (
    PowerAllocation,
    UserConstellation,
    ml_joint_decode,
    qpsk_table,
    sic_decode,
    superposed_table,
)
from .channel import STREAM_EVAL, ChannelSpec, stream_rng
from .model import (
    LossWeights,
    NomaAutoencoder,
    SystemDims,
    argmax_decode,
    users_from_joint,
)
from .train import TrainingConfig, train

# Fixed Monte-Carlo chunk size; part of the reproducibility contract
# (stream paths are keyed by chunk index at this size).
EVAL_CHUNK = 200_000

# 95% two-sided normal quantile, frozen for reproducibility.
Z95 = 1.959963984540054

BLER_HEADER = [
    "snr1_db", "snr2_db", "lambda", "user", "bler",
    "ci_low", "ci_high", "trials", "decoder", "seed",
]


def wilson_interval(errors: int, trials: int, z: float = Z95):
    """Wilson score interval for a binomial proportion; contains the point
    estimate errors/trials by construction."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= errors <= trials:
        raise ValueError(f"errors {errors} outside [0, {trials}]")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(
        p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)
    )
    # rounding can push a bound past the point estimate; the exact interval
    # always contains it, so restore that property before clamping to [0, 1]
    low = min(p, center - half)
    high = max(p, center + half)
    return max(0.0, low), min(1.0, high)


def binomial_se(p: float, trials: int) -> float:
    """Plain standard error sqrt(p(1-p)/n) of an error-rate estimate."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


@dataclass(frozen=True)
class BlerReport:
    """Per-user block error rates at one (channel, lambda) point."""

    snr_db: tuple
    lam: float | None
    seed: int
    trials: int
    decoder: str
    errors: tuple
    bler: tuple
    ci_low: tuple
    ci_high: tuple

    @property
    def users(self) -> int:
        return len(self.bler)

    def std_err(self, user: int) -> float:
        return binomial_se(self.bler[user - 1], self.trials)

    def rows(self) -> list:
        """One bler.csv row per user."""
        snr2 = self.snr_db[1] if len(self.snr_db) > 1 else None
        return [
            [
                self.snr_db[0], snr2, self.lam, user,
                self.bler[user - 1], self.ci_low[user - 1],
                self.ci_high[user - 1], self.trials, self.decoder, self.seed,
            ]
            for user in range(1, self.users + 1)
        ]


def _chunk_error_counts(
    dims: SystemDims,
    channel: ChannelSpec,
    table: np.ndarray,
    decide,
    seed: int,
    chunk_idx: int,
    size: int,
) -> np.ndarray:
    """Per-user error counts for one chunk; fully determined by its index.

    decide(user, y) must return that user's message estimates for the
    received batch y at receiver `user`.
    """
    msgs = stream_rng(seed, STREAM_EVAL, chunk_idx, 0).integers(
        0, dims.M_c, size=size, dtype=np.int64
    )
    truth = users_from_joint(dims, msgs)
    x = table[msgs]
    sigma = channel.sigma2
    errors = np.zeros(dims.users, dtype=np.int64)
    for l in range(1, dims.users + 1):
        z = stream_rng(seed, STREAM_EVAL, chunk_idx, l).normal(
            0.0, math.sqrt(sigma[l - 1]), size=x.shape
        )
        y = channel.gains[l - 1] * x + z
        est = decide(l, y)
        errors[l - 1] = int(np.count_nonzero(est != truth[:, l - 1]))
    return errors


def _run_mc(dims, channel, table, decide, trials, seed):
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    errors = np.zeros(dims.users, dtype=np.int64)
    done = 0
    chunk_idx = 0
    while done < trials:
        size = min(EVAL_CHUNK, trials - done)
        errors += _chunk_error_counts(
            dims, channel, table, decide, seed, chunk_idx, size
        )
        done += size
        chunk_idx += 1
    return errors


def _build_report(dims, channel, errors, trials, seed, decoder, lam):
    bler = tuple(int(e) / trials for e in errors)
    ci = [wilson_interval(int(e), trials) for e in errors]
    return BlerReport(
        snr_db=channel.snr_db,
        lam=lam,
        seed=seed,
        trials=trials,
        decoder=decoder,
        errors=tuple(int(e) for e in errors),
        bler=bler,
        ci_low=tuple(c[0] for c in ci),
        ci_high=tuple(c[1] for c in ci),
    )


def estimate_bler(
    model: NomaAutoencoder,
    channel: ChannelSpec,
    trials: int,
    seed: int,
    decoder: str = "dnn",
    lam: float | None = None,
) -> BlerReport:
    """Monte-Carlo per-user BLER of a trained model.

    decoder "dnn" runs each receiver's own decoder chain; "ml_oracle"
    replaces it with exact minimum-distance joint decoding on the same
    received signal, the optimal reference.
    """
    dims = model.dims
    if channel.users != dims.users:
        raise ValueError("channel must have one entry per user")
    table = model.constellation_table()
    if decoder == "dnn":
        def decide(l, y):
            return argmax_decode(model.receiver_forward(l, y)[l])
    elif decoder == "ml_oracle":
        def decide(l, y):
            return users_from_joint(dims, ml_joint_decode(y, table))[:, l - 1]
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    errors = _run_mc(dims, channel, table, decide, trials, seed)
    return _build_report(dims, channel, errors, trials, seed, decoder, lam)


def estimate_bler_classical(
    dims: SystemDims,
    constellations: list,
    alloc: PowerAllocation,
    channel: ChannelSpec,
    trials: int,
    seed: int,
    decoder: str = "sic_classic",
) -> BlerReport:
    """Monte-Carlo per-user BLER of the classical superposition system."""
    table = superposed_table(dims, constellations, alloc)
    if decoder == "sic_classic":
        def decide(l, y):
            return sic_decode(y, constellations, alloc)[:, l - 1]
    elif decoder == "ml_oracle":
        def decide(l, y):
            return users_from_joint(dims, ml_joint_decode(y, table))[:, l - 1]
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    errors = _run_mc(dims, channel, table, decide, trials, seed)
    return _build_report(dims, channel, errors, trials, seed, decoder, None)


def qpsk_mc_ser(esn0_db: float, trials: int, seed: int) -> BlerReport:
    """Single-user QPSK under exact ML decoding; anchors the simulator to
    the closed-form symbol error rate."""
    dims = SystemDims(k=(2,), n=2)
    return estimate_bler_classical(
        dims,
        [qpsk_table()],
        PowerAllocation((1.0,)),
        ChannelSpec((esn0_db,)),
        trials,
        seed,
        decoder="ml_oracle",
    )


def sweep_snr(
    model: NomaAutoencoder,
    snr1_grid,
    delta_snr_db: float,
    trials: int,
    seed: int,
    decoders=("dnn",),
    lam: float | None = None,
) -> list:
    """One report per (grid point, decoder), users' channels spaced by the
    fixed dB gap."""
    reports = []
    for snr1 in snr1_grid:
        channel = ChannelSpec.from_delta(float(snr1), delta_snr_db, model.dims.users)
        for decoder in decoders:
            reports.append(
                estimate_bler(model, channel, trials, seed, decoder=decoder, lam=lam)
            )
    return reports


@dataclass
class LambdaResult:
    lam: float
    model: NomaAutoencoder
    trace: list
    reports: list


def sweep_lambda(
    config: TrainingConfig,
    lam_grid,
    eval_snr1_db: float,
    eval_delta_db: float,
    trials: int,
    decoders=("dnn",),
    on_result=None,
) -> list:
    """Retrain from scratch at each lambda and evaluate at one test point.

    The grid value is user 1's loss weight; user 2 gets 1 - lambda.  The
    training channel comes from the config (equal SNRs in the reference
    setup); only the loss weights vary across the sweep.
    """
    if config.dims.users != 2:
        raise ValueError("the lambda sweep is defined for exactly two users")
    eval_channel = ChannelSpec.from_delta(eval_snr1_db, eval_delta_db, 2)
    results = []
    for lam in lam_grid:
        lam = float(lam)
        cfg = replace(config, weights=LossWeights((lam, 1.0 - lam)))
        model, trace = train(cfg)
        reports = [
            estimate_bler(model, eval_channel, trials, cfg.seed,
                          decoder=decoder, lam=lam)
            for decoder in decoders
        ]
        result = LambdaResult(lam=lam, model=model, trace=trace, reports=reports)
        results.append(result)
        if on_result is not None:
            on_result(result)
    return results


# -- constellation export and geometry ---------------------------------------


def constellation_header(dims: SystemDims) -> list:
    return (
        ["joint_index"]
        + [f"s{l}" for l in range(1, dims.users + 1)]
        + [f"dim_{d}" for d in range(dims.n)]
    )


def export_constellation(model: NomaAutoencoder):
    """(header, rows) for constellation.csv: every joint codeword with its
    per-user message labels; dim_0/dim_1 are the plotting plane when n >= 2."""
    dims = model.dims
    table = model.constellation_table()
    labels = users_from_joint(dims, np.arange(dims.M_c))
    rows = []
    for m in range(dims.M_c):
        rows.append(
            [m] + [int(v) for v in labels[m]] + [float(v) for v in table[m]]
        )
    return constellation_header(dims), rows


def user_labels(dims: SystemDims, user: int) -> np.ndarray:
    """Message label of the given user for each joint index 0..M_c-1."""
    return users_from_joint(dims, np.arange(dims.M_c))[:, user - 1]


def _centroids(table: np.ndarray, labels: np.ndarray):
    out = []
    for g in np.unique(labels):
        out.append(table[labels == g].mean(axis=0))
    return np.asarray(out)


def cluster_separation(table: np.ndarray, labels: np.ndarray) -> float:
    """Mean pairwise distance between label-cluster centroids: how far
    apart one user's message groups sit in signal space."""
    cents = _centroids(table, labels)
    if cents.shape[0] < 2:
        return 0.0
    dists = []
    for a in range(cents.shape[0]):
        for b in range(a + 1, cents.shape[0]):
            dists.append(float(np.linalg.norm(cents[a] - cents[b])))
    return float(np.mean(dists))


def cluster_spread(table: np.ndarray, labels: np.ndarray) -> float:
    """Mean squared distance of points to their own cluster centroid."""
    cents = _centroids(table, labels)
    groups = np.unique(labels)
    lookup = {int(g): i for i, g in enumerate(groups)}
    diffs = table - cents[[lookup[int(g)] for g in labels]]
    return float(np.mean(np.sum(diffs * diffs, axis=1)))
