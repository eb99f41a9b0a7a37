"""Learned downlink NOMA constellations: a joint autoencoder transmitter,
per-user chained decoders, classical superposition/SIC references, and
Monte-Carlo error-rate evaluation, all in plain numpy."""

__version__ = "0.1.0"

from .baseline import (
    PowerAllocation,
    UserConstellation,
    bpsk_table,
    ml_joint_decode,
    qfunc,
    qpsk_ser_analytic,
    qpsk_table,
    sic_decode,
    superpose,
    superposed_table,
)
from .channel import ChannelSpec, awgn, snr_to_sigma2, stream_rng
from .checkpoint import load_checkpoint, read_checkpoint, save_checkpoint
from .config import RunConfig, parse_config
from .evaluate import (
    BlerReport,
    estimate_bler,
    estimate_bler_classical,
    export_constellation,
    qpsk_mc_ser,
    sweep_lambda,
    sweep_snr,
    wilson_interval,
)
from .model import (
    LossWeights,
    NomaAutoencoder,
    SystemDims,
    end_to_end_backward,
    end_to_end_forward,
    joint_from_users,
    users_from_joint,
    weighted_loss,
)
from .train import (
    EpochStats,
    TrainingConfig,
    freeze_normalization,
    gradient_check,
    sample_dataset,
    train,
)

__all__ = [
    "BlerReport",
    "ChannelSpec",
    "EpochStats",
    "LossWeights",
    "NomaAutoencoder",
    "PowerAllocation",
    "RunConfig",
    "SystemDims",
    "TrainingConfig",
    "UserConstellation",
    "awgn",
    "bpsk_table",
    "end_to_end_backward",
    "end_to_end_forward",
    "estimate_bler",
    "estimate_bler_classical",
    "export_constellation",
    "freeze_normalization",
    "gradient_check",
    "joint_from_users",
    "load_checkpoint",
    "ml_joint_decode",
    "parse_config",
    "qfunc",
    "qpsk_mc_ser",
    "qpsk_ser_analytic",
    "qpsk_table",
    "read_checkpoint",
    "sample_dataset",
    "save_checkpoint",
    "sic_decode",
    "snr_to_sigma2",
    "stream_rng",
    "superpose",
    "superposed_table",
    "sweep_lambda",
    "sweep_snr",
    "train",
    "users_from_joint",
    "weighted_loss",
    "wilson_interval",
]
