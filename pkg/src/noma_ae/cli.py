"""Command-line front end: noma-ae <subcommand> --config <path> [options].

Every subcommand reads one flat config file (all keys optional), applies
`--set key=value` overrides, writes its artifacts into --out, and drops a
manifest.json recording the fully resolved configuration so the run can
be reproduced from the output directory alone.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .baseline import bpsk_table
from .channel import (
    STREAM_DATASET,
    STREAM_INIT,
    STREAM_TRAIN,
    ChannelSpec,
    stream_rng,
)
from .checkpoint import read_checkpoint, save_checkpoint
from .config import RunConfig, parse_config
from .evaluate import (
    BLER_HEADER,
    estimate_bler,
    estimate_bler_classical,
    export_constellation,
    sweep_lambda,
    sweep_snr,
)
from .io import atomic_write_text, write_csv
from .model import NomaAutoencoder
from .train import gradient_check, sample_dataset, train

GRADCHECK_TOLERANCE = 1e-4

LOSS_TRACE_HEADER = ["epoch", "mean_loss", "per_user_ce"]


class CommandError(Exception):
    """A subcommand failure with a user-facing diagnostic."""


def _revision():
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True,
            text=True,
            timeout=5,
        )
        return out.stdout.strip() or None
    except Exception:
        return None


def _write_manifest(out_dir, command, cfg, artifacts, wall_s):
    data = {
        "artifacts": sorted(artifacts),
        "command": command,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "revision": _revision(),
        "version": __version__,
        "wall_time_s": round(wall_s, 3),
    }
    atomic_write_text(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(data, indent=2, sort_keys=True) + "\n",
    )


def _trace_rows(trace):
    return [
        [s.epoch, s.mean_loss, ";".join(repr(c) for c in s.per_user_ce)]
        for s in trace
    ]


def _train_meta(cfg: RunConfig) -> dict:
    return {
        "loss_weights": list(cfg.loss_weights),
        "train_snr_db": list(cfg.snr_db),
        "seed": cfg.seed,
    }


def _lam_of(meta: dict):
    w = meta.get("loss_weights")
    if w and len(w) == 2:
        return float(w[0])
    return None


def _checkpoint_path(cfg: RunConfig, out_dir: str) -> str:
    path = cfg.checkpoint or os.path.join(out_dir, "model.ckpt")
    if not os.path.exists(path):
        raise CommandError(
            f"no checkpoint at {path}; run the train subcommand first or "
            f"point eval.checkpoint at one"
        )
    return path


def _cmd_train(cfg: RunConfig, out_dir: str):
    tc = cfg.training_config()

    def report(stats):
        if stats.epoch == 1 or stats.epoch % 10 == 0 or stats.epoch == tc.epochs:
            print(f"epoch {stats.epoch}/{tc.epochs}: loss {stats.mean_loss:.6f}")

    model, trace = train(tc, on_epoch=report)
    save_checkpoint(model, os.path.join(out_dir, "model.ckpt"), _train_meta(cfg))
    write_csv(
        os.path.join(out_dir, "loss_trace.csv"), LOSS_TRACE_HEADER, _trace_rows(trace)
    )
    return ["model.ckpt", "loss_trace.csv"]


def _cmd_eval(cfg: RunConfig, out_dir: str):
    model, meta = read_checkpoint(_checkpoint_path(cfg, out_dir))
    channel = ChannelSpec(snr_db=cfg.snr_db, gains=cfg.gains)
    lam = _lam_of(meta)
    rows = []
    for decoder in cfg.decoders:
        report = estimate_bler(
            model, channel, cfg.trials, cfg.seed, decoder=decoder, lam=lam
        )
        rows.extend(report.rows())
        print(f"{decoder}: bler {report.bler}")
    write_csv(os.path.join(out_dir, "bler.csv"), BLER_HEADER, rows)
    return ["bler.csv"]


def _cmd_sweep_snr(cfg: RunConfig, out_dir: str):
    model, meta = read_checkpoint(_checkpoint_path(cfg, out_dir))
    reports = sweep_snr(
        model,
        cfg.snr1_grid,
        cfg.delta_snr_db,
        cfg.trials,
        cfg.seed,
        decoders=cfg.decoders,
        lam=_lam_of(meta),
    )
    rows = []
    for report in reports:
        rows.extend(report.rows())
        print(f"snr1 {report.snr_db[0]} dB, {report.decoder}: bler {report.bler}")
    write_csv(os.path.join(out_dir, "bler.csv"), BLER_HEADER, rows)
    return ["bler.csv"]


def _cmd_sweep_lambda(cfg: RunConfig, out_dir: str):
    if cfg.users != 2:
        raise CommandError("the lambda sweep needs a two-user system")
    # The reference lambda experiment trains at equal SNRs; an explicitly
    # configured channel takes precedence.
    if "channel.snr_db" in cfg.provided:
        channel = ChannelSpec(snr_db=cfg.snr_db, gains=cfg.gains)
    else:
        channel = ChannelSpec(snr_db=(6.0, 6.0), gains=cfg.gains)
    template = replace(cfg.training_config(), channel=channel)

    artifacts = []
    rows = []

    def on_result(res):
        ckpt = f"model_lambda_{res.lam!r}.ckpt"
        trace_name = f"loss_trace_lambda_{res.lam!r}.csv"
        meta = {
            "loss_weights": [res.lam, 1.0 - res.lam],
            "train_snr_db": list(channel.snr_db),
            "seed": template.seed,
        }
        save_checkpoint(res.model, os.path.join(out_dir, ckpt), meta)
        write_csv(
            os.path.join(out_dir, trace_name), LOSS_TRACE_HEADER, _trace_rows(res.trace)
        )
        artifacts.extend([ckpt, trace_name])
        for report in res.reports:
            rows.extend(report.rows())
        print(f"lambda {res.lam}: bler {res.reports[0].bler}")

    sweep_lambda(
        template,
        cfg.lambda_grid,
        cfg.lambda_snr1_db,
        cfg.delta_snr_db,
        cfg.trials,
        decoders=cfg.decoders,
        on_result=on_result,
    )
    write_csv(os.path.join(out_dir, "bler.csv"), BLER_HEADER, rows)
    return artifacts + ["bler.csv"]


def _cmd_export_constellation(cfg: RunConfig, out_dir: str):
    model, _ = read_checkpoint(_checkpoint_path(cfg, out_dir))
    header, rows = export_constellation(model)
    write_csv(os.path.join(out_dir, "constellation.csv"), header, rows)
    print(f"exported {len(rows)} codewords")
    return ["constellation.csv"]


def _cmd_baseline(cfg: RunConfig, out_dir: str):
    dims = cfg.dims()
    for l, M_l in enumerate(dims.M, start=1):
        if M_l != 2 ** dims.n:
            raise CommandError(
                f"baseline uses antipodal signaling per dimension, which "
                f"needs k_l == n for every user; user {l} has "
                f"2^k={M_l} messages but n={dims.n}"
            )
    alloc = cfg.power_allocation()
    tables = [bpsk_table(dims.n) for _ in range(dims.users)]
    rows = []
    for snr1 in cfg.snr1_grid:
        channel = ChannelSpec.from_delta(float(snr1), cfg.delta_snr_db, dims.users)
        for decoder in ("sic_classic", "ml_oracle"):
            report = estimate_bler_classical(
                dims, tables, alloc, channel, cfg.trials, cfg.seed, decoder=decoder
            )
            rows.extend(report.rows())
            print(f"snr1 {snr1} dB, {decoder}: bler {report.bler}")
    write_csv(os.path.join(out_dir, "bler.csv"), BLER_HEADER, rows)
    return ["bler.csv"]


def _cmd_gradcheck(cfg: RunConfig, out_dir: str):
    dims = cfg.dims()
    model = NomaAutoencoder.build(
        dims,
        stream_rng(cfg.seed, STREAM_INIT),
        sic_chaining=cfg.sicnet,
        hidden_layers=cfg.hidden_layers,
    )
    batch = sample_dataset(dims, 64, stream_rng(cfg.seed, STREAM_DATASET))
    channel = ChannelSpec(snr_db=cfg.snr_db, gains=cfg.gains)
    noise = [
        stream_rng(cfg.seed, STREAM_TRAIN, 0, 0, l + 1).normal(
            0.0, np.sqrt(channel.sigma2[l]), size=(batch.shape[0], dims.n)
        )
        for l in range(dims.users)
    ]
    err, worst = gradient_check(model, channel, cfg.weights(), batch, noise)
    line = f"max relative gradient error {err:.6e} ({worst})"
    print(line)
    atomic_write_text(os.path.join(out_dir, "gradcheck.txt"), line + "\n")
    if err > GRADCHECK_TOLERANCE:
        raise CommandError(
            f"gradient check failed: {err:.6e} > {GRADCHECK_TOLERANCE}"
        )
    return ["gradcheck.txt"]


_DISPATCH = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "sweep-snr": _cmd_sweep_snr,
    "sweep-lambda": _cmd_sweep_lambda,
    "export-constellation": _cmd_export_constellation,
    "baseline": _cmd_baseline,
    "gradcheck": _cmd_gradcheck,
}

_HELP = {
    "train": "train one model and write a checkpoint plus loss trace",
    "eval": "evaluate a checkpoint at the configured channel point",
    "sweep-snr": "evaluate a checkpoint over the SNR grid",
    "sweep-lambda": "retrain per lambda and evaluate each model",
    "export-constellation": "dump a checkpoint's codeword table as CSV",
    "baseline": "run the classical superposition/SIC reference chain",
    "gradcheck": "compare analytic gradients against finite differences",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-ae",
        description="Train and evaluate learned downlink NOMA constellations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _DISPATCH:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, help="override train.seed")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            dest="overrides",
            metavar="KEY=VALUE",
            help="override one config key; may be repeated",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"train.seed={args.seed}")
    try:
        cfg = parse_config(args.config, overrides)
        os.makedirs(args.out, exist_ok=True)
        start = time.monotonic()
        artifacts = _DISPATCH[args.command](cfg, args.out)
        _write_manifest(
            args.out, args.command, cfg, artifacts, time.monotonic() - start
        )
        return 0
    except (CommandError, ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
