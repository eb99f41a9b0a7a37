"""The noma-ae command line: artifact layout, exit codes, reproducibility.

Each run here uses a deliberately tiny system so the whole file stays
fast; the heavy reference settings are exercised by the acceptance suite.
"""

import json
import os

import pytest

from noma_ae.cli import main
from noma_ae.io import read_csv

TINY = [
    "--set", "system.k=1,1",
    "--set", "system.n=2",
    "--set", "train.batch_size=100",
    "--set", "train.dataset_size=1000",
    "--set", "train.epochs=3",
    "--set", "eval.trials=5000",
]


def run(command, out_dir, *extra):
    return main([command, "--out", str(out_dir), *TINY, *extra])


def read_manifest(out_dir):
    with open(os.path.join(out_dir, "manifest.json")) as fh:
        return json.load(fh)


def test_train_writes_expected_artifacts(tmp_path):
    out = tmp_path / "out"
    assert run("train", out) == 0
    assert sorted(os.listdir(out)) == ["loss_trace.csv", "manifest.json", "model.ckpt"]
    manifest = read_manifest(out)
    assert manifest["command"] == "train"
    assert manifest["artifacts"] == ["loss_trace.csv", "model.ckpt"]
    assert manifest["config"]["system.k"] == "1,1"
    assert manifest["config"]["train.epochs"] == "3"
    assert manifest["seed"] == 0
    header, rows = read_csv(os.path.join(out, "loss_trace.csv"))
    assert header == ["epoch", "mean_loss", "per_user_ce"]
    assert len(rows) == 3
    assert rows[0][0] == "1"
    assert float(rows[-1][1]) < float(rows[0][1])
    assert len(rows[0][2].split(";")) == 2


def test_train_then_eval_pipeline(tmp_path):
    out = tmp_path / "out"
    assert run("train", out) == 0
    assert run("eval", out, "--set", "channel.snr_db=12,3") == 0
    header, rows = read_csv(os.path.join(out, "bler.csv"))
    assert header == [
        "snr1_db", "snr2_db", "lambda", "user", "bler",
        "ci_low", "ci_high", "trials", "decoder", "seed",
    ]
    # two decoders by default, two users each
    assert [r[8] for r in rows] == ["dnn", "dnn", "ml_oracle", "ml_oracle"]
    assert [r[3] for r in rows] == ["1", "2", "1", "2"]
    for r in rows:
        assert r[0] == "12.0" and r[1] == "3.0"
        assert r[7] == "5000"
        assert 0.0 <= float(r[4]) <= 1.0
        assert float(r[5]) <= float(r[4]) <= float(r[6])


def test_eval_without_checkpoint_fails(tmp_path, capsys):
    out = tmp_path / "out"
    assert run("eval", out) == 1
    assert "no checkpoint" in capsys.readouterr().err


def test_repeat_runs_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("train", out) == 0
        assert run("eval", out, "--set", "channel.snr_db=12,3") == 0
    for name in ("model.ckpt", "loss_trace.csv", "bler.csv"):
        pa = (a / name).read_bytes()
        pb = (b / name).read_bytes()
        assert pa == pb, name


def test_seed_flag_changes_model(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("train", a, "--seed", "1") == 0
    assert run("train", b, "--seed", "2") == 0
    assert read_manifest(a)["seed"] == 1
    assert (a / "model.ckpt").read_bytes() != (b / "model.ckpt").read_bytes()


def test_config_file_plus_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "system.k = 1,1\nsystem.n = 2\ntrain.batch_size = 100\n"
        "train.dataset_size = 1000\ntrain.epochs = 2\n"
    )
    out = tmp_path / "out"
    code = main(
        ["train", "--config", str(cfg), "--out", str(out), "--set", "train.epochs=4"]
    )
    assert code == 0
    _, rows = read_csv(os.path.join(out, "loss_trace.csv"))
    assert len(rows) == 4
    assert read_manifest(out)["config"]["train.epochs"] == "4"


def test_sweep_snr_covers_grid(tmp_path):
    out = tmp_path / "out"
    assert run("train", out) == 0
    assert run(
        "sweep-snr", out,
        "--set", "eval.snr1_db_grid=10,14",
        "--set", "eval.decoders=dnn",
    ) == 0
    _, rows = read_csv(os.path.join(out, "bler.csv"))
    assert [r[0] for r in rows] == ["10.0", "10.0", "14.0", "14.0"]
    assert all(r[8] == "dnn" for r in rows)


def test_sweep_lambda_artifacts(tmp_path):
    out = tmp_path / "out"
    code = run(
        "sweep-lambda", out,
        "--set", "eval.lambda_grid=0.0,1.0",
        "--set", "eval.decoders=dnn",
    )
    assert code == 0
    names = sorted(os.listdir(out))
    assert names == [
        "bler.csv",
        "loss_trace_lambda_0.0.csv",
        "loss_trace_lambda_1.0.csv",
        "manifest.json",
        "model_lambda_0.0.ckpt",
        "model_lambda_1.0.ckpt",
    ]
    _, rows = read_csv(os.path.join(out, "bler.csv"))
    assert [r[2] for r in rows] == ["0.0", "0.0", "1.0", "1.0"]
    # the sweep trains at equal SNRs but evaluates at the offset point
    assert all(r[0] == "12.0" and r[1] == "3.0" for r in rows)


def test_export_constellation(tmp_path):
    out = tmp_path / "out"
    assert run("train", out) == 0
    assert run("export-constellation", out) == 0
    header, rows = read_csv(os.path.join(out, "constellation.csv"))
    assert header == ["joint_index", "s1", "s2", "dim_0", "dim_1"]
    assert len(rows) == 4
    assert [r[0] for r in rows] == ["0", "1", "2", "3"]


def test_baseline_writes_both_decoders(tmp_path):
    out = tmp_path / "out"
    code = main([
        "baseline", "--out", str(out),
        "--set", "system.k=2,2",
        "--set", "eval.trials=5000",
        "--set", "eval.snr1_db_grid=14",
    ])
    assert code == 0
    _, rows = read_csv(os.path.join(out, "bler.csv"))
    assert [r[8] for r in rows] == ["sic_classic", "sic_classic", "ml_oracle", "ml_oracle"]
    assert all(r[2] == "" for r in rows)  # no lambda for classical chains


def test_baseline_rejects_mismatched_alphabet(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["baseline", "--out", str(out), "--set", "system.k=3,3"])
    assert code == 1
    assert "k_l == n" in capsys.readouterr().err


def test_gradcheck_passes_and_reports(tmp_path):
    out = tmp_path / "out"
    code = main(["gradcheck", "--out", str(out), "--set", "system.k=1,1"])
    assert code == 0
    text = (out / "gradcheck.txt").read_text()
    assert "max relative gradient error" in text
    err = float(text.split()[4])
    assert err < 1e-4


def test_bad_config_key_exits_nonzero(tmp_path, capsys):
    code = main(["train", "--out", str(tmp_path), "--set", "nope=1"])
    assert code == 1
    assert "unknown config key" in capsys.readouterr().err


def test_invalid_value_diagnostic_names_key(tmp_path, capsys):
    code = main(["train", "--out", str(tmp_path), "--set", "train.epochs=soon"])
    assert code == 1
    assert "train.epochs" in capsys.readouterr().err


def test_version_flag():
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
