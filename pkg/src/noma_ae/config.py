"""Flat run configuration: dotted keys, one `key = value` pair per line.

An empty config reproduces the reference two-user setup: k=(2,2), n=2,
batch 3000, Adam alpha 0.0009, training SNRs 15/6 dB, equal loss
weights.  Lists are comma-separated, booleans are true/false, comments
start with '#'.  Unknown keys are rejected by name; command-line
overrides use the same `key=value` syntax.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .baseline import PowerAllocation
from .channel import ChannelSpec
from .model import LossWeights, SystemDims
from .train import TrainingConfig


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{key}: expected an integer, got {text!r}") from None


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"{key}: expected a number, got {text!r}") from None


def _parse_bool(key: str, text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"{key}: expected true or false, got {text!r}")


def _parse_int_list(key: str, text: str) -> tuple:
    return tuple(_parse_int(key, part.strip()) for part in text.split(","))


def _parse_float_list(key: str, text: str) -> tuple:
    return tuple(_parse_float(key, part.strip()) for part in text.split(","))


def _parse_str_list(key: str, text: str) -> tuple:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parse_str(key: str, text: str) -> str:
    return text


# config key -> (RunConfig attribute, parser)
KEYS = {
    "system.k": ("k", _parse_int_list),
    "system.n": ("n", _parse_int),
    "system.sicnet": ("sicnet", _parse_bool),
    "system.hidden_layers": ("hidden_layers", _parse_int),
    "channel.snr_db": ("snr_db", _parse_float_list),
    "channel.gains": ("gains", _parse_float_list),
    "train.loss_weights": ("loss_weights", _parse_float_list),
    "train.batch_size": ("batch_size", _parse_int),
    "train.dataset_size": ("dataset_size", _parse_int),
    "train.epochs": ("epochs", _parse_int),
    "train.alpha": ("alpha", _parse_float),
    "train.beta1": ("beta1", _parse_float),
    "train.beta2": ("beta2", _parse_float),
    "train.seed": ("seed", _parse_int),
    "eval.trials": ("trials", _parse_int),
    "eval.snr1_db_grid": ("snr1_grid", _parse_float_list),
    "eval.delta_snr_db": ("delta_snr_db", _parse_float),
    "eval.lambda_grid": ("lambda_grid", _parse_float_list),
    "eval.lambda_snr1_db": ("lambda_snr1_db", _parse_float),
    "eval.decoders": ("decoders", _parse_str_list),
    "eval.checkpoint": ("checkpoint", _parse_str),
    "baseline.power": ("baseline_power", _parse_float_list),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in KEYS.items()}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for any subcommand.

    `provided` records which keys were given explicitly (file or
    override) as opposed to defaulted; the lambda sweep uses it to pick
    the equal-SNR training point unless the channel was set by hand.
    """

    k: tuple = (2, 2)
    n: int = 2
    sicnet: bool = True
    hidden_layers: int = 1
    snr_db: tuple | None = None
    gains: tuple | None = None
    loss_weights: tuple | None = None
    batch_size: int = 3000
    dataset_size: int = 100_000
    epochs: int = 150
    alpha: float = 0.0009
    beta1: float = 0.9
    beta2: float = 0.999
    seed: int = 0
    trials: int = 2_000_000
    snr1_grid: tuple = (14.0, 16.0, 18.0, 20.0, 22.0, 24.0)
    delta_snr_db: float = 9.0
    lambda_grid: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    lambda_snr1_db: float = 12.0
    decoders: tuple = ("dnn", "ml_oracle")
    checkpoint: str | None = None
    baseline_power: tuple = (0.2, 0.8)
    provided: frozenset = field(default_factory=frozenset)

    @property
    def users(self) -> int:
        return len(self.k)

    def dims(self) -> SystemDims:
        return SystemDims(k=self.k, n=self.n)

    def weights(self) -> LossWeights:
        return LossWeights(self.loss_weights)

    def training_channel(self) -> ChannelSpec:
        return ChannelSpec(snr_db=self.snr_db, gains=self.gains)

    def power_allocation(self) -> PowerAllocation:
        if len(self.baseline_power) != self.users:
            raise ValueError(
                f"baseline.power: need {self.users} coefficients, "
                f"got {len(self.baseline_power)}"
            )
        try:
            return PowerAllocation(self.baseline_power)
        except ValueError as exc:
            raise ValueError(f"baseline.power: {exc}") from None

    def training_config(self) -> TrainingConfig:
        return TrainingConfig(
            dims=self.dims(),
            weights=self.weights(),
            channel=self.training_channel(),
            batch_size=self.batch_size,
            dataset_size=self.dataset_size,
            epochs=self.epochs,
            alpha=self.alpha,
            beta1=self.beta1,
            beta2=self.beta2,
            seed=self.seed,
            sic_chaining=self.sicnet,
            hidden_layers=self.hidden_layers,
        )

    def echo(self) -> dict:
        """Canonical key -> value-string map of the resolved config."""
        out = {}
        for key, (attr, _) in KEYS.items():
            out[key] = _format_value(getattr(self, attr))
        return dict(sorted(out.items()))


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fill_per_user_defaults(values: dict, users: int) -> dict:
    if values.get("snr_db") is None:
        values["snr_db"] = tuple(15.0 - 9.0 * i for i in range(users))
    if values.get("loss_weights") is None:
        values["loss_weights"] = (1.0 / users,) * users
    return values


def _validate(cfg: RunConfig) -> RunConfig:
    if len(cfg.k) < 1:
        raise ValueError("system.k: need at least one user")
    if any(b < 0 for b in cfg.k):
        raise ValueError(f"system.k: bit counts must be >= 0, got {cfg.k}")
    if cfg.n < 1:
        raise ValueError(f"system.n: must be >= 1, got {cfg.n}")
    if cfg.hidden_layers < 1:
        raise ValueError(f"system.hidden_layers: must be >= 1, got {cfg.hidden_layers}")
    users = cfg.users
    if len(cfg.snr_db) != users:
        raise ValueError(
            f"channel.snr_db: need {users} values, got {len(cfg.snr_db)}"
        )
    if cfg.gains is not None and len(cfg.gains) != users:
        raise ValueError(f"channel.gains: need {users} values, got {len(cfg.gains)}")
    if len(cfg.loss_weights) != users:
        raise ValueError(
            f"train.loss_weights: need {users} values, got {len(cfg.loss_weights)}"
        )
    if any(w < 0 for w in cfg.loss_weights):
        raise ValueError(
            f"train.loss_weights: must be >= 0, got {cfg.loss_weights}"
        )
    if abs(sum(cfg.loss_weights) - 1.0) > 1e-12:
        raise ValueError(
            f"train.loss_weights: must sum to 1, got sum={sum(cfg.loss_weights)!r}"
        )
    if cfg.batch_size < 1:
        raise ValueError(f"train.batch_size: must be >= 1, got {cfg.batch_size}")
    if cfg.dataset_size < cfg.batch_size:
        raise ValueError(
            f"train.dataset_size: must be >= train.batch_size, got "
            f"{cfg.dataset_size} < {cfg.batch_size}"
        )
    if cfg.epochs < 0:
        raise ValueError(f"train.epochs: must be >= 0, got {cfg.epochs}")
    if cfg.alpha <= 0:
        raise ValueError(f"train.alpha: must be > 0, got {cfg.alpha}")
    for name in ("beta1", "beta2"):
        v = getattr(cfg, name)
        if not 0.0 <= v < 1.0:
            raise ValueError(f"train.{name}: must be in [0, 1), got {v}")
    if cfg.trials < 1:
        raise ValueError(f"eval.trials: must be >= 1, got {cfg.trials}")
    if not cfg.snr1_grid:
        raise ValueError("eval.snr1_db_grid: must not be empty")
    for lam in cfg.lambda_grid:
        if not 0.0 <= lam <= 1.0:
            raise ValueError(
                f"eval.lambda_grid: values must be in [0, 1], got {lam}"
            )
    for d in cfg.decoders:
        if d not in ("dnn", "ml_oracle"):
            raise ValueError(f"eval.decoders: unknown decoder {d!r}")
    if any(p < 0 for p in cfg.baseline_power):
        raise ValueError(
            f"baseline.power: coefficients must be >= 0, got {cfg.baseline_power}"
        )
    return cfg


def parse_assignment(text: str):
    """Split one `key = value` assignment; raises on malformed input."""
    if "=" not in text:
        raise ValueError(f"expected key=value, got {text!r}")
    key, _, value = text.partition("=")
    key = key.strip()
    value = value.strip()
    if key not in KEYS:
        raise ValueError(f"unknown config key {key!r}")
    attr, parser = KEYS[key]
    return key, attr, parser(key, value)


def parse_config(path: str | None = None, overrides=()) -> RunConfig:
    """Load a config file (optional) and apply overrides on top.

    Precedence: override > file > default.  Every error names the
    offending key or line.
    """
    values: dict = {}
    provided: set = set()

    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
        seen = set()
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                key, attr, value = parse_assignment(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            seen.add(key)
            values[attr] = value
            provided.add(key)

    for text in overrides:
        key, attr, value = parse_assignment(text)
        values[attr] = value
        provided.add(key)

    users = len(values.get("k", RunConfig.k))
    _fill_per_user_defaults(values, users)
    cfg = RunConfig(**values, provided=frozenset(provided))
    return _validate(cfg)
