"""Joint-encoder / per-user-decoder graph for learned downlink NOMA.

One encoder maps the concatenated (joint) message, one-hot encoded, to a
real codeword of n channel uses under an average power constraint.  Each
of the L receivers sees its own AWGN copy and runs a chain of decoder
stages in descending user order: the stage for user j consumes the
received signal concatenated with the soft (post-softmax) outputs of the
stages for users L..j+1 at that same receiver, mirroring successive
interference cancellation with soft decisions.  With chaining disabled
every receiver is a single stage fed by its received signal alone.

Training minimizes a convex combination of per-user cross-entropies; the
weight vector is the knob that trades the users' error rates against
each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nn import Network, cross_entropy, softmax_xent_grad


@dataclass(frozen=True)
class SystemDims:
    """Message-set sizes and channel uses for L users.

    k[l] is user l+1's bit count, so user l+1 picks from M_l = 2^k[l]
    messages; the joint message ranges over M_c = prod(M_l) = 2^sum(k).
    """

    k: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(b) for b in self.k))
        if len(self.k) < 1:
            raise ValueError("need at least one user")
        if any(b < 0 for b in self.k):
            raise ValueError(f"bit counts must be >= 0, got {self.k}")
        if self.n < 1:
            raise ValueError(f"channel uses must be >= 1, got {self.n}")

    @property
    def users(self) -> int:
        return len(self.k)

    @property
    def M(self) -> tuple:
        return tuple(2 ** b for b in self.k)

    @property
    def M_c(self) -> int:
        return 2 ** sum(self.k)


def joint_from_users(dims: SystemDims, per_user: np.ndarray) -> np.ndarray:
    """Mixed-radix joint index from per-user indices (batch, L); user 1 is
    the most significant digit."""
    per_user = np.asarray(per_user)
    m = np.zeros(per_user.shape[0], dtype=np.int64)
    for l, M_l in enumerate(dims.M):
        m = m * M_l + per_user[:, l]
    return m


def users_from_joint(dims: SystemDims, joint: np.ndarray) -> np.ndarray:
    """Inverse of joint_from_users; returns (batch, L)."""
    joint = np.asarray(joint, dtype=np.int64)
    out = np.empty((joint.shape[0], dims.users), dtype=np.int64)
    rem = joint.copy()
    for l in range(dims.users - 1, -1, -1):
        M_l = dims.M[l]
        out[:, l] = rem % M_l
        rem //= M_l
    return out


def one_hot(indices: np.ndarray, width: int) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= width):
        raise ValueError(f"index out of range for one-hot width {width}")
    out = np.zeros((indices.shape[0], width))
    out[np.arange(indices.shape[0]), indices] = 1.0
    return out


@dataclass(frozen=True)
class LossWeights:
    """Per-user coefficients of the compound loss; non-negative, sum 1."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(v < 0 for v in vals):
            raise ValueError(f"loss weights must be >= 0, got {vals}")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise ValueError(f"loss weights must sum to 1, got sum={sum(vals)!r}")

    @classmethod
    def uniform(cls, users: int) -> "LossWeights":
        return cls((1.0 / users,) * users)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


class NomaAutoencoder:
    """Encoder plus one decoder chain per receiver.

    receivers[l-1] holds receiver l's stages in decoding order, i.e. for
    users L, L-1, ..., l (a single stage for user l when chaining is off).
    normalization_scale is None until frozen after training; inference
    encoding requires it.
    """

    def __init__(
        self,
        dims: SystemDims,
        encoder: Network,
        receivers: list,
        sic_chaining: bool,
        hidden_layers: int,
        normalization_scale: float | None = None,
    ):
        self.dims = dims
        self.encoder = encoder
        self.receivers = receivers
        self.sic_chaining = sic_chaining
        self.hidden_layers = hidden_layers
        self.normalization_scale = normalization_scale
        self._check_widths()

    @classmethod
    def build(
        cls,
        dims: SystemDims,
        rng: np.random.Generator,
        sic_chaining: bool = True,
        hidden_layers: int = 1,
    ) -> "NomaAutoencoder":
        """Fresh Glorot-initialized model: every hidden layer has M_c units."""
        M_c = dims.M_c
        hidden = [M_c] * hidden_layers
        encoder = Network.create(
            [M_c] + hidden + [dims.n],
            ["relu"] * hidden_layers + ["linear"],
            rng,
        )
        receivers = []
        for l in range(1, dims.users + 1):
            chain = []
            chain_users = cls.chain_users_for(dims, l, sic_chaining)
            for pos, j in enumerate(chain_users):
                # y_l concatenated with the soft outputs of this receiver's
                # earlier stages (users decoded before j in this chain).
                in_width = dims.n + sum(dims.M[q - 1] for q in chain_users[:pos])
                chain.append(
                    Network.create(
                        [in_width] + hidden + [dims.M[j - 1]],
                        ["relu"] * hidden_layers + ["softmax"],
                        rng,
                    )
                )
            receivers.append(chain)
        return cls(dims, encoder, receivers, sic_chaining, hidden_layers)

    @staticmethod
    def chain_users_for(dims: SystemDims, receiver: int, sic_chaining: bool) -> list:
        """User decoded by each stage of the given receiver, in order."""
        if sic_chaining:
            return list(range(dims.users, receiver - 1, -1))
        return [receiver]

    def chain_users(self, receiver: int) -> list:
        return self.chain_users_for(self.dims, receiver, self.sic_chaining)

    def _check_widths(self):
        dims = self.dims
        if self.encoder.in_width != dims.M_c or self.encoder.out_width != dims.n:
            raise ValueError("encoder widths do not match the system dimensions")
        if len(self.receivers) != dims.users:
            raise ValueError("need one decoder chain per user")
        for l, chain in enumerate(self.receivers, start=1):
            users = self.chain_users(l)
            if len(chain) != len(users):
                raise ValueError(f"receiver {l} chain has wrong length")
            for pos, (net, j) in enumerate(zip(chain, users)):
                expect_in = dims.n + sum(dims.M[q - 1] for q in users[:pos])
                if net.in_width != expect_in or net.out_width != dims.M[j - 1]:
                    raise ValueError(
                        f"stage for user {j} at receiver {l} has widths "
                        f"({net.in_width}, {net.out_width}), expected "
                        f"({expect_in}, {dims.M[j - 1]})"
                    )

    # -- parameter bookkeeping ------------------------------------------------

    def parameters(self) -> list:
        """All weights/biases in declared order: encoder first, then each
        receiver's chain in decoding order."""
        params = self.encoder.parameters()
        for chain in self.receivers:
            for net in chain:
                params.extend(net.parameters())
        return params

    def parameter_names(self) -> list:
        names = []

        def net_names(prefix, net):
            for i in range(len(net.layers)):
                names.append(f"{prefix}/layer{i}/W")
                names.append(f"{prefix}/layer{i}/b")

        net_names("encoder", self.encoder)
        for l, chain in enumerate(self.receivers, start=1):
            for net, j in zip(chain, self.chain_users(l)):
                net_names(f"rx{l}/user{j}", net)
        return names

    # -- encoding -------------------------------------------------------------

    def encode_training(self, joint_indices: np.ndarray):
        """Batch-normalized encoding: the whole batch is rescaled so its mean
        squared row norm equals n, and gradients flow through the scale.

        Returns (x, raw, sumsq, scale, encoder cache).
        """
        u = one_hot(joint_indices, self.dims.M_c)
        raw, cache = self.encoder.forward(u)
        sumsq = float(np.sum(raw * raw))
        if sumsq == 0.0:
            raise ArithmeticError("encoder output is identically zero; "
                                  "power normalization is degenerate")
        scale = float(np.sqrt(self.dims.n * raw.shape[0] / sumsq))
        return scale * raw, raw, sumsq, scale, cache

    def raw_table(self) -> np.ndarray:
        """Un-normalized codewords for all M_c joint messages."""
        table, _ = self.encoder.forward(np.eye(self.dims.M_c))
        return table

    def encode(self, joint_indices: np.ndarray) -> np.ndarray:
        """Inference encoding: rows of the frozen codeword table.

        Defined as a table lookup (not a fresh network pass) so encoding
        is bit-identical to the exported constellation regardless of
        batch size.
        """
        table = self.constellation_table()
        joint_indices = np.asarray(joint_indices, dtype=np.int64)
        if joint_indices.size and (
            joint_indices.min() < 0 or joint_indices.max() >= self.dims.M_c
        ):
            raise ValueError("joint message index out of range")
        return table[joint_indices]

    def constellation_table(self) -> np.ndarray:
        """All M_c codewords at the frozen scale; row m is message m."""
        if self.normalization_scale is None:
            raise RuntimeError("normalization scale not frozen")
        return self.normalization_scale * self.raw_table()

    # -- decoding -------------------------------------------------------------

    def receiver_chain_forward(self, receiver: int, y: np.ndarray):
        """Run receiver l's stage chain on its received batch.

        Returns a list of (user, soft output, cache) in decoding order; the
        last entry is the receiver's own message posterior.
        """
        if y.ndim != 2 or y.shape[1] != self.dims.n:
            raise ValueError(f"received batch has shape {y.shape}, expected "
                             f"(batch, {self.dims.n})")
        out = []
        softs = []
        for net, j in zip(self.receivers[receiver - 1], self.chain_users(receiver)):
            stage_in = np.concatenate([y] + softs, axis=1) if softs else y
            soft, cache = net.forward(stage_in)
            out.append((j, soft, cache))
            softs.append(soft)
        return out

    def receiver_forward(self, receiver: int, y: np.ndarray) -> dict:
        """Soft outputs produced at receiver l, keyed by decoded user."""
        return {j: soft for j, soft, _ in self.receiver_chain_forward(receiver, y)}


def weighted_loss(per_user_onehot: list, soft_outputs: list, weights: LossWeights):
    """Compound loss sum_j w_j * CE_j and the individual CE terms."""
    if not (len(per_user_onehot) == len(soft_outputs) == len(weights)):
        raise ValueError("need one one-hot batch, soft output and weight per user")
    ces = [cross_entropy(b, u) for u, b in zip(per_user_onehot, soft_outputs)]
    total = float(sum(w * ce for w, ce in zip(weights.values, ces)))
    return total, ces


@dataclass
class ForwardPass:
    """Everything end_to_end_forward computed, retained for backprop."""

    joint_indices: np.ndarray
    per_user_onehot: list
    enc_cache: object
    raw: np.ndarray
    sumsq: float
    scale: float
    x: np.ndarray
    y: list                      # per user, after gain and noise
    chains: list                 # per receiver: list of (user, soft, cache)
    soft: list                   # b_l per user (own-message posterior)
    per_user_ce: list
    loss: float


def end_to_end_forward(
    model: NomaAutoencoder,
    joint_indices: np.ndarray,
    channel,
    weights: LossWeights,
    noise: list | None = None,
    rng: np.random.Generator | None = None,
) -> ForwardPass:
    """Encode, push through each user's AWGN link, run every decoder chain,
    and evaluate the compound loss (training-mode power normalization).

    Noise can be supplied explicitly (one (batch, n) array per user, e.g. a
    frozen realization for gradient checks) or drawn from rng user by user.
    """
    dims = model.dims
    if channel.users != dims.users:
        raise ValueError("channel must have one entry per user")
    if len(weights) != dims.users:
        raise ValueError("need one loss weight per user")
    joint_indices = np.asarray(joint_indices, dtype=np.int64)
    x, raw, sumsq, scale, enc_cache = model.encode_training(joint_indices)

    sigma2 = channel.sigma2
    ys = []
    for l in range(dims.users):
        if noise is not None:
            z = noise[l]
        elif rng is not None:
            z = rng.normal(0.0, np.sqrt(sigma2[l]), size=x.shape) if sigma2[l] > 0 \
                else np.zeros_like(x)
        else:
            raise ValueError("provide either noise arrays or an rng")
        ys.append(channel.gains[l] * x + z)

    chains = [model.receiver_chain_forward(l, ys[l - 1])
              for l in range(1, dims.users + 1)]
    soft = [chain[-1][1] for chain in chains]

    per_user = users_from_joint(dims, joint_indices)
    onehots = [one_hot(per_user[:, l], dims.M[l]) for l in range(dims.users)]
    loss, ces = weighted_loss(onehots, soft, weights)
    if not np.isfinite(loss):
        raise ArithmeticError(f"non-finite loss {loss}")

    return ForwardPass(
        joint_indices=joint_indices,
        per_user_onehot=onehots,
        enc_cache=enc_cache,
        raw=raw,
        sumsq=sumsq,
        scale=scale,
        x=x,
        y=ys,
        chains=chains,
        soft=soft,
        per_user_ce=ces,
        loss=loss,
    )


def end_to_end_backward(
    model: NomaAutoencoder, fp: ForwardPass, weights: LossWeights, channel
) -> list:
    """Exact gradients of the compound loss w.r.t. every parameter, in
    model.parameters() order.

    The gradient flows through each receiver chain (including the soft
    outputs passed between stages), the additive channel, and the batch
    power normalization.
    """
    dims = model.dims
    n = dims.n
    batch = fp.x.shape[0]
    dx = np.zeros_like(fp.x)
    stage_grads = []  # per receiver, per stage, flat grad list

    for l in range(1, dims.users + 1):
        chain = fp.chains[l - 1]
        nets = model.receivers[l - 1]
        dy = np.zeros_like(fp.y[l - 1])
        grad_soft = {j: np.zeros_like(soft) for j, soft, _ in chain}
        chain_grads = [None] * len(chain)
        for pos in range(len(chain) - 1, -1, -1):
            user_j, soft_j, cache_j = chain[pos]
            if pos == len(chain) - 1:
                # receiver's own message: fused softmax + cross-entropy
                g_logits = weights[l - 1] * softmax_xent_grad(
                    soft_j, fp.per_user_onehot[l - 1]
                )
                grads_j, din = nets[pos].backward_from_logits(cache_j, g_logits)
            else:
                grads_j, din = nets[pos].backward(cache_j, grad_soft[user_j])
            chain_grads[pos] = grads_j
            dy += din[:, :n]
            off = n
            for q in range(pos):
                user_q = chain[q][0]
                M_q = dims.M[user_q - 1]
                grad_soft[user_q] += din[:, off:off + M_q]
                off += M_q
        stage_grads.append(chain_grads)
        dx += channel.gains[l - 1] * dy

    # Batch power normalization: x = s * r with s = sqrt(n * batch / sum(r^2)).
    inner = float(np.sum(fp.raw * dx))
    draw = fp.scale * dx - (fp.scale / fp.sumsq) * inner * fp.raw
    enc_grads, _ = model.encoder.backward_from_logits(fp.enc_cache, draw)

    flat = list(enc_grads)
    for chain_grads in stage_grads:
        for grads_j in chain_grads:
            flat.extend(grads_j)
    return flat


def argmax_decode(soft: np.ndarray) -> np.ndarray:
    """Message estimates from a posterior batch (lowest index wins ties)."""
    return np.argmax(soft, axis=1)
