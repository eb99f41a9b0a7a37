"""Classical power-domain NOMA reference chain and exact ML decoding.

These are the correctness anchors for the learned system: superposition
coding with fixed per-user constellations, hard successive interference
cancellation, a brute-force maximum-likelihood joint decoder, and the
closed-form QPSK symbol error rate.  All decisions break ties toward the
lowest message index, so every function here is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SystemDims, joint_from_users, users_from_joint

# Largest number of float64 entries in one distance block; keeps the
# brute-force ML decoder's memory use bounded when M_c is big.
_ML_BLOCK_ELEMS = 4_000_000


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def qpsk_ser_analytic(esn0_db: float) -> float:
    """Exact QPSK symbol error rate 2Q(sqrt(g)) - Q(sqrt(g))^2, g = Es/N0."""
    gamma = 10.0 ** (esn0_db / 10.0)
    q = qfunc(math.sqrt(gamma))
    return 2.0 * q - q * q


@dataclass(frozen=True)
class PowerAllocation:
    """Per-user power coefficients, non-descending and summing to one.

    Ascending order gives the weaker (later) users more power, which is
    what makes power-domain superposition decodable by SIC.  Equal
    coefficients are permitted; they make stage decisions ambiguous for
    symmetric constellations, and the tie rule then picks the lowest
    index.
    """

    p: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", vals)
        if any(v < 0 for v in vals):
            raise ValueError(f"power coefficients must be >= 0, got {vals}")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"power coefficients must be non-descending, got {vals}")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise ValueError(f"power coefficients must sum to 1, got {sum(vals)!r}")

    @property
    def users(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class UserConstellation:
    """One user's fixed mapping from message index to a real n-vector.

    The table must have unit average power per dimension (mean squared
    row norm equal to n), matching the learned tables' normalization.
    """

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        object.__setattr__(self, "table", table)
        if table.ndim != 2 or table.shape[0] < 1:
            raise ValueError(f"constellation table has shape {table.shape}")
        n = table.shape[1]
        mean_energy = float(np.mean(np.sum(table * table, axis=1)))
        if abs(mean_energy - n) > 1e-9:
            raise ValueError(
                f"table average energy {mean_energy!r} != dimension {n}"
            )

    @property
    def size(self) -> int:
        return self.table.shape[0]

    @property
    def n(self) -> int:
        return self.table.shape[1]

    def map(self, indices: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(indices, dtype=np.int64)]


def bpsk_table(n: int) -> UserConstellation:
    """All 2^n antipodal points: message bits map to +1/-1 per dimension,
    most significant bit first, bit 0 -> +1."""
    if n < 1:
        raise ValueError("need n >= 1")
    rows = np.empty((2 ** n, n))
    for m in range(2 ** n):
        bits = [(m >> (n - 1 - d)) & 1 for d in range(n)]
        rows[m] = [1.0 - 2.0 * b for b in bits]
    return UserConstellation(rows)


def qpsk_table() -> UserConstellation:
    """Unit-average-power QPSK as two antipodal dimensions (M=4, n=2)."""
    return bpsk_table(2)


def superpose(qs: list, alloc: PowerAllocation) -> np.ndarray:
    """Weighted linear combination sum_l sqrt(p_l) q_l of per-user batches."""
    if len(qs) != alloc.users:
        raise ValueError("need one signal batch per power coefficient")
    qs = [np.asarray(q, dtype=np.float64) for q in qs]
    for q in qs[1:]:
        if q.shape != qs[0].shape:
            raise ValueError("per-user signal batches must share a shape")
    x = np.zeros_like(qs[0])
    for p_l, q in zip(alloc.p, qs):
        x += math.sqrt(p_l) * q
    return x


def superposed_table(
    dims: SystemDims, constellations: list, alloc: PowerAllocation
) -> np.ndarray:
    """The joint constellation: row m is the superposed codeword for joint
    message m under the standard mixed-radix message numbering."""
    if len(constellations) != dims.users:
        raise ValueError("need one constellation per user")
    for c, M_l in zip(constellations, dims.M):
        if c.size != M_l:
            raise ValueError(f"constellation size {c.size} != M_l {M_l}")
    joint = np.arange(dims.M_c)
    per_user = users_from_joint(dims, joint)
    qs = [c.map(per_user[:, l]) for l, c in enumerate(constellations)]
    return superpose(qs, alloc)


def _nearest_rows(y: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Index of the closest table row for each sample, lowest index on ties.

    Distances are computed as explicit squared differences (not expanded
    dot products) so exact geometric ties stay exact in floating point.
    """
    samples, rows = y.shape[0], table.shape[0]
    block = max(1, _ML_BLOCK_ELEMS // max(1, rows * table.shape[1]))
    out = np.empty(samples, dtype=np.int64)
    for start in range(0, samples, block):
        stop = min(start + block, samples)
        diff = y[start:stop, None, :] - table[None, :, :]
        d2 = np.einsum("bmn,bmn->bm", diff, diff)
        out[start:stop] = np.argmin(d2, axis=1)
    return out


def ml_joint_decode(y: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Exact maximum-likelihood decisions over a joint codeword table.

    Under AWGN with equal priors this is minimum Euclidean distance;
    returns the joint message index per sample.
    """
    y = np.asarray(y, dtype=np.float64)
    table = np.asarray(table, dtype=np.float64)
    if y.ndim != 2 or table.ndim != 2 or y.shape[1] != table.shape[1]:
        raise ValueError(f"shape mismatch: y {y.shape} vs table {table.shape}")
    return _nearest_rows(y, table)


def sic_decode(
    y: np.ndarray, constellations: list, alloc: PowerAllocation
) -> np.ndarray:
    """Hard successive interference cancellation.

    Decodes in descending power order (user L first, treating the rest as
    noise), subtracts each decision exactly, and returns an (samples, L)
    array of per-user message estimates.
    """
    y = np.asarray(y, dtype=np.float64)
    L = alloc.users
    if len(constellations) != L:
        raise ValueError("need one constellation per user")
    est = np.empty((y.shape[0], L), dtype=np.int64)
    residual = y.copy()
    for j in range(L, 0, -1):
        scaled = math.sqrt(alloc.p[j - 1]) * constellations[j - 1].table
        idx = _nearest_rows(residual, scaled)
        est[:, j - 1] = idx
        residual -= scaled[idx]
    return est


def sic_decode_joint(
    dims: SystemDims, y: np.ndarray, constellations: list, alloc: PowerAllocation
) -> np.ndarray:
    """sic_decode folded through the joint-message numbering."""
    return joint_from_users(dims, sic_decode(y, constellations, alloc))
