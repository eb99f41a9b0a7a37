"""Minimal dense feed-forward network engine in float64.

Forward evaluation with cached pre-activations, exact analytic
backpropagation, and bias-corrected Adam.  Everything operates on batches
stored one sample per row, and everything is deterministic: same
parameters and inputs give bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("relu", "linear", "softmax")

# Floor applied inside cross_entropy so a zero probability at the true
# index yields a large finite loss instead of inf/NaN.
LOG_FLOOR = 1e-12


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction for numerical stability."""
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


@dataclass
class DenseLayer:
    """One fully-connected layer: out = act(x @ weights + biases).

    weights has shape (in_width, out_width) so a batch multiplies on the
    left, one sample per row.
    """

    weights: np.ndarray
    biases: np.ndarray
    activation: str

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[1],):
            raise ValueError(
                f"layer shape mismatch: weights {self.weights.shape}, "
                f"biases {self.biases.shape}"
            )

    @property
    def in_width(self) -> int:
        return self.weights.shape[0]

    @property
    def out_width(self) -> int:
        return self.weights.shape[1]


@dataclass
class ForwardCache:
    """Per-layer values retained by forward() for exact backprop."""

    inputs: list = field(default_factory=list)     # A_{l-1} seen by layer l
    preacts: list = field(default_factory=list)    # Z_l = A_{l-1} @ W_l + b_l
    output: np.ndarray | None = None               # post-activation of last layer


def glorot_uniform(in_width: int, out_width: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (in_width + out_width))
    return rng.uniform(-limit, limit, size=(in_width, out_width))


class Network:
    """An ordered stack of DenseLayer with matching widths."""

    def __init__(self, layers: list[DenseLayer]):
        if not layers:
            raise ValueError("network needs at least one layer")
        for a, b in zip(layers, layers[1:]):
            if a.out_width != b.in_width:
                raise ValueError(
                    f"layer widths do not chain: {a.out_width} -> {b.in_width}"
                )
        for layer in layers[:-1]:
            if layer.activation == "softmax":
                raise ValueError("softmax is only permitted as the final layer")
        self.layers = layers

    @classmethod
    def create(
        cls,
        widths: list[int],
        activations: list[str],
        rng: np.random.Generator,
    ) -> "Network":
        """Build a network of len(widths)-1 layers, Glorot-uniform weights,
        zero biases.  widths = [in, hidden..., out]."""
        if len(activations) != len(widths) - 1:
            raise ValueError("need one activation per layer")
        layers = [
            DenseLayer(
                weights=glorot_uniform(w_in, w_out, rng),
                biases=np.zeros(w_out),
                activation=act,
            )
            for w_in, w_out, act in zip(widths, widths[1:], activations)
        ]
        return cls(layers)

    @property
    def in_width(self) -> int:
        return self.layers[0].in_width

    @property
    def out_width(self) -> int:
        return self.layers[-1].out_width

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list in declared order: W0, b0, W1, b1, ..."""
        out = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.biases)
        return out

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_width:
            raise ValueError(
                f"input has shape {x.shape}, expected (batch, {self.in_width})"
            )
        cache = ForwardCache()
        a = x
        for layer in self.layers:
            z = a @ layer.weights + layer.biases
            cache.inputs.append(a)
            cache.preacts.append(z)
            if layer.activation == "relu":
                a = relu(z)
            elif layer.activation == "softmax":
                a = softmax(z)
            else:
                a = z
        cache.output = a
        return a, cache

    def backward(
        self, cache: ForwardCache, grad_output: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Backprop a gradient w.r.t. the post-activation output.

        Returns (parameter gradients in parameters() order, gradient w.r.t.
        the network input).
        """
        last = self.layers[-1]
        if last.activation == "relu":
            dz = grad_output * (cache.preacts[-1] > 0)
        elif last.activation == "softmax":
            # Softmax Jacobian: dz_i = b_i * (g_i - sum_j g_j b_j), row-wise.
            b = cache.output
            dz = b * (grad_output - np.sum(grad_output * b, axis=1, keepdims=True))
        else:
            dz = grad_output
        return self._backward_from_dz(cache, dz)

    def backward_from_logits(
        self, cache: ForwardCache, grad_logits: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Backprop a gradient given w.r.t. the final pre-activation.

        This is the entry point for the fused softmax + cross-entropy
        gradient (probs - onehot) / batch.
        """
        return self._backward_from_dz(cache, np.asarray(grad_logits, dtype=np.float64))

    def _backward_from_dz(self, cache, dz):
        if len(cache.preacts) != len(self.layers):
            raise RuntimeError("cache does not match this network (stale cache?)")
        grads: list[np.ndarray] = []
        for idx in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[idx]
            a_prev = cache.inputs[idx]
            grads.insert(0, dz.sum(axis=0))          # db
            grads.insert(0, a_prev.T @ dz)           # dW
            da_prev = dz @ layer.weights.T
            if idx > 0:
                prev = self.layers[idx - 1]
                if prev.activation == "relu":
                    dz = da_prev * (cache.preacts[idx - 1] > 0)
                else:  # linear; softmax cannot appear before the last layer
                    dz = da_prev
        return grads, da_prev


def cross_entropy(probs: np.ndarray, onehot: np.ndarray) -> float:
    """Mean over the batch of -sum_i u_i log b_i.

    Probabilities are floored at LOG_FLOOR so a zero at the true index
    gives a large finite loss, never NaN.
    """
    probs = np.asarray(probs, dtype=np.float64)
    onehot = np.asarray(onehot, dtype=np.float64)
    if probs.shape != onehot.shape:
        raise ValueError(f"shape mismatch: {probs.shape} vs {onehot.shape}")
    picked = np.sum(probs * onehot, axis=1)
    return float(np.mean(-np.log(np.maximum(picked, LOG_FLOOR))))


def softmax_xent_grad(probs: np.ndarray, onehot: np.ndarray) -> np.ndarray:
    """Gradient of cross_entropy w.r.t. the softmax logits: (b - u) / batch."""
    return (probs - onehot) / probs.shape[0]


@dataclass
class AdamState:
    """Bias-corrected Adam accumulators, one (m, v) pair per parameter array."""

    alpha: float
    beta1: float
    beta2: float
    eps: float
    t: int
    m: list
    v: list

    @classmethod
    def for_params(
        cls,
        params: list[np.ndarray],
        alpha: float = 0.0009,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> "AdamState":
        return cls(
            alpha=alpha,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            t=0,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(
    params: list[np.ndarray], grads: list[np.ndarray], state: AdamState
) -> AdamState:
    """One Adam update, in place on params. Returns the advanced state."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("params/grads/state lengths do not match")
    state.t += 1
    b1t = 1.0 - state.beta1 ** state.t
    b2t = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.alpha * (m / b1t) / (np.sqrt(v / b2t) + state.eps)
    return state
