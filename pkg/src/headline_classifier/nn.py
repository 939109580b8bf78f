"""Dense feed-forward binary classifier, written directly on numpy.

Forward pass, binary cross-entropy, backpropagation and the Adam update
are all implemented here; the only outside help is sparse/dense matrix
arithmetic.  Everything runs in float64 and is deterministic given the
seeds, so trained parameters are reproducible bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import ConfigError, DimensionError, ModelFormatError
from .vectorize import SparseVector, stack_csr

RELU = "relu"
SIGMOID = "sigmoid"

BCE_CLAMP = 1e-7


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str

    def __post_init__(self):
        if self.activation not in (RELU, SIGMOID):
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ValueError("weight/bias row mismatch")


@dataclass
class DenseNetwork:
    layers: list[Layer]

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.weights.shape[1] != prev.weights.shape[0]:
                raise ValueError("adjacent layer dimensions do not chain")
        last = self.layers[-1]
        if last.weights.shape[0] != 1 or last.activation != SIGMOID:
            raise ValueError("final layer must be a single sigmoid unit")

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[1]


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 512
    learning_rate: float = 1e-4
    shuffle_seed: int = 42
    loss: str = "binary_crossentropy"

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.loss != "binary_crossentropy":
            raise ConfigError(f"unsupported loss {self.loss!r}")


@dataclass
class AdamState:
    """Per-parameter moment estimates; shapes mirror the parameter list."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def init(input_dim: int, hidden_dims: list[int], seed: int = 0) -> DenseNetwork:
    """Glorot-uniform weights, zero biases; ReLU hidden, sigmoid output.

    An empty ``hidden_dims`` degenerates to logistic regression.
    """
    if input_dim < 1:
        raise ConfigError(f"input_dim must be >= 1, got {input_dim}")
    rng = np.random.default_rng(seed)
    dims = [input_dim, *hidden_dims, 1]
    layers = []
    for k in range(len(dims) - 1):
        fan_in, fan_out = dims[k], dims[k + 1]
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        activation = SIGMOID if k == len(dims) - 2 else RELU
        layers.append(Layer(weights=weights, bias=np.zeros(fan_out), activation=activation))
    return DenseNetwork(layers=layers)


def _sigmoid(z):
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == RELU:
        return np.maximum(z, 0.0)
    return _sigmoid(z)


def forward(net: DenseNetwork, x: SparseVector) -> float:
    """Probability of the positive (fake) class for one feature vector.

    The first layer touches only the nonzero columns of ``x``.
    """
    if x.dim != net.input_dim:
        raise DimensionError(f"input dim {x.dim} != network input {net.input_dim}")
    first = net.layers[0]
    z = first.weights[:, x.indices] @ x.values + first.bias
    a = _activate(z, first.activation)
    for layer in net.layers[1:]:
        a = _activate(layer.weights @ a + layer.bias, layer.activation)
    return float(a[0])


def _forward_batch(net: DenseNetwork, X) -> tuple[list, list, np.ndarray]:
    """Forward pass over a CSR or dense batch, keeping the caches."""
    activations = [X]
    pre_acts = []
    a = X
    for layer in net.layers:
        z = a @ layer.weights.T + layer.bias
        z = np.asarray(z)
        a = _activate(z, layer.activation)
        pre_acts.append(z)
        activations.append(a)
    probs = activations[-1][:, 0]
    return activations, pre_acts, probs


def bce_loss(p: float, y: int) -> float:
    """Binary cross-entropy with the probability clamped to [1e-7, 1-1e-7]."""
    p = min(max(p, BCE_CLAMP), 1.0 - BCE_CLAMP)
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def _bce_batch(probs: np.ndarray, y: np.ndarray) -> np.ndarray:
    p = np.clip(probs, BCE_CLAMP, 1.0 - BCE_CLAMP)
    return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))


def _backward_from_cache(net, activations, pre_acts, probs, y):
    """Gradients of the mean batch BCE; shapes mirror (weights, bias) per layer."""
    batch = y.shape[0]
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)
    # sigmoid + BCE collapse to (p - y) at the output pre-activation
    delta = ((probs - y) / batch)[:, None]
    for k in range(len(net.layers) - 1, -1, -1):
        a_prev = activations[k]
        if sparse.issparse(a_prev):
            dw = np.asarray((a_prev.T @ delta)).T
        else:
            dw = delta.T @ a_prev
        db = delta.sum(axis=0)
        grads[k] = (dw, db)
        if k > 0:
            delta = (delta @ net.layers[k].weights) * (pre_acts[k - 1] > 0)
    return grads


def backward(net: DenseNetwork, features, labels) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-layer (dL/dW, dL/db) of the mean binary cross-entropy on a batch."""
    X = _as_matrix(features, net.input_dim)
    y = np.asarray(labels, dtype=np.float64)
    if X.shape[0] != y.shape[0] or y.shape[0] == 0:
        raise DimensionError("batch features and labels must be non-empty and aligned")
    activations, pre_acts, probs = _forward_batch(net, X)
    return _backward_from_cache(net, activations, pre_acts, probs, y)


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
) -> list[np.ndarray]:
    """One Adam update, in place on ``params``.

    t += 1; m = b1*m + (1-b1)*g; v = b2*v + (1-b2)*g^2;
    theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
    """
    if len(params) != len(grads):
        raise DimensionError("params and grads lengths differ")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1**state.t
    bias2 = 1.0 - b2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise DimensionError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        p -= lr * (m / bias1) / (np.sqrt(v / bias2) + state.eps)
    return params


def _as_matrix(features, dim: int):
    if sparse.issparse(features):
        X = features.tocsr()
    elif isinstance(features, list):
        X = stack_csr(features, dim)
    else:
        X = np.asarray(features, dtype=np.float64)
    if X.shape[1] != dim:
        raise DimensionError(f"feature dim {X.shape[1]} != network input {dim}")
    return X


def network_params(net: DenseNetwork) -> list[np.ndarray]:
    return [arr for layer in net.layers for arr in (layer.weights, layer.bias)]


def train(
    net: DenseNetwork,
    features,
    labels,
    config: TrainConfig,
) -> tuple[DenseNetwork, list[float]]:
    """Mini-batch Adam training; returns the net and per-epoch mean loss.

    Each epoch reshuffles with the seeded generator; the final partial
    batch is trained on.  The network is updated in place.
    """
    X = _as_matrix(features, net.input_dim)
    y = np.asarray(labels, dtype=np.float64)
    n = y.shape[0]
    if n == 0 or X.shape[0] != n:
        raise ConfigError("training set must be non-empty with aligned labels")
    params = network_params(net)
    state = AdamState.for_params(params)
    rng = np.random.default_rng(config.shuffle_seed)
    history = []
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            take = perm[start : start + config.batch_size]
            Xb = X[take]
            yb = y[take]
            activations, pre_acts, probs = _forward_batch(net, Xb)
            loss_sum += float(np.sum(_bce_batch(probs, yb)))
            grads = _backward_from_cache(net, activations, pre_acts, probs, yb)
            flat = [arr for dw, db in grads for arr in (dw, db)]
            adam_step(params, flat, state, config.learning_rate)
        history.append(loss_sum / n)
    return net, history


def predict(net: DenseNetwork, x: SparseVector, threshold: float = 0.5) -> int:
    """1 iff the predicted probability is >= threshold."""
    return int(forward(net, x) >= threshold)


# ---------------------------------------------------------------------------
# Serialization


def save_model(net: DenseNetwork, path: str | Path) -> None:
    arch = [net.input_dim] + [layer.weights.shape[0] for layer in net.layers]
    payload = {
        "version": 1,
        "model": "nn",
        "arch": arch,
        "activations": [layer.activation for layer in net.layers],
        "weights": [layer.weights.reshape(-1).tolist() for layer in net.layers],
        "biases": [layer.bias.tolist() for layer in net.layers],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)


def load_model(path: str | Path) -> DenseNetwork:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    if payload.get("version") != 1:
        raise ModelFormatError(f"{path}: unsupported model version {payload.get('version')}")
    try:
        arch = payload["arch"]
        layers = []
        for k, activation in enumerate(payload["activations"]):
            out_dim, in_dim = arch[k + 1], arch[k]
            weights = np.array(payload["weights"][k], dtype=np.float64).reshape(out_dim, in_dim)
            bias = np.array(payload["biases"][k], dtype=np.float64)
            layers.append(Layer(weights=weights, bias=bias, activation=activation))
        return DenseNetwork(layers=layers)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: not a network model file ({exc})") from exc
