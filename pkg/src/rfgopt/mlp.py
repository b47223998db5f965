"""Small feed-forward networks with paired primal/tangent passes.

The network family is u1 = W1 x + b1, ul = Wl phi(u_{l-1}) + bl for
l = 2..L (no activation after the last layer).  Tangent propagation is
done with whole-tensor primal/tangent pairs rather than per-element dual
scalars; the semantics are identical and the throughput is what the
optimizer loops need.  The analytic loss gradient below is the
fixed-architecture baseline (hand-written backward pass for this family,
not a general reverse-mode facility).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MlpParameters",
    "init_mlp",
    "mlp_forward",
    "mlp_loss",
    "mlp_jvp",
    "mlp_loss_gradient",
]

_ACTIVATIONS = ("tanh", "relu")


@dataclass
class MlpParameters:
    """Layer weights/biases plus the hidden activation name."""

    weights: list
    biases: list
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"activation must be one of {_ACTIVATIONS}, got {self.activation!r}")
        if len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must have the same number of layers")
        if not self.weights:
            raise ValueError("need at least one layer")
        self.weights = [np.asarray(W, dtype=float) for W in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for idx, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.ndim != 1 or W.shape[0] != b.shape[0]:
                raise ValueError(f"layer {idx}: weight {W.shape} and bias {b.shape} do not chain")
            if idx > 0 and W.shape[1] != self.weights[idx - 1].shape[0]:
                raise ValueError(
                    f"layer {idx}: expects {W.shape[1]} inputs, previous layer emits "
                    f"{self.weights[idx - 1].shape[0]}"
                )

    @property
    def depth(self):
        return len(self.weights)

    @property
    def size(self):
        return sum(W.size for W in self.weights) + sum(b.size for b in self.biases)

    def flatten(self):
        """Concatenate all parameter tensors into one vector (W1,b1,W2,b2,...)."""
        parts = []
        for W, b in zip(self.weights, self.biases):
            parts.append(W.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def with_flat(self, vec):
        """Rebuild parameters with the same shapes from a flat vector."""
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (self.size,):
            raise ValueError(f"expected flat vector of length {self.size}, got shape {vec.shape}")
        weights, biases, pos = [], [], 0
        for W, b in zip(self.weights, self.biases):
            weights.append(vec[pos : pos + W.size].reshape(W.shape))
            pos += W.size
            biases.append(vec[pos : pos + b.size].copy())
            pos += b.size
        return MlpParameters(weights, biases, self.activation)

    def zeros_like(self):
        return MlpParameters(
            [np.zeros_like(W) for W in self.weights],
            [np.zeros_like(b) for b in self.biases],
            self.activation,
        )


def init_mlp(layer_sizes, rng, activation="tanh"):
    """Seeded uniform init on (-1/sqrt(fan_in), 1/sqrt(fan_in)) per layer."""
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    return MlpParameters(weights, biases, activation)


def _act(u, kind):
    return np.tanh(u) if kind == "tanh" else np.maximum(u, 0.0)


def _act_deriv(u, kind):
    if kind == "tanh":
        t = np.tanh(u)
        return 1.0 - t * t
    # derivative 0 at the kink
    return (u > 0.0).astype(float)


def _forward_layers(params, x):
    """Pre-activations u_l for every layer; x has shape (m, n_in)."""
    us = []
    a = x
    for idx, (W, b) in enumerate(zip(params.weights, params.biases)):
        if idx > 0:
            a = _act(us[-1], params.activation)
        us.append(a @ W.T + b)
    return us


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return x


def mlp_forward(params, x_batch):
    """Network outputs, shape (m, n_out)."""
    return _forward_layers(params, _as_batch(x_batch))[-1]


def mlp_loss(params, x_batch, y_batch):
    """Mean squared error (1/m) sum_j ||u(x_j) - y_j||^2."""
    out = mlp_forward(params, x_batch)
    y = _as_batch(y_batch)
    return float(np.sum((out - y) ** 2) / out.shape[0])


def mlp_jvp(params, x_batch, y_batch, seed):
    """Loss value and its directional derivative along a parameter seed.

    ``seed`` is an :class:`MlpParameters` with the same shapes; one tangent
    tensor rides along with each primal tensor through the forward pass and
    the loss, giving (f(theta), grad_theta f(theta)^T seed) exactly.
    """
    from .forward_ad import TangentEvaluation

    x = _as_batch(x_batch)
    y = _as_batch(y_batch)
    if len(seed.weights) != len(params.weights):
        raise ValueError("seed layer count does not match parameters")
    for Ws, W in zip(seed.weights, params.weights):
        if Ws.shape != W.shape:
            raise ValueError(f"seed weight shape {Ws.shape} does not match {W.shape}")
    for bs, b in zip(seed.biases, params.biases):
        if bs.shape != b.shape:
            raise ValueError(f"seed bias shape {bs.shape} does not match {b.shape}")

    a, ta = x, np.zeros_like(x)
    u = tu = None
    for idx in range(params.depth):
        W, b = params.weights[idx], params.biases[idx]
        dW, db = seed.weights[idx], seed.biases[idx]
        if idx > 0:
            a = _act(u, params.activation)
            ta = _act_deriv(u, params.activation) * tu
        u = a @ W.T + b
        tu = a @ dW.T + ta @ W.T + db
    m = x.shape[0]
    resid = u - y
    value = float(np.sum(resid ** 2) / m)
    deriv = float(np.sum(2.0 * resid * tu) / m)
    return TangentEvaluation(value, deriv)


def mlp_loss_gradient(params, x_batch, y_batch):
    """Analytic gradient of the mean squared error for this family.

    Backward pass written out for the fixed architecture; returns an
    :class:`MlpParameters` holding dL/dW_l and dL/db_l.
    """
    x = _as_batch(x_batch)
    y = _as_batch(y_batch)
    us = _forward_layers(params, x)
    m = x.shape[0]
    delta = 2.0 * (us[-1] - y) / m
    grad_w = [None] * params.depth
    grad_b = [None] * params.depth
    for idx in range(params.depth - 1, -1, -1):
        a_prev = x if idx == 0 else _act(us[idx - 1], params.activation)
        grad_w[idx] = delta.T @ a_prev
        grad_b[idx] = delta.sum(axis=0)
        if idx > 0:
            delta = (delta @ params.weights[idx]) * _act_deriv(us[idx - 1], params.activation)
    return MlpParameters(grad_w, grad_b, params.activation)
