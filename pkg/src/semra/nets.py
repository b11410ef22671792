"""Small dense networks with explicit forward/backward passes.

Everything here is plain float64 numpy so gradients are exactly checkable
against central finite differences. Hidden layers use SiLU, which is smooth;
ReLU kinks would poison finite-difference comparisons near zero.
"""

from __future__ import annotations

import numpy as np


def silu(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.exp(-x))


def silu_grad(x: np.ndarray) -> np.ndarray:
    s = 1.0 / (1.0 + np.exp(-x))
    return s * (1.0 + x * (1.0 - s))


def timestep_embedding(t: int, dim: int) -> np.ndarray:
    """Sinusoidal embedding of a (1-based) denoising step index."""
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half - 1, 1))
    angles = t * freqs
    return np.concatenate([np.sin(angles), np.cos(angles)])


class MLP:
    """Fully connected net: linear layers, SiLU on hidden, linear output.

    ``forward`` returns a cache that ``backward`` consumes to produce both
    the input gradient and per-parameter gradients. Parameters are the flat
    list [W1, b1, W2, b2, ...] and can be round-tripped through a single
    flat vector for optimizers, checkpoints, and finite-difference tests.
    """

    def __init__(self, sizes: list[int], rng: np.random.Generator):
        if len(sizes) < 2:
            raise ValueError("MLP needs at least input and output sizes")
        self.sizes = list(sizes)
        self.params: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(2.0 / (fan_in + fan_out))
            self.params.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            self.params.append(np.zeros(fan_out))

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def forward(self, x: np.ndarray):
        """x: (B, in) -> (out (B, out), cache)."""
        h = np.asarray(x, dtype=float)
        inputs = []
        preacts = []
        for layer in range(self.n_layers):
            w, b = self.params[2 * layer], self.params[2 * layer + 1]
            inputs.append(h)
            z = h @ w + b
            if layer < self.n_layers - 1:
                preacts.append(z)
                h = silu(z)
            else:
                preacts.append(None)
                h = z
        return h, (inputs, preacts)

    def backward(self, cache, grad_out: np.ndarray):
        """Returns (grad wrt input, gradient list matching ``self.params``)."""
        inputs, preacts = cache
        grads: list[np.ndarray | None] = [None] * len(self.params)
        g = np.asarray(grad_out, dtype=float)
        for layer in range(self.n_layers - 1, -1, -1):
            w = self.params[2 * layer]
            if preacts[layer] is not None:
                g = g * silu_grad(preacts[layer])
            grads[2 * layer] = inputs[layer].T @ g
            grads[2 * layer + 1] = g.sum(axis=0)
            g = g @ w.T
        return g, grads

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=float)
        offset = 0
        for i, p in enumerate(self.params):
            self.params[i] = flat[offset : offset + p.size].reshape(p.shape).copy()
            offset += p.size
        if offset != flat.size:
            raise ValueError(f"flat vector has {flat.size} entries, expected {offset}")

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params)


class Adam:
    """Adaptive-moment gradient ascent/descent on a list of parameter arrays."""

    def __init__(self, params: list[np.ndarray], lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Apply one descent step in place."""
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
