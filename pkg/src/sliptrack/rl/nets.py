"""Small dense networks with hand-written backprop.

Everything is plain numpy so training is exactly reproducible from a
seed and checkpoints carry nothing but arrays.  Hidden layers use tanh,
the output layer is linear.
"""

from __future__ import annotations

import math

import numpy as np


class MLP:
    def __init__(self, sizes, rng: np.random.Generator):
        self.sizes = tuple(sizes)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def params(self) -> list:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def set_params(self, params):
        n = len(self.weights)
        for i in range(n):
            self.weights[i] = params[2 * i]
            self.biases[i] = params[2 * i + 1]

    def forward(self, x: np.ndarray):
        """Returns the output and the per-layer activations for backward."""
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            h = z if layer == last else np.tanh(z)
            acts.append(h)
        return h, acts

    def __call__(self, x):
        return self.forward(x)[0]

    def backward(self, acts, dout):
        """Gradients of sum(loss) given d loss / d output.

        Returns (param grads in self.params order, d loss / d input).
        """
        grads = [None] * (2 * len(self.weights))
        d = dout
        last = len(self.weights) - 1
        for layer in range(last, -1, -1):
            if layer != last:
                h = acts[layer + 1]
                d = d * (1.0 - h * h)  # through tanh
            a_in = acts[layer]
            grads[2 * layer] = a_in.T @ d
            grads[2 * layer + 1] = d.sum(axis=0)
            d = d @ self.weights[layer].T
        return grads, d


class Adam:
    """Standard Adam with bias correction, one instance per network."""

    def __init__(self, params, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def polyak_update(target: MLP, online: MLP, tau: float):
    for t, p in zip(target.params, online.params):
        t *= 1.0 - tau
        t += tau * p
