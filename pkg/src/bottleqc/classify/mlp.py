"""One-hidden-layer network: ReLU hidden units, sigmoid output, cross-entropy loss."""
import numpy as np


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_mlp(x: np.ndarray, positive: np.ndarray, seed: int, hidden: int = 16, lr: float = 0.05,
            epochs: int = 200, init: float = 0.1) -> dict:
    rng = np.random.default_rng(seed)
    n, d = x.shape
    w1 = rng.uniform(-init, init, size=(d, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.uniform(-init, init, size=hidden)
    b2 = 0.0
    y = positive.astype(np.float64)
    for _ in range(epochs):
        pre = x @ w1 + b1
        h = np.maximum(pre, 0.0)
        p = sigmoid(h @ w2 + b2)
        # d(mean BCE)/d(logit) = p - y
        dz = (p - y) / n
        gw2 = h.T @ dz
        gb2 = dz.sum()
        dh = np.outer(dz, w2) * (pre > 0)
        gw1 = x.T @ dh
        gb1 = dh.sum(axis=0)
        w1 -= lr * gw1
        b1 -= lr * gb1
        w2 -= lr * gw2
        b2 -= lr * gb2
    return {"w1": w1, "b1": b1, "w2": w2, "b2": float(b2)}


def mlp_output(params: dict, x: np.ndarray) -> np.ndarray:
    h = np.maximum(x @ np.asarray(params["w1"]) + np.asarray(params["b1"]), 0.0)
    return sigmoid(h @ np.asarray(params["w2"]) + params["b2"])
