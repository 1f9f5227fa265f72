"""RBF support vector machine trained by SMO with maximal-violating-pair selection."""
from __future__ import annotations

import numpy as np


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * a @ b.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def smo(kernel: np.ndarray, y: np.ndarray, c: float = 1.0, tol: float = 1e-3,
        max_iter: int = 10_000) -> tuple[np.ndarray, float]:
    """Solve the soft-margin dual for labels ``y`` in {-1, +1}.

    Returns ``(alpha, rho)`` with decision ``f(x) = sum(alpha*y*K(x_i, x)) - rho``.
    Working pairs are the maximal KKT violators; the loop stops once the
    violation gap drops below ``tol`` or after ``max_iter`` updates.
    """
    n = len(y)
    y = y.astype(np.float64)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(kernel).copy()
    for _ in range(max_iter):
        yg = -y * grad
        up = ((alpha < c) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < c) & (y < 0)) | ((alpha > 0) & (y > 0))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        if yg[i] - yg[j] < tol:
            break
        q_i = y[i] * y * kernel[i]
        q_j = y[j] * y * kernel[j]
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(diag[i] + diag[j] + 2.0 * q_i[j], 1e-12)
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > c:
                    alpha[i], alpha[j] = c, c - diff
            elif alpha[j] > c:
                alpha[j], alpha[i] = c, c + diff
        else:
            quad = max(diag[i] + diag[j] - 2.0 * q_i[j], 1e-12)
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i], alpha[j] = c, total - c
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, total
            if total > c:
                if alpha[j] > c:
                    alpha[j], alpha[i] = c, total - c
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, total
        grad += q_i * (alpha[i] - old_i) + q_j * (alpha[j] - old_j)
    return alpha, _rho(alpha, grad, y, c)


def _rho(alpha, grad, y, c) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < c)
    if free.any():
        return float(yg[free].mean())
    up = ((alpha < c) & (y > 0)) | ((alpha > 0) & (y < 0))
    low = ((alpha < c) & (y < 0)) | ((alpha > 0) & (y > 0))
    ub = yg[up].min() if up.any() else np.inf
    lb = yg[low].max() if low.any() else -np.inf
    if not np.isfinite(ub) or not np.isfinite(lb):
        return float(ub if np.isfinite(ub) else lb)
    return float((ub + lb) / 2.0)


def fit_svm(x: np.ndarray, labels: np.ndarray, c: float, gamma: float | None, tol: float, max_iter: int) -> dict:
    if gamma is None:
        var = float(x.var())
        gamma = 1.0 / (x.shape[1] * var) if var > 0 else 1.0
    y = np.where(labels, 1.0, -1.0)
    alpha, rho = smo(rbf_kernel(x, x, gamma), y, c, tol, max_iter)
    sv = alpha > 0
    return {"gamma": gamma, "rho": rho, "support_vectors": x[sv], "dual_coef": (alpha * y)[sv]}


def svm_margin(params: dict, x: np.ndarray) -> np.ndarray:
    sv = np.asarray(params["support_vectors"]).reshape(-1, x.shape[1])
    if len(sv) == 0:
        return np.full(len(x), -params["rho"])
    return rbf_kernel(x, sv, params["gamma"]) @ np.asarray(params["dual_coef"]) - params["rho"]
