"""CART decision trees (Gini) and a bagged random forest built from them."""
from __future__ import annotations

import math

import numpy as np

LEAF = -1


class TreeBuilder:
    """Grows one CART tree on integer sample weights.

    Equal-gain candidates resolve to the lowest feature index, then the
    lowest threshold, which keeps the tree independent of evaluation order.
    """

    def __init__(self, max_depth: int = 8, min_split: int = 2, max_features: int | None = None,
                 rng: np.random.Generator | None = None):
        self.max_depth = max_depth
        self.min_split = min_split
        self.max_features = max_features
        self.rng = rng

    def build(self, x: np.ndarray, positive: np.ndarray, weights: np.ndarray | None = None) -> dict:
        n, n_features = x.shape
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
        pos = w * positive
        self._x, self._w, self._pos, self._nf = x, w, pos, n_features
        self.nodes = {"feature": [], "threshold": [], "left": [], "right": [], "value": [], "weight": []}
        self._grow(np.flatnonzero(w > 0), 0)
        return {k: list(v) for k, v in self.nodes.items()}

    def _new_node(self, total: float, positives: float) -> int:
        nodes = self.nodes
        nodes["feature"].append(LEAF)
        nodes["threshold"].append(0.0)
        nodes["left"].append(LEAF)
        nodes["right"].append(LEAF)
        nodes["value"].append(positives / total)
        nodes["weight"].append(total)
        return len(nodes["feature"]) - 1

    def _candidate_features(self) -> np.ndarray:
        if self.max_features is None or self.max_features >= self._nf:
            return np.arange(self._nf)
        return np.sort(self.rng.choice(self._nf, size=self.max_features, replace=False))

    def _grow(self, idx: np.ndarray, depth: int) -> int:
        total = float(self._w[idx].sum())
        positives = float(self._pos[idx].sum())
        node = self._new_node(total, positives)
        if depth >= self.max_depth or total < self.min_split or positives in (0.0, total):
            return node
        split = self._best_split(idx, total, positives)
        if split is None:
            return node
        feature, threshold = split
        go_left = self._x[idx, feature] <= threshold
        self.nodes["feature"][node] = feature
        self.nodes["threshold"][node] = threshold
        self.nodes["left"][node] = self._grow(idx[go_left], depth + 1)
        self.nodes["right"][node] = self._grow(idx[~go_left], depth + 1)
        return node

    def _best_split(self, idx, total, positives):
        negatives = total - positives
        parent = total - (positives ** 2 + negatives ** 2) / total
        best = None
        best_score = parent - 1e-12 * total
        for f in self._candidate_features():
            values = self._x[idx, f]
            order = np.argsort(values, kind="stable")
            v = values[order]
            cut = np.flatnonzero(v[:-1] < v[1:])
            if cut.size == 0:
                continue
            wl = np.cumsum(self._w[idx][order])[cut]
            pl = np.cumsum(self._pos[idx][order])[cut]
            nl = wl - pl
            wr = total - wl
            pr = positives - pl
            nr = wr - pr
            score = wl - (pl * pl + nl * nl) / wl + wr - (pr * pr + nr * nr) / wr
            k = int(np.argmin(score))
            if score[k] < best_score:
                lo, hi = v[cut[k]], v[cut[k] + 1]
                threshold = lo + (hi - lo) / 2.0
                if not lo <= threshold < hi:
                    threshold = lo
                best_score = score[k]
                best = (int(f), float(threshold))
        return best


def tree_predict(tree: dict, x: np.ndarray) -> np.ndarray:
    """Leaf positive fraction for each row of ``x``."""
    feature = tree["feature"]
    threshold = tree["threshold"]
    left, right, value = tree["left"], tree["right"], tree["value"]
    out = np.empty(len(x))
    for r, row in enumerate(x):
        node = 0
        while feature[node] != LEAF:
            node = left[node] if row[feature[node]] <= threshold[node] else right[node]
        out[r] = value[node]
    return out


def default_max_features(n_features: int) -> int:
    return max(1, round(math.sqrt(n_features)))


def fit_forest(x: np.ndarray, positive: np.ndarray, seed: int, n_trees: int = 100, max_depth: int = 8,
               min_split: int = 2, max_features: int | None = None, bootstrap: bool = True) -> list[dict]:
    """Bagged trees; each tree draws from its own stream spawned from ``seed``."""
    n = len(x)
    if max_features is None:
        max_features = default_max_features(x.shape[1])
    trees = []
    for stream in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(stream)
        weights = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.float64) if bootstrap else None
        builder = TreeBuilder(max_depth, min_split, max_features, rng)
        trees.append(builder.build(x, positive, weights))
    return trees


def forest_votes(trees: list[dict], x: np.ndarray) -> np.ndarray:
    """Fraction of trees whose leaf majority is positive (ties vote positive)."""
    votes = np.zeros(len(x))
    for tree in trees:
        votes += tree_predict(tree, x) >= 0.5
    return votes / len(trees)
