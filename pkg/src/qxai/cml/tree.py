"""Greedy CART classification trees and bootstrap-aggregated forests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import ClassifierModel, DataError

LEAF = -1


@dataclass
class DecisionTree(ClassifierModel):
    """Flat-array tree. Node ``k`` splits on ``feature[k] <= threshold[k]``
    (left) or is a leaf when ``feature[k] == -1``; ``counts[k]`` holds the
    class frequencies of the training samples that reached it.
    """

    kind: str = "TREE"
    num_classes: int = 0
    feature: np.ndarray = field(default=None, repr=False)
    threshold: np.ndarray = field(default=None, repr=False)
    left: np.ndarray = field(default=None, repr=False)
    right: np.ndarray = field(default=None, repr=False)
    counts: np.ndarray = field(default=None, repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.feature.size

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for k in range(self.node_count):
            if self.feature[k] != LEAF:
                depth[self.left[k]] = depth[self.right[k]] = depth[k] + 1
        return int(depth.max())

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] != LEAF
        return node

    def predict_proba(self, X) -> np.ndarray:
        c = self.counts[self.apply(X)]
        return c / c.sum(axis=1, keepdims=True)

    def used_features(self) -> set[int]:
        return {int(f) for f in self.feature if f != LEAF}


def _best_split(X, y, num_classes, features, min_leaf):
    """Lowest weighted Gini over ``features`` (ties: lowest feature, then threshold)."""
    n = y.size
    best = (np.inf, -1, 0.0)
    onehot = np.eye(num_classes)[y]
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        left = np.cumsum(onehot[order], axis=0)[:-1]
        total = left[-1] + onehot[order[-1]]
        n_left = np.arange(1, n)
        n_right = n - n_left
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        right = total - left
        gini_l = 1.0 - np.sum(left**2, axis=1) / n_left**2
        gini_r = 1.0 - np.sum(right**2, axis=1) / n_right**2
        impurity = (n_left * gini_l + n_right * gini_r) / n
        impurity[~valid] = np.inf
        k = int(np.argmin(impurity))
        if impurity[k] < best[0]:
            best = (float(impurity[k]), int(f), 0.5 * (xs[k] + xs[k + 1]))
    return best


def tree_fit(
    X,
    y,
    *,
    num_classes: int | None = None,
    max_depth: int | None = None,
    min_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.Generator | int | None = 0,
) -> DecisionTree:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).reshape(-1)
    if y.size == 0:
        raise DataError("cannot fit a tree on empty data")
    k = int(num_classes if num_classes is not None else y.max() + 1)
    p = X.shape[1]
    mf = p if max_features is None else max(1, min(p, int(max_features)))
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(np.bincount(y[idx], minlength=k).astype(float))
        return len(feature) - 1

    root = new_node(np.arange(y.size))
    stack = [(root, np.arange(y.size), 0)]
    while stack:
        node, idx, depth = stack.pop()
        c = counts[node]
        if np.count_nonzero(c) <= 1 or idx.size < 2 * min_leaf:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        feats = np.arange(p) if mf == p else np.sort(rng.choice(p, mf, replace=False))
        imp, f, thr = _best_split(X[idx], y[idx], k, feats, min_leaf)
        if f < 0:
            continue
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        # right pushed first so the left subtree gets lower node ids
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return DecisionTree(
        num_classes=k,
        feature=np.array(feature, dtype=np.intp),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.intp),
        right=np.array(right, dtype=np.intp),
        counts=np.array(counts, dtype=float),
        metadata={"max_depth": max_depth, "min_leaf": min_leaf, "max_features": mf},
    )


@dataclass
class ForestModel(ClassifierModel):
    """``predict_proba`` is the plain mean of the member trees' leaf frequencies."""

    kind: str = "RF"
    num_classes: int = 0
    trees: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros((X.shape[0], self.num_classes))
        for t in self.trees:
            total += t.predict_proba(X)
        return total / len(self.trees)


def forest_fit(
    X,
    y,
    *,
    trees: int = 100,
    bootstrap: bool = True,
    max_features: int | str | None = "sqrt",
    max_depth: int | None = None,
    min_leaf: int = 1,
    seed: int = 0,
    num_classes: int | None = None,
) -> ForestModel:
    """Tree ``b`` draws its bootstrap sample and feature subsets from seed ``seed + b``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).reshape(-1)
    if trees < 1:
        raise ValueError("need at least one tree")
    k = int(num_classes if num_classes is not None else y.max() + 1)
    n, p = X.shape
    if max_features == "sqrt":
        mf = max(1, int(np.sqrt(p)))
    else:
        mf = p if max_features is None else int(max_features)
    members = []
    for b in range(trees):
        rng = np.random.default_rng(seed + b)
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        members.append(
            tree_fit(X[idx], y[idx], num_classes=k, max_depth=max_depth,
                     min_leaf=min_leaf, max_features=mf, rng=rng)
        )
    meta = {"trees": trees, "bootstrap": bootstrap, "max_features": mf,
            "max_depth": max_depth, "min_leaf": min_leaf, "seed": seed}
    return ForestModel(num_classes=k, trees=members, metadata=meta)
