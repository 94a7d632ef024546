"""Accumulated local effects of a feature on predicted class probabilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateFeatureError(ValueError):
    pass


@dataclass
class AleCurve:
    """ALE of feature ``feature`` on the probability of class ``cls``.

    ``edges`` has ``K + 1`` grid points, ``counts``/``effects`` one entry per
    interval ``(edges[k-1], edges[k]]`` (the first interval also holds the
    minimum). ``values[k]`` is the uncentered curve at ``edges[k]`` and
    ``values[0] = 0``. A sample in interval ``k`` takes value ``values[k]``,
    and ``centered`` subtracts the mean of those sample values.
    """

    feature: int
    cls: int
    edges: np.ndarray
    counts: np.ndarray
    effects: np.ndarray
    values: np.ndarray
    centered: np.ndarray

    def weighted_mean(self) -> float:
        return float(self.counts @ self.centered[1:] / self.counts.sum())

    @property
    def range(self) -> float:
        return float(self.centered.max() - self.centered.min())

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "class": self.cls,
            "edges": self.edges.tolist(),
            "counts": self.counts.tolist(),
            "effects": self.effects.tolist(),
            "uncentered": self.values.tolist(),
            "centered": self.centered.tolist(),
        }


def quantile_edges(column: np.ndarray, num_intervals: int) -> np.ndarray:
    """Empirical quantiles taken at observed values; duplicates collapsed."""
    q = np.linspace(0.0, 1.0, num_intervals + 1)
    return np.unique(np.quantile(column, q, method="inverted_cdf"))


def ale_curves(model, X, feature: int, num_intervals: int = 10) -> list[AleCurve]:
    """One curve per class, sharing the grid and the model evaluations."""
    if num_intervals < 2:
        raise ValueError("num_intervals must be >= 2")
    X = np.asarray(X, dtype=float)
    col = X[:, feature]
    edges = quantile_edges(col, num_intervals)
    if edges.size < 2:
        raise DegenerateFeatureError(f"feature {feature} is constant")
    K = edges.size - 1
    k_of = np.clip(np.searchsorted(edges, col, side="left"), 1, K)

    lo = X.copy()
    hi = X.copy()
    lo[:, feature] = edges[k_of - 1]
    hi[:, feature] = edges[k_of]
    proba = model.predict_proba(np.vstack([lo, hi]))
    n = X.shape[0]
    diff = proba[n:] - proba[:n]

    counts = np.bincount(k_of - 1, minlength=K).astype(float)
    curves = []
    for c in range(proba.shape[1]):
        sums = np.bincount(k_of - 1, weights=diff[:, c], minlength=K)
        effects = np.divide(sums, counts, out=np.zeros(K), where=counts > 0)
        values = np.concatenate([[0.0], np.cumsum(effects)])
        constant = float(counts @ values[1:] / n)
        curves.append(
            AleCurve(feature, c, edges, counts, effects, values, values - constant)
        )
    return curves


def ale_curve(model, X, feature: int, cls: int, num_intervals: int = 10) -> AleCurve:
    return ale_curves(model, X, feature, num_intervals)[cls]


def ale_importance(model, X, classes=None, num_intervals: int = 10) -> np.ndarray:
    """Per feature: the largest range of any class's centered curve."""
    X = np.asarray(X, dtype=float)
    out = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        curves = ale_curves(model, X, j, num_intervals)
        chosen = curves if classes is None else [curves[c] for c in classes]
        out[j] = max(cv.range for cv in chosen)
    return out
