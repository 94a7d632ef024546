"""Permutation feature importance: score drop after shuffling one test column."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def accuracy(model, X, y) -> float:
    return float(np.mean(model.predict(X) == np.asarray(y)))


def _default_permuter(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.permutation(n)


@dataclass
class PermutationReport:
    baseline: float
    scores: np.ndarray  # (features, repeats)
    seed: int
    feature_names: list = field(default_factory=list)

    @property
    def repeats(self) -> int:
        return self.scores.shape[1]

    @property
    def importances(self) -> np.ndarray:
        return self.baseline - self.scores.mean(axis=1)

    @property
    def std(self) -> np.ndarray:
        ddof = 1 if self.repeats > 1 else 0
        return self.scores.std(axis=1, ddof=ddof)

    def ranking(self) -> list[int]:
        """Feature indices, most important first (stable for ties)."""
        return [int(i) for i in np.argsort(-self.importances, kind="stable")]

    def to_dict(self) -> dict:
        return {
            "baseline_score": self.baseline,
            "repeats": self.repeats,
            "seed": self.seed,
            "features": [
                {
                    "index": j,
                    "name": self.feature_names[j] if self.feature_names else str(j),
                    "importance": float(self.importances[j]),
                    "std": float(self.std[j]),
                    "scores": [float(s) for s in self.scores[j]],
                }
                for j in range(self.scores.shape[0])
            ],
        }


def permutation_importance(
    model,
    X,
    y,
    repeats: int = 30,
    seed: int = 0,
    *,
    metric: Callable = accuracy,
    permuter: Callable[[np.random.Generator, int], np.ndarray] = _default_permuter,
    feature_names=None,
) -> PermutationReport:
    """Shuffle column ``j`` ``repeats`` times, each from generator ``(seed, j, k)``.

    ``X`` is never modified; every corrupted copy is a fresh array.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    baseline = metric(model, X, y)
    n, p = X.shape
    scores = np.empty((p, repeats))
    for j in range(p):
        for k in range(repeats):
            perm = permuter(np.random.default_rng([seed, j, k]), n)
            corrupted = X.copy()
            corrupted[:, j] = X[perm, j]
            scores[j, k] = metric(model, corrupted, y)
    return PermutationReport(baseline, scores, seed, list(feature_names or []))
