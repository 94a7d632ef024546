"""Leave-one-out feature importance by retraining without each column."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .permutation import accuracy


@dataclass
class LooReport:
    full_score: float
    scores: list  # score without feature j, None when retraining failed
    errors: dict = field(default_factory=dict)
    feature_names: list = field(default_factory=list)

    @property
    def deltas(self) -> list:
        return [None if s is None else self.full_score - s for s in self.scores]

    def to_dict(self) -> dict:
        return {
            "full_score": self.full_score,
            "features": [
                {
                    "index": j,
                    "name": self.feature_names[j] if self.feature_names else str(j),
                    "score_without": s,
                    "delta": d,
                    "error": self.errors.get(j),
                }
                for j, (s, d) in enumerate(zip(self.scores, self.deltas))
            ],
        }


def loo_importance(
    trainer: Callable,
    X_train,
    y_train,
    X_test,
    y_test,
    *,
    metric: Callable = accuracy,
    full_model=None,
    feature_names=None,
) -> LooReport:
    """``trainer(X, y) -> model`` is called once on all features and once per
    omitted column. A failing retrain is recorded for that feature only.
    """
    X_train = np.asarray(X_train, dtype=float)
    X_test = np.asarray(X_test, dtype=float)
    p = X_train.shape[1]
    if p < 2:
        raise ValueError("leave-one-out needs at least two features")
    full = full_model if full_model is not None else trainer(X_train, y_train)
    full_score = metric(full, X_test, y_test)
    scores, errors = [], {}
    for j in range(p):
        keep = [c for c in range(p) if c != j]
        try:
            model = trainer(X_train[:, keep], y_train)
            scores.append(metric(model, X_test[:, keep], y_test))
        except Exception as exc:
            scores.append(None)
            errors[j] = f"{type(exc).__name__}: {exc}"
    return LooReport(full_score, scores, errors, list(feature_names or []))
