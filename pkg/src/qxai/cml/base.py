"""Uniform trained-model contract shared by every classifier."""

from __future__ import annotations

import numpy as np


class DataError(ValueError):
    pass


class ClassifierModel:
    """Subclasses set ``kind``, ``num_classes`` and ``metadata`` and implement
    ``predict_proba``. Labels are the argmax of the probabilities (lowest
    class index on exact ties), so the two never disagree.
    """

    kind: str
    num_classes: int
    metadata: dict

    def predict_proba(self, X) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))
