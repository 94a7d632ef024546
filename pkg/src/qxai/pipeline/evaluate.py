"""Classification reports, confusion matrices and bootstrap accuracy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EvaluationReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    accuracy: float
    confusion: np.ndarray  # rows: true class, columns: predicted
    misclassified: list = field(default_factory=list)  # (test position, true, predicted)
    bootstrap: dict | None = None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": [
                {"class": c, "precision": float(self.precision[c]), "recall": float(self.recall[c]),
                 "f1": float(self.f1[c]), "support": int(self.support[c])}
                for c in range(self.precision.size)
            ],
            "confusion_matrix": self.confusion.tolist(),
            "misclassified": [
                {"test_index": i, "true": t, "predicted": p} for i, t, p in self.misclassified
            ],
            "bootstrap": self.bootstrap,
        }


def classification_report(y_true, y_pred, num_classes: int) -> EvaluationReport:
    """Per-class metrics with 0/0 taken as 0."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    cm = np.zeros((num_classes, num_classes), dtype=int)
    np.add.at(cm, (y_true, y_pred), 1)
    tp = np.diag(cm).astype(float)
    predicted = cm.sum(axis=0).astype(float)
    actual = cm.sum(axis=1).astype(float)
    precision = np.divide(tp, predicted, out=np.zeros(num_classes), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros(num_classes), where=actual > 0)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros(num_classes), where=denom > 0)
    wrong = np.flatnonzero(y_true != y_pred)
    return EvaluationReport(
        precision, recall, f1, actual.astype(int), float(np.trace(cm) / y_true.size), cm,
        [(int(i), int(y_true[i]), int(y_pred[i])) for i in wrong],
    )


def evaluate(model, X_test, y_test, num_classes: int | None = None) -> EvaluationReport:
    k = num_classes if num_classes is not None else model.num_classes
    return classification_report(y_test, model.predict(X_test), k)


def bootstrap_accuracy(y_true, y_pred, resamples: int = 1000, seed: int = 0) -> dict:
    """Accuracy over test-set resamples with replacement, from cached predictions."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    n = y_true.size
    if n == 0:
        raise ValueError("empty test set")
    correct = (y_true == y_pred).astype(float)
    idx = np.random.default_rng(seed).integers(0, n, size=(resamples, n))
    scores = correct[idx].mean(axis=1)
    return {
        "resamples": resamples,
        "seed": seed,
        "mean": float(scores.mean()),
        "p25": float(np.percentile(scores, 25)),
        "p75": float(np.percentile(scores, 75)),
        "scores": scores.tolist(),
    }
