"""Exact interventional Shapley values by enumerating every feature coalition."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

MAX_FEATURES = 12


class CombinatorialBoundError(ValueError):
    pass


@dataclass
class ShapExplanation:
    x: np.ndarray
    base_values: np.ndarray  # (classes,)
    values: np.ndarray  # (classes, features)
    prediction: np.ndarray  # (classes,) model probabilities at x
    background_id: str = ""

    def efficiency_gap(self) -> np.ndarray:
        return self.values.sum(axis=1) - (self.prediction - self.base_values)

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "background": self.background_id,
            "classes": [
                {
                    "class": c,
                    "base_value": float(self.base_values[c]),
                    "prediction": float(self.prediction[c]),
                    "shap_values": self.values[c].tolist(),
                }
                for c in range(self.values.shape[0])
            ],
        }


def _coalition_weights(p: int) -> np.ndarray:
    return np.array([factorial(s) * factorial(p - s - 1) / factorial(p) for s in range(p)])


def coalition_values(model, x, background) -> np.ndarray:
    """``v[mask, c]``: mean class-``c`` probability with ``x`` on the features in
    ``mask`` (bit ``i`` = feature ``i``) and background rows elsewhere."""
    x = np.asarray(x, dtype=float).reshape(-1)
    bg = np.atleast_2d(np.asarray(background, dtype=float))
    p = x.size
    if bg.shape[0] == 0:
        raise ValueError("background set is empty")
    if bg.shape[1] != p:
        raise ValueError("background and x have different feature counts")
    if p > MAX_FEATURES:
        raise CombinatorialBoundError(f"exact enumeration supports at most {MAX_FEATURES} features")
    masks = np.arange(1 << p)
    on = ((masks[:, None] >> np.arange(p)) & 1).astype(bool)  # (2^p, p)
    rows = np.where(on[:, None, :], x[None, None, :], bg[None, :, :])
    proba = model.predict_proba(rows.reshape(-1, p))
    return proba.reshape(1 << p, bg.shape[0], -1).mean(axis=1)


def shapley_from_values(v: np.ndarray, p: int) -> np.ndarray:
    """Shapley values ``(classes, p)`` from coalition values ``(2^p, classes)``."""
    w = _coalition_weights(p)
    masks = np.arange(1 << p)
    sizes = np.array([bin(m).count("1") for m in masks])
    phi = np.zeros((p, v.shape[1]))
    for i in range(p):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = (w[sizes[without]][:, None] * (v[without | bit] - v[without])).sum(axis=0)
    return phi.T


def shap_exact(model, x, background, cls: int | None = None, background_id: str = "") -> ShapExplanation:
    """All classes are computed together; ``cls`` narrows the returned arrays."""
    x = np.asarray(x, dtype=float).reshape(-1)
    v = coalition_values(model, x, background)
    phi = shapley_from_values(v, x.size)
    pred = np.asarray(model.predict_proba(x[None, :])[0], dtype=float)
    base = v[0]
    if cls is not None:
        phi, base, pred = phi[[cls]], base[[cls]], pred[[cls]]
    return ShapExplanation(x, base, phi, pred, background_id)


def shap_global(model, X, background) -> dict:
    """Mean ``|phi|`` over the rows of ``X``: per class ``(classes, p)`` and pooled ``(p,)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return aggregate_global([shap_exact(model, x, background) for x in X])


def aggregate_global(explanations) -> dict:
    per_class = np.stack([np.abs(e.values) for e in explanations]).mean(axis=0)
    return {"per_class": per_class, "pooled": per_class.mean(axis=0)}


def subsample_background(X, max_rows: int = 100, seed: int = 0) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] <= max_rows:
        return X.copy()
    idx = np.sort(np.random.default_rng(seed).choice(X.shape[0], max_rows, replace=False))
    return X[idx]
