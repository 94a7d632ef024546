"""CSV ingestion, min-max scaling and train/test splitting."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

IRIS_CLASSES = ("setosa", "versicolor", "virginica")


class IngestionError(ValueError):
    pass


class LabelError(IngestionError):
    pass


class DatasetSizeError(IngestionError):
    pass


class DegenerateScaleError(ValueError):
    pass


def bundled_iris_path() -> Path:
    return Path(str(resources.files("qxai") / "data" / "iris.csv"))


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list
    class_names: list
    provenance: dict = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def __len__(self) -> int:
        return self.y.size


def _normalize_label(s: str) -> str:
    s = s.strip().lower()
    return s[5:] if s.startswith("iris-") else s


def load_csv(path=None, class_names=IRIS_CLASSES) -> Dataset:
    """Header row, numeric feature columns, class label in the last column."""
    path = Path(path) if path is not None else bundled_iris_path()
    raw = path.read_bytes()
    rows = list(csv.reader(raw.decode("utf-8").splitlines()))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise DatasetSizeError(f"{path}: file is empty")
    header, body = rows[0], rows[1:]
    if not body:
        raise DatasetSizeError(f"{path}: no data rows after the header")
    if len(header) < 2:
        raise IngestionError(f"{path}: need at least one feature column and a label")
    lookup = {_normalize_label(c): i for i, c in enumerate(class_names)}
    X = np.empty((len(body), len(header) - 1))
    y = np.empty(len(body), dtype=int)
    for r, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise IngestionError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        for c, cell in enumerate(row[:-1]):
            try:
                v = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: row {r}, column {header[c]!r}: "
                    + ("missing value" if not cell.strip() else f"not a number ({cell!r})")
                ) from None
            if not math.isfinite(v):
                raise IngestionError(f"{path}: row {r}, column {header[c]!r}: non-finite value")
            X[r - 2, c] = v
        label = _normalize_label(row[-1])
        if label not in lookup:
            raise LabelError(f"{path}: row {r}: unknown class {row[-1]!r}")
        y[r - 2] = lookup[label]
    return Dataset(
        X, y, [h.strip() for h in header[:-1]], list(class_names),
        {"path": str(path), "sha256": hashlib.sha256(raw).hexdigest()},
    )


@dataclass
class ScalerModel:
    min: np.ndarray
    max: np.ndarray
    clamp: bool = True

    def transform(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.min) / (self.max - self.min)
        return np.clip(Z, 0.0, 1.0) if self.clamp else Z

    def to_dict(self) -> dict:
        return {"min": self.min.tolist(), "max": self.max.tolist(), "clamp": self.clamp}


def minmax_fit(X_train, clamp: bool = True) -> ScalerModel:
    X = np.atleast_2d(np.asarray(X_train, dtype=float))
    lo, hi = X.min(axis=0), X.max(axis=0)
    flat = np.flatnonzero(hi <= lo)
    if flat.size:
        raise DegenerateScaleError(f"constant training column(s): {flat.tolist()}")
    return ScalerModel(lo, hi, clamp)


def minmax_transform(scaler: ScalerModel, X) -> np.ndarray:
    return scaler.transform(X)


def stratified_split(y, test_fraction: float = 0.2, seed: int = 42, method: str = "stratified"):
    """Return sorted ``(train_idx, test_idx)``.

    ``stratified`` takes ``round(test_fraction * n_c)`` rows of every class;
    ``shuffle`` takes ``round(test_fraction * n)`` rows of one permutation.
    """
    y = np.asarray(y).reshape(-1)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    if method == "stratified":
        test = []
        for c in np.unique(y):
            idx = np.flatnonzero(y == c)
            if idx.size < 2:
                raise ValueError(f"class {c} has fewer than 2 samples")
            k = min(idx.size - 1, max(1, int(round(test_fraction * idx.size))))
            test.extend(rng.permutation(idx)[:k])
        test = np.sort(np.array(test, dtype=int))
    elif method == "shuffle":
        k = int(round(test_fraction * y.size))
        test = np.sort(rng.permutation(y.size)[:k])
    else:
        raise ValueError(f"unknown split method {method!r}")
    train = np.setdiff1d(np.arange(y.size), test)
    return train, test
