"""Config-driven training entry points for the four model kinds."""

from __future__ import annotations

from functools import partial

import numpy as np

from ..cml.svm import ovo_train
from ..cml.tree import forest_fit
from ..encode import FeatureMapSpec
from ..optimize import OptimizerConfig
from ..vqc import AnsatzSpec, vqc_train


def train_model(kind: str, X, y, cfg: dict, num_classes: int, workers: int = 1):
    X = np.asarray(X, dtype=float)
    p = X.shape[1]
    seed = int(cfg["seed"])
    if kind == "SVC":
        c = cfg["svc"]
        gamma = None if c["gamma"] in (None, "scale") else float(c["gamma"])
        model = ovo_train(X, y, float(c["C"]), gamma=gamma, num_classes=num_classes)
    elif kind == "QSVC":
        c = cfg["qsvc"]
        fm = FeatureMapSpec(p, int(c["featuremap"]["reps"]), c["featuremap"]["entanglement"])
        model = ovo_train(X, y, float(c["C"]), feature_map=fm, num_classes=num_classes,
                          workers=workers)
    elif kind == "RF":
        c = cfg["rf"]
        model = forest_fit(X, y, trees=int(c["trees"]), min_leaf=int(c["min_leaf"]),
                           max_depth=c["max_depth"], max_features=c["max_features"],
                           seed=seed, num_classes=num_classes)
    elif kind == "VQC":
        c = cfg["vqc"]
        fm = FeatureMapSpec(p, int(c["featuremap"]["reps"]), c["featuremap"]["entanglement"])
        ansatz = AnsatzSpec(c["ansatz"], p, int(c["reps"]), c["entanglement"])
        o = c["optimizer"]
        opt = OptimizerConfig(o["kind"], int(o["max_iters"]), float(o["initial_trust_radius"]),
                              float(o["final_trust_radius"]), seed)
        model = vqc_train(fm, ansatz, opt, X, y, seed=seed, num_classes=num_classes)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    model.metadata = {**model.metadata, "seed": seed}
    return model


def trainer_for(kind: str, cfg: dict, num_classes: int, workers: int = 1):
    """``trainer(X, y) -> model`` with hyperparameters fixed, for leave-one-out."""
    return partial(_train, kind, cfg, num_classes, workers)


def _train(kind, cfg, num_classes, workers, X, y):
    return train_model(kind, X, y, cfg, num_classes, workers)
