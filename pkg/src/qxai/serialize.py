"""Versioned JSON documents for trained models."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cml.svm import OvoSvm, SvmBinaryModel
from .cml.tree import DecisionTree, ForestModel
from .encode import FeatureMapSpec
from .vqc import AnsatzSpec, VqcModel

FORMAT = "qxai-model"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _tree_dict(t: DecisionTree) -> dict:
    return {
        "feature": t.feature.tolist(),
        "threshold": t.threshold.tolist(),
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "counts": t.counts.tolist(),
        "metadata": t.metadata,
    }


def _tree_from(d: dict, k: int) -> DecisionTree:
    return DecisionTree(
        num_classes=k,
        feature=np.array(d["feature"], dtype=np.intp),
        threshold=np.array(d["threshold"], dtype=float),
        left=np.array(d["left"], dtype=np.intp),
        right=np.array(d["right"], dtype=np.intp),
        counts=np.array(d["counts"], dtype=float).reshape(-1, k),
        metadata=d.get("metadata", {}),
    )


def model_to_dict(model) -> dict:
    doc = {"format": FORMAT, "version": VERSION, "kind": model.kind,
           "num_classes": model.num_classes, "metadata": model.metadata}
    if isinstance(model, OvoSvm):
        doc.update(
            X_train=model.X_train.tolist(),
            gamma=model.gamma,
            feature_map=model.feature_map.to_dict() if model.feature_map else None,
            pairs=[list(p) for p in model.pairs],
            binaries=[
                {
                    "support_indices": m.support_indices.tolist(),
                    "alphas": m.alphas.tolist(),
                    "labels": m.labels.tolist(),
                    "bias": m.bias,
                    "C": m.C,
                    "iterations": m.iterations,
                    "max_violation": m.max_violation,
                }
                for m in model.binaries
            ],
        )
    elif isinstance(model, ForestModel):
        doc["trees"] = [_tree_dict(t) for t in model.trees]
    elif isinstance(model, VqcModel):
        doc.update(
            feature_map=model.feature_map.to_dict(),
            ansatz=model.ansatz.to_dict(),
            params=model.params.tolist(),
            interpret=model.interpret.tolist(),
            training_log=list(model.training_log),
        )
    else:
        raise ModelFormatError(f"cannot serialize {type(model).__name__}")
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ModelFormatError("not a qxai model document")
    if doc.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')}")
    kind, k = doc["kind"], int(doc["num_classes"])
    if kind in ("SVC", "QSVC"):
        fm = FeatureMapSpec(**doc["feature_map"]) if doc["feature_map"] else None
        binaries = [
            SvmBinaryModel(
                np.array(b["support_indices"], dtype=np.intp),
                np.array(b["alphas"], dtype=float),
                np.array(b["labels"], dtype=float),
                float(b["bias"]),
                float(b["C"]),
                int(b.get("iterations", 0)),
                float(b.get("max_violation", 0.0)),
            )
            for b in doc["binaries"]
        ]
        return OvoSvm(kind=kind, X_train=np.array(doc["X_train"], dtype=float), num_classes=k,
                      pairs=[tuple(p) for p in doc["pairs"]], binaries=binaries,
                      gamma=doc["gamma"], feature_map=fm, metadata=doc["metadata"])
    if kind == "RF":
        return ForestModel(num_classes=k, trees=[_tree_from(t, k) for t in doc["trees"]],
                           metadata=doc["metadata"])
    if kind == "VQC":
        return VqcModel(feature_map=FeatureMapSpec(**doc["feature_map"]),
                        ansatz=AnsatzSpec(**doc["ansatz"]), params=np.array(doc["params"]),
                        interpret=np.array(doc["interpret"]), num_classes=k,
                        training_log=doc["training_log"], metadata=doc["metadata"])
    raise ModelFormatError(f"unknown model kind {kind!r}")


def dumps_model(model) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n"


def save_model(model, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_model(model))


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))
