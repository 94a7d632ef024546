"""Experiment configuration: defaults, JSON overrides, and hashing."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

MODEL_KINDS = ("SVC", "QSVC", "RF", "VQC")

DEFAULT_CONFIG: dict = {
    "seed": 42,
    "split": {"test_fraction": 0.2, "method": "stratified"},
    "scaler": {"clamp": True},
    "svc": {"C": 1.0, "gamma": "scale"},
    "qsvc": {"C": 1.0, "featuremap": {"reps": 2, "entanglement": "linear"}},
    "rf": {"trees": 100, "min_leaf": 1, "max_depth": None, "max_features": "sqrt"},
    "vqc": {
        "ansatz": "EfficientSU2",
        "reps": 3,
        "entanglement": "linear",
        "featuremap": {"reps": 2, "entanglement": "linear"},
        "optimizer": {
            "kind": "COBYLA",
            "max_iters": 500,
            "initial_trust_radius": 1.0,
            "final_trust_radius": 1e-4,
        },
    },
    "explain": {
        "perm_repeats": 30,
        "ale_intervals": 10,
        "shap_background": 100,
        "bootstrap_resamples": 1000,
        # scaled feature values of a fixed reference flower
        "anchor_point": [0.5, 0.25, 0.78, 0.54],
    },
    "gridsearch": {"ansatz": ["RealAmplitudes", "EfficientSU2"], "reps": [1, 2, 3, 4]},
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def resolve_config(override: dict | None = None, seed: int | None = None) -> dict:
    cfg = _merge(DEFAULT_CONFIG, override or {})
    if seed is not None:
        cfg["seed"] = int(seed)
    if cfg["split"]["method"] not in ("stratified", "shuffle"):
        raise ConfigError("split.method must be 'stratified' or 'shuffle'")
    return cfg


def load_config(path=None, seed: int | None = None) -> dict:
    override = json.loads(Path(path).read_text()) if path else {}
    return resolve_config(override, seed)


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
