"""End-to-end experiment: split, train, evaluate, explain, write reports."""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from .._backend import BACKEND
from ..encode import FeatureMapSpec
from ..explain.ale import ale_curves
from ..explain.loo import loo_importance
from ..explain.permutation import permutation_importance
from ..explain.shap import aggregate_global, shap_exact, subsample_background
from ..qkernel import kernel_matrix
from ..serialize import dumps_model, load_model
from ..vqc import grid_search, write_grid_csv
from ..optimize import OptimizerConfig
from .config import MODEL_KINDS, config_hash
from .data import Dataset, load_csv, minmax_fit, stratified_split
from .evaluate import bootstrap_accuracy, evaluate
from .trainers import train_model, trainer_for

# the source framework could not emit VQC probabilities; those results go beyond it
EXTENSION_STAGES = {("VQC", "ale"), ("VQC", "shap")}


@dataclass
class Prepared:
    dataset: Dataset
    train_idx: np.ndarray
    test_idx: np.ndarray
    scaler: object
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray


def prepare(cfg: dict, data_path=None) -> Prepared:
    ds = load_csv(data_path)
    tr, te = stratified_split(ds.y, cfg["split"]["test_fraction"], cfg["seed"],
                              cfg["split"]["method"])
    scaler = minmax_fit(ds.X[tr], clamp=cfg["scaler"]["clamp"])
    return Prepared(ds, tr, te, scaler, scaler.transform(ds.X[tr]), ds.y[tr],
                    scaler.transform(ds.X[te]), ds.y[te])


class Recorder:
    """Writes stage reports and keeps the manifest bookkeeping."""

    def __init__(self, out: Path, cfg: dict):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.cfg = cfg
        self.hash = config_hash(cfg)
        self.files: dict[str, str] = {}
        self.timings: dict[str, float] = {}
        self.stages: dict[str, dict] = {}

    def write_json(self, name: str, stage: str, payload: dict, model: str | None = None) -> None:
        doc = {"stage": stage, "model": model, "seed": self.cfg["seed"],
               "config_hash": self.hash, **payload}
        text = json.dumps(_plain(doc), indent=1, sort_keys=True) + "\n"
        self._write(name, text)

    def write_csv(self, name: str, header: list, rows: list) -> None:
        lines = [",".join(header)] + [",".join(_cell(v) for v in r) for r in rows]
        self._write(name, "\n".join(lines) + "\n")

    def _write(self, name: str, text: str) -> None:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()

    def run(self, key: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
            self.stages[key] = {"status": "ok"}
            return result
        except Exception as exc:
            self.stages[key] = {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}
            return None
        finally:
            self.timings[key] = round(time.perf_counter() - t0, 4)

    def skip(self, key: str, reason: str) -> None:
        self.stages[key] = {"status": "skipped", "reason": reason}

    def write_manifest(self, prep: Prepared | None, extra: dict | None = None) -> None:
        """Merge into an existing manifest so separate subcommands accumulate."""
        path = self.out / "manifest.json"
        old = json.loads(path.read_text()) if path.exists() else {}
        if old.get("config_hash") != self.hash:
            old = {}
        doc = {
            "config": self.cfg,
            "config_hash": self.hash,
            "seeds": {"global": self.cfg["seed"]},
            "versions": {"qxai": __version__, "numpy": np.__version__,
                         "python": platform.python_version(), "kernel_backend": BACKEND},
            "data": prep.dataset.provenance if prep else None,
            "stages": {**old.get("stages", {}), **self.stages},
            "files": dict(sorted({**old.get("files", {}), **self.files}.items())),
            "timings_seconds": {**old.get("timings_seconds", {}), **self.timings},
            **(extra or {}),
        }
        path.write_text(json.dumps(_plain(doc), indent=1, sort_keys=True) + "\n")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _split_payload(prep: Prepared) -> dict:
    return {
        "train_indices": prep.train_idx,
        "test_indices": prep.test_idx,
        "test_class_counts": np.bincount(prep.y_test, minlength=prep.dataset.num_classes),
        "scaler": prep.scaler.to_dict(),
        "feature_names": prep.dataset.feature_names,
        "class_names": prep.dataset.class_names,
    }


def train_stage(rec: Recorder, prep: Prepared, kinds, workers: int = 1) -> dict:
    rec.write_json("split.json", "split", _split_payload(prep))
    models = {}
    k = prep.dataset.num_classes
    for kind in kinds:
        m = rec.run(f"train:{kind}", train_model, kind, prep.X_train, prep.y_train, rec.cfg, k, workers)
        if m is not None:
            models[kind] = m
            rec._write(f"models/{kind.lower()}.json", dumps_model(m))
    return models


def load_models(out: Path, kinds) -> dict:
    models = {}
    for kind in kinds:
        path = Path(out) / "models" / f"{kind.lower()}.json"
        if path.exists():
            models[kind] = load_model(path)
    return models


def evaluate_stage(rec: Recorder, prep: Prepared, models: dict) -> dict:
    reports = {}
    n_boot = int(rec.cfg["explain"]["bootstrap_resamples"])
    rows = []
    for kind, model in models.items():
        def run(model=model):
            rep = evaluate(model, prep.X_test, prep.y_test, prep.dataset.num_classes)
            rep.bootstrap = bootstrap_accuracy(prep.y_test, model.predict(prep.X_test),
                                               n_boot, rec.cfg["seed"])
            return rep

        rep = rec.run(f"evaluate:{kind}", run)
        if rep is None:
            continue
        reports[kind] = rep
        rec.write_json(f"evaluation/{kind.lower()}.json", "evaluate",
                       {**rep.to_dict(), "test_indices": prep.test_idx}, kind)
        b = rep.bootstrap
        rows.append([kind, rep.accuracy, b["mean"], b["p25"], b["p75"]])
    rec.write_csv("evaluation/summary.csv", ["model", "accuracy", "bootstrap_mean", "p25", "p75"], rows)
    return reports


def _explain_one(rec: Recorder, prep: Prepared, kind: str, model, workers: int) -> dict:
    cfg = rec.cfg["explain"]
    names = prep.dataset.feature_names
    seed = rec.cfg["seed"]
    out = {}

    loo = rec.run(f"loo:{kind}", loo_importance,
                  trainer_for(kind, rec.cfg, prep.dataset.num_classes, 1),
                  prep.X_train, prep.y_train, prep.X_test, prep.y_test,
                  full_model=model, feature_names=names)
    if loo is not None:
        rec.write_json(f"loo/{kind.lower()}.json", "loo", loo.to_dict(), kind)
        out["loo"] = loo

    perm = rec.run(f"permutation:{kind}", permutation_importance, model, prep.X_test,
                   prep.y_test, int(cfg["perm_repeats"]), seed, feature_names=names)
    if perm is not None:
        rec.write_json(f"permutation/{kind.lower()}.json", "permutation", perm.to_dict(), kind)
        out["permutation"] = perm

    def ale():
        return [ale_curves(model, prep.X_train, j, int(cfg["ale_intervals"]))
                for j in range(prep.X_train.shape[1])]

    curves = rec.run(f"ale:{kind}", ale)
    if curves is not None:
        importance = [max(c.range for c in per_feature) for per_feature in curves]
        rec.write_json(f"ale/{kind.lower()}.json", "ale", {
            "extension": (kind, "ale") in EXTENSION_STAGES,
            "importance": importance,
            "curves": [c.to_dict() for per_feature in curves for c in per_feature],
        }, kind)
        out["ale"] = (curves, importance)

    def shap():
        bg = subsample_background(prep.X_train, int(cfg["shap_background"]), seed)
        bg_id = f"train-subsample-{bg.shape[0]}-seed{seed}"
        local = [shap_exact(model, x, bg, background_id=bg_id) for x in prep.X_test]
        anchor = None
        if cfg.get("anchor_point") is not None and len(cfg["anchor_point"]) == prep.X_test.shape[1]:
            anchor = shap_exact(model, np.array(cfg["anchor_point"], dtype=float), bg,
                                background_id=bg_id)
        return local, anchor, aggregate_global(local)

    shap = rec.run(f"shap:{kind}", shap)
    if shap is not None:
        local, anchor, glob = shap
        rec.write_json(f"shap/{kind.lower()}.json", "shap", {
            "extension": (kind, "shap") in EXTENSION_STAGES,
            "test_indices": prep.test_idx,
            "local": [e.to_dict() for e in local],
            "anchor_point": anchor.to_dict() if anchor is not None else None,
            "global": {"per_class": glob["per_class"], "pooled": glob["pooled"]},
            "max_efficiency_gap": max(float(np.abs(e.efficiency_gap()).max()) for e in local),
        }, kind)
        out["shap"] = shap
    return out


def explain_stage(rec: Recorder, prep: Prepared, models: dict, workers: int = 1) -> dict:
    kinds = list(models)
    if workers > 1 and len(kinds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(_explain_one, rec, prep, k, models[k], workers) for k in kinds}
            results = {k: f.result() for k, f in futures.items()}
    else:
        results = {k: _explain_one(rec, prep, k, models[k], workers) for k in kinds}
    _write_importance_csv(rec, prep, results)
    return results


def _write_importance_csv(rec: Recorder, prep: Prepared, results: dict) -> None:
    names = prep.dataset.feature_names
    rows, ale_rows = [], []
    for kind in sorted(results):
        r = results[kind]
        if "loo" in r:
            for j, (s, d) in enumerate(zip(r["loo"].scores, r["loo"].deltas)):
                if s is not None:
                    rows.append([kind, "loo", names[j], "", "score_without", s])
                    rows.append([kind, "loo", names[j], "", "delta", d])
        if "permutation" in r:
            p = r["permutation"]
            for j in range(len(names)):
                rows.append([kind, "permutation", names[j], "", "importance", p.importances[j]])
                rows.append([kind, "permutation", names[j], "", "std", p.std[j]])
        if "ale" in r:
            curves, importance = r["ale"]
            for j in range(len(names)):
                rows.append([kind, "ale", names[j], "", "importance", importance[j]])
                for c in curves[j]:
                    rows.append([kind, "ale", names[j], c.cls, "range", c.range])
                    for z, v in zip(c.edges, c.centered):
                        ale_rows.append([kind, names[j], c.cls, z, v])
        if "shap" in r:
            glob = r["shap"][2]
            for j in range(len(names)):
                rows.append([kind, "shap", names[j], "", "mean_abs_pooled", glob["pooled"][j]])
                for c in range(glob["per_class"].shape[0]):
                    rows.append([kind, "shap", names[j], c, "mean_abs", glob["per_class"][c, j]])
    rec.write_csv("importance.csv", ["model", "method", "feature", "class", "statistic", "value"], rows)
    rec.write_csv("ale_curves.csv", ["model", "feature", "class", "grid_value", "ale"], ale_rows)


def kernel_stage(rec: Recorder, prep: Prepared, workers: int = 1) -> dict:
    fm_cfg = rec.cfg["qsvc"]["featuremap"]
    spec = FeatureMapSpec(prep.X_train.shape[1], int(fm_cfg["reps"]), fm_cfg["entanglement"])
    t0 = time.perf_counter()
    K = kernel_matrix(spec, prep.X_train, workers=workers)
    seconds = time.perf_counter() - t0
    K.to_csv(rec.out / "kernel_train.csv")
    E = K.entries
    summary = {
        "feature_map": spec.to_dict(),
        "shape": list(E.shape),
        "max_asymmetry": float(np.abs(E - E.T).max()),
        "max_diagonal_error": float(np.abs(np.diag(E) - 1.0).max()),
        "min_eigenvalue": K.min_eigenvalue(),
        "min_entry": float(E.min()),
        "max_entry": float(E.max()),
    }
    rec.write_json("kernel.json", "kernel", summary)
    rec.timings["kernel:build"] = round(seconds, 4)
    return summary


def gridsearch_stage(rec: Recorder, prep: Prepared) -> list:
    g = rec.cfg["gridsearch"]
    v = rec.cfg["vqc"]
    o = v["optimizer"]
    fm = FeatureMapSpec(prep.X_train.shape[1], int(v["featuremap"]["reps"]),
                        v["featuremap"]["entanglement"])
    opt = OptimizerConfig(o["kind"], int(o["max_iters"]), float(o["initial_trust_radius"]),
                          float(o["final_trust_radius"]), rec.cfg["seed"])
    rows = grid_search(prep.X_train, prep.y_train, prep.X_test, prep.y_test, feature_map=fm,
                       kinds=tuple(g["ansatz"]), reps=tuple(g["reps"]), optimizers=(opt,),
                       entanglement=v["entanglement"], seed=rec.cfg["seed"])
    write_grid_csv(rows, rec.out / "gridsearch.csv")
    return rows


def run_experiment(cfg: dict, data_path=None, out_dir="results", models=MODEL_KINDS,
                   workers: int = 1) -> Path:
    """Train, evaluate and explain every requested model; returns ``out_dir``."""
    rec = Recorder(Path(out_dir), cfg)
    kinds = [k for k in MODEL_KINDS if k in set(models)]
    for k in MODEL_KINDS:
        if k not in kinds:
            rec.skip(f"model:{k}", "not requested (--models)")
    prep = prepare(cfg, data_path)
    trained = train_stage(rec, prep, kinds, workers)
    evaluate_stage(rec, prep, trained)
    explain_stage(rec, prep, trained, workers)
    rec.write_manifest(prep, {"models": kinds})
    return rec.out
