"""Acceptance suite: twelve criteria, each a single test.

Every test records a PASS/FAIL line (printed in the pytest terminal summary
and, with ``-s``, as it happens). Run directly with
``python3 -m pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from qxai.cml.svm import dual_objective, rbf_gram, svm_train_binary
from qxai.encode import FeatureMapSpec
from qxai.explain.ale import ale_curve, ale_curves, ale_importance
from qxai.explain.loo import loo_importance
from qxai.explain.permutation import permutation_importance
from qxai.explain.shap import shap_exact, subsample_background
from qxai.optimize import OptimizerConfig, cobyla_minimize
from qxai.pipeline import cli
from qxai.pipeline.evaluate import bootstrap_accuracy
from qxai.pipeline.trainers import trainer_for
from qxai.qkernel import fidelity, kernel_matrix
from qxai.qsim import (
    Gate, H, ParameterizedCircuit, StateVector, apply_circuit, apply_gate, inverse_circuit,
    zero_state,
)
from conftest import random_gates, zz_state_oracle
from test_explain import Additive, Linear, Threshold
from test_svm import blob, full_alpha, qp_oracle

RESULTS: dict[int, tuple[str, str]] = {}

# headline test accuracies the reproduction is compared against
REFERENCE_ACCURACY = {"SVC": 0.93, "QSVC": 0.97, "RF": 0.90, "VQC": 0.87}
MINIMUM_ACCURACY = {"SVC": 0.90, "QSVC": 0.90, "RF": 0.87, "VQC": 0.80}
BAND = 0.07
EPS = 1e-9  # decimal band edges such as 0.97 - 0.90 are not exact in binary


@contextmanager
def criterion(number: int, title: str):
    detail = []
    try:
        yield detail
    except BaseException:
        RESULTS[number] = ("FAIL", f"{title} {'; '.join(detail)}".strip())
        print(f"\ncriterion {number:2d}: FAIL  {title}")
        raise
    RESULTS[number] = ("PASS", f"{title} {'; '.join(detail)}".strip())
    print(f"\ncriterion {number:2d}: PASS  {title}  {'; '.join(detail)}")


def test_c01_simulator():
    with criterion(1, "simulator correctness") as info:
        t0 = time.perf_counter()
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(apply_gate(zero_state(1), H(0)).amplitudes, [r, r], atol=1e-12)
        np.testing.assert_allclose(apply_gate(StateVector(1, [0, 1]), H(0)).amplitudes, [r, -r],
                                   atol=1e-12)
        rng = np.random.default_rng(1)
        worst = 0.0
        for i in range(1000):
            n = 1 + i % 4
            c = ParameterizedCircuit(n, [Gate(k, t, c_, a) for k, t, c_, a in
                                         random_gates(rng, n, 20)])
            psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
            s = StateVector(n, psi / np.linalg.norm(psi))
            back = apply_circuit(apply_circuit(s, c), inverse_circuit(c))
            worst = max(worst, np.abs(back.amplitudes - s.amplitudes).max())
        elapsed = time.perf_counter() - t0
        info.append(f"max round-trip error {worst:.1e}, {elapsed:.2f}s")
        assert worst < 1e-10
        assert elapsed < 5


def test_c02_kernel_oracle():
    with criterion(2, "kernel oracle equivalence") as info:
        worst = 0.0
        for n in (1, 2, 3, 4):
            rng = np.random.default_rng(10 + n)
            spec = FeatureMapSpec(n, 2)
            for _ in range(200):
                a, b = rng.uniform(0, 1, (2, n))
                direct = abs(np.vdot(zz_state_oracle(a, 2, spec.pairs()),
                                     zz_state_oracle(b, 2, spec.pairs()))) ** 2
                worst = max(worst, abs(fidelity(spec, a, b) - direct))
        rng = np.random.default_rng(0)
        closed = max(abs(fidelity(FeatureMapSpec(1, 1), [a], [b]) - np.cos(a - b) ** 2)
                     for a, b in rng.uniform(-np.pi, np.pi, (200, 2)))
        info.append(f"max deviation {worst:.1e}, closed form {closed:.1e}")
        assert worst < 1e-10 and closed < 1e-10


def test_c03_gram(iris_split):
    with criterion(3, "Iris Gram matrix properties") as info:
        t0 = time.perf_counter()
        K = kernel_matrix(FeatureMapSpec(4, 2), iris_split["X_train"])
        elapsed = time.perf_counter() - t0
        E = K.entries
        asym, diag, eig = np.abs(E - E.T).max(), np.abs(np.diag(E) - 1).max(), K.min_eigenvalue()
        info.append(f"asym {asym:.1e}, diag {diag:.1e}, min eig {eig:.2e}, {elapsed:.2f}s")
        assert E.shape == (120, 120)
        assert asym <= 1e-10 and diag <= 1e-10 and eig >= -1e-8 and elapsed < 60


def test_c04_accuracy(iris_models, iris_split):
    with criterion(4, "model accuracies (stratified split, seed 42)") as info:
        s = iris_split
        ok = True
        for name, model in iris_models.items():
            acc = model.score(s["X_test"], s["y_test"])
            good = acc >= MINIMUM_ACCURACY[name] - EPS and abs(acc - REFERENCE_ACCURACY[name]) <= BAND + EPS
            ok &= good
            info.append(f"{name} {acc:.4f}{'' if good else ' (out of band)'}")
        assert ok


def test_c05_bootstrap(iris_models, iris_split):
    with criterion(5, "bootstrap accuracy") as info:
        s = iris_split
        preds = {k: m.predict(s["X_test"]) for k, m in iris_models.items()}
        t0 = time.perf_counter()
        ok = True
        for name, pred in preds.items():
            b = bootstrap_accuracy(s["y_test"], pred, 1000, 42)
            point = float(np.mean(pred == s["y_test"]))
            good = abs(b["mean"] - point) <= 0.03 and b["p25"] <= b["mean"] <= b["p75"]
            good &= len(b["scores"]) == 1000
            ok &= good
            info.append(f"{name} {b['mean']:.4f} [{b['p25']:.3f}, {b['p75']:.3f}]")
        elapsed = time.perf_counter() - t0
        info.append(f"{elapsed:.2f}s")
        assert ok and elapsed < 60


def test_c06_svm_oracle():
    with criterion(6, "SVM solver against QP oracle") as info:
        worst = 0.0
        for seed in range(10):
            X, y = blob(seed)
            K = rbf_gram(X, X, 0.5)
            m = svm_train_binary(K, y, 1.0)
            a = full_alpha(m, y.size)
            worst = max(worst, abs(dual_objective(K, y, a) - dual_objective(K, y, qp_oracle(K, y, 1.0))))
            assert np.all(a >= 0) and np.all(a <= 1.0) and abs(a @ y) <= 1e-8
        info.append(f"max dual gap {worst:.1e}")
        assert worst < 1e-4


def test_c07_cobyla():
    with criterion(7, "COBYLA convergence and monotone trace") as info:
        r1 = cobyla_minimize(lambda v: (v[0] - 3) ** 2, [0.0])
        r2 = cobyla_minimize(lambda v: v[0] ** 2 + v[1] ** 2, [1.0, 1.0])
        r3 = cobyla_minimize(lambda v: (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2,
                             [-1.2, 1.0], OptimizerConfig(max_iters=2000))
        info.append(f"|x-3| {abs(r1.x[0] - 3):.1e}, bowl {r2.fun:.1e}, rosenbrock {r3.fun:.1e}")
        for r in (r1, r2, r3):
            assert all(b <= a for a, b in zip(r.trace, r.trace[1:]))
        assert abs(r1.x[0] - 3) < 1e-4 and r2.fun < 1e-6


def test_c08_shap(iris_models, iris_split):
    with criterion(8, "exact SHAP axioms") as info:
        s = iris_split
        bg = subsample_background(s["X_train"], 100, 42)
        worst = 0.0
        for model in iris_models.values():
            for x in s["X_test"]:
                worst = max(worst, np.abs(shap_exact(model, x, bg).efficiency_gap()).max())
        rng = np.random.default_rng(0)
        w = np.array([0.3, -0.2, 0.05, 0.4])
        abg, x = rng.normal(size=(50, 4)), rng.normal(size=4)
        additive = np.abs(shap_exact(Additive(w), x, abg).values[0] - w * (x - abg.mean(axis=0))).max()
        dummy = shap_exact(Threshold(), s["X_test"][0], bg).values[:, 1:]
        col = rng.normal(size=20)
        sbg = np.column_stack([col, col, rng.normal(size=20)])
        e = shap_exact(Additive([0.5, 0.5, 0.1]), np.array([1.0, 1.0, 0.0]), sbg)
        sym = np.abs(e.values[:, 0] - e.values[:, 1]).max()
        info.append(f"efficiency {worst:.1e}, additive {additive:.1e}, symmetry {sym:.1e}")
        assert worst < 1e-6 and additive < 1e-9 and np.all(dummy == 0) and sym < 1e-9


def test_c09_permutation(iris_models, iris_split):
    with criterion(9, "permutation importance") as info:
        rng = np.random.default_rng(0)
        X = np.column_stack([rng.uniform(size=50), np.full(50, 0.4)])
        y = (X[:, 0] > 0.5).astype(int)
        const = permutation_importance(Threshold(), X, y, 30, 1).importances[1]
        ident = permutation_importance(Threshold(), X, y, 1, 1,
                                       permuter=lambda g, n: np.arange(n)).importances
        assert const == 0.0 and np.all(ident == 0.0)
        s = iris_split
        ok = True
        for name in ("SVC", "RF", "QSVC"):
            imp = permutation_importance(iris_models[name], s["X_test"], s["y_test"], 30, 42).importances
            good = min(imp[2], imp[3]) > max(imp[0], imp[1])
            ok &= good
            info.append(f"{name} " + "/".join(f"{v:.3f}" for v in imp))
        assert ok


def test_c10_ale():
    with criterion(10, "ALE centering and closed forms") as info:
        X = np.random.default_rng(0).uniform(size=(400, 3))
        means = max(abs(c.weighted_mean()) for j in range(3) for c in ale_curves(Linear(0), X, j))
        c = ale_curve(Linear(0), X, 0, 1)
        slopes = np.diff(c.values[1:]) / np.diff(c.edges[1:])
        zero = np.abs(np.array([cv.centered for cv in ale_curves(Linear(0), X, 1)])).max()
        info.append(f"mean {means:.1e}, slope error {np.abs(slopes - 0.8).max():.1e}, zero {zero:.1e}")
        assert means < 1e-8 and np.all(np.abs(slopes - 0.8) <= 0.02) and zero < 1e-10
        assert ale_importance(Linear(0), X)[1] < 1e-10


def test_c11_svc_loo(iris_models, iris_split):
    with criterion(11, "SVC leave-one-out on sepal features") as info:
        s = iris_split
        rep = loo_importance(trainer_for("SVC", s["cfg"], 3), s["X_train"], s["y_train"],
                             s["X_test"], s["y_test"], full_model=iris_models["SVC"])
        info.append(f"full {rep.full_score:.3f}, deltas " + "/".join(f"{d:.3f}" for d in rep.deltas))
        assert abs(rep.deltas[0]) <= 0.04 and abs(rep.deltas[1]) <= 0.04


def _payloads(root: Path) -> dict:
    files = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            if p.name == "manifest.json":
                doc = json.loads(p.read_text())
                doc.pop("timings_seconds")
                files["manifest.json"] = json.dumps(doc, sort_keys=True).encode()
            else:
                files[str(p.relative_to(root))] = p.read_bytes()
    return files


@pytest.mark.slow
def test_c12_end_to_end(tmp_path):
    with criterion(12, "end-to-end determinism and runtime") as info:
        times = []
        for run in ("a", "b"):
            t0 = time.perf_counter()
            assert cli.main(["run-all", "--out", str(tmp_path / run), "--workers", "1" if run == "a" else "4"]) == 0
            times.append(time.perf_counter() - t0)
        a, b = _payloads(tmp_path / "a"), _payloads(tmp_path / "b")
        differing = sorted(k for k in a.keys() | b.keys() if a.get(k) != b.get(k))
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        counts = {stage: sum(1 for k, v in manifest["stages"].items()
                             if k.startswith(stage + ":") and v["status"] == "ok")
                  for stage in ("evaluate", "permutation", "loo", "ale", "shap")}
        info.append(f"{len(a)} files, runs {times[0]:.1f}s/{times[1]:.1f}s, stages {counts}")
        assert not differing, differing
        assert counts["evaluate"] == counts["permutation"] == counts["loo"] == counts["shap"] == 4
        assert counts["ale"] >= 3
        assert max(times) < 300
