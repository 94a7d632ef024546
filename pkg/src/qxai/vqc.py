"""Variational quantum classifier: ZZ feature map, trainable ansatz, basis-state readout."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .cml.base import ClassifierModel
from .encode import FeatureMapSpec, feature_map_states
from .optimize import OptimizerConfig, cobyla_minimize
from .qsim import ArityError, Gate, Parameter, ParameterizedCircuit, circuit_ops, run_batch

ANSATZ_KINDS = ("RealAmplitudes", "EfficientSU2")
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str = "EfficientSU2"
    num_qubits: int = 4
    reps: int = 3
    entanglement: str = "linear"

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise ValueError(f"ansatz kind must be one of {ANSATZ_KINDS}")
        if self.reps < 1 or self.num_qubits < 1:
            raise ValueError("reps and num_qubits must be >= 1")
        if self.entanglement not in ("linear", "full"):
            raise ValueError("entanglement must be 'linear' or 'full'")

    @property
    def rotations_per_layer(self) -> int:
        return 1 if self.kind == "RealAmplitudes" else 2

    @property
    def num_parameters(self) -> int:
        return self.rotations_per_layer * self.num_qubits * (self.reps + 1)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "num_qubits": self.num_qubits, "reps": self.reps,
                "entanglement": self.entanglement}


def build_ansatz(spec: AnsatzSpec) -> ParameterizedCircuit:
    """Rotation layer, then ``reps`` x (CX entangler + rotation layer).

    A RealAmplitudes layer is RY on every qubit; an EfficientSU2 layer is RY
    on every qubit followed by RZ on every qubit. Slots run layer-major,
    qubit-minor.
    """
    n = spec.num_qubits
    if spec.entanglement == "linear":
        pairs = [(i, i + 1) for i in range(n - 1)]
    else:
        pairs = list(combinations(range(n), 2))
    kinds = ("RY",) if spec.kind == "RealAmplitudes" else ("RY", "RZ")
    gates: list[Gate] = []
    slot = 0

    def rotation_layer():
        nonlocal slot
        for kind in kinds:
            for q in range(n):
                gates.append(Gate(kind, q, angle=Parameter(slot)))
                slot += 1

    rotation_layer()
    for _ in range(spec.reps):
        gates.extend(Gate("CX", j, control=i) for i, j in pairs)
        rotation_layer()
    return ParameterizedCircuit(n, gates, slot)


def modulo_interpret(num_qubits: int, num_classes: int) -> np.ndarray:
    """Class of each basis index: ``index mod num_classes``."""
    if num_classes > 1 << num_qubits:
        raise ValueError("more classes than basis states")
    return np.arange(1 << num_qubits) % num_classes


@dataclass
class VqcModel(ClassifierModel):
    kind: str = "VQC"
    feature_map: FeatureMapSpec = None
    ansatz: AnsatzSpec = None
    params: np.ndarray = None
    interpret: np.ndarray = None
    num_classes: int = 0
    training_log: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if self.params.size != self.ansatz.num_parameters:
            raise ArityError("parameter vector does not match the ansatz")
        if self.interpret is None:
            self.interpret = modulo_interpret(self.feature_map.num_qubits, self.num_classes)
        self.interpret = np.asarray(self.interpret, dtype=int)
        self._circuit = build_ansatz(self.ansatz)

    def readout(self) -> np.ndarray:
        """``(2**n, num_classes)`` 0/1 matrix summing basis probabilities per class."""
        R = np.zeros((self.interpret.size, self.num_classes))
        R[np.arange(self.interpret.size), self.interpret] = 1.0
        return R

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.feature_map.num_features:
            raise ArityError(f"expected {self.feature_map.num_features} features")
        return _forward_states(
            feature_map_states(self.feature_map, X), self._circuit, self.params, self.readout()
        )


def _forward_states(states, circuit, params, readout) -> np.ndarray:
    out = run_batch(states, circuit_ops(circuit.bind(params)))
    probs = (out.real**2 + out.imag**2) @ readout
    return probs / probs.sum(axis=1, keepdims=True)


def vqc_forward(model: VqcModel, x) -> np.ndarray:
    return model.predict_proba(np.asarray(x, dtype=float)[None, :])[0]


def cross_entropy(probs: np.ndarray, y) -> float:
    y = np.asarray(y, dtype=int)
    p = np.clip(probs[np.arange(y.size), y], PROB_FLOOR, 1.0)
    return float(-np.mean(np.log(p)))


def vqc_loss(model: VqcModel, X, y) -> float:
    return cross_entropy(model.predict_proba(X), y)


def vqc_train(
    feature_map: FeatureMapSpec,
    ansatz: AnsatzSpec,
    optimizer: OptimizerConfig,
    X,
    y,
    seed: int = 0,
    num_classes: int | None = None,
) -> VqcModel:
    """Fit the ansatz angles by minimizing cross-entropy with COBYLA.

    Initial angles are uniform on [-pi, pi] from ``seed``. The feature-map
    states are computed once; each objective call only runs the ansatz.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).reshape(-1)
    k = int(num_classes if num_classes is not None else y.max() + 1)
    if ansatz.num_qubits != feature_map.num_qubits:
        raise ArityError("ansatz and feature map act on different qubit counts")
    circuit = build_ansatz(ansatz)
    interpret = modulo_interpret(feature_map.num_qubits, k)
    readout = np.zeros((interpret.size, k))
    readout[np.arange(interpret.size), interpret] = 1.0
    states = feature_map_states(feature_map, X)

    def objective(theta):
        return cross_entropy(_forward_states(states, circuit, theta, readout), y)

    rng = np.random.default_rng(seed)
    theta0 = rng.uniform(-np.pi, np.pi, size=circuit.num_parameters)
    res = cobyla_minimize(objective, theta0, optimizer)
    meta = {
        "seed": seed,
        "optimizer": {
            "kind": optimizer.kind,
            "max_iters": optimizer.max_iters,
            "initial_trust_radius": optimizer.initial_trust_radius,
            "final_trust_radius": optimizer.final_trust_radius,
        },
        "evaluations": res.nfev,
        "budget_exhausted": res.budget_exhausted,
        "final_loss": res.fun,
    }
    return VqcModel(feature_map=feature_map, ansatz=ansatz, params=res.x,
                    interpret=interpret, num_classes=k, training_log=list(res.trace),
                    metadata=meta)


@dataclass
class GridRow:
    ansatz: str
    reps: int
    optimizer: str
    accuracy: float
    seconds: float
    error: str = ""


def grid_search(
    X_train,
    y_train,
    X_test,
    y_test,
    *,
    feature_map: FeatureMapSpec,
    kinds=ANSATZ_KINDS,
    reps=(1, 2, 3, 4),
    optimizers=(OptimizerConfig(),),
    entanglement: str = "linear",
    seed: int = 0,
) -> list[GridRow]:
    """Train every (ansatz, reps, optimizer) combination on the same split.

    Failures are kept as rows with ``accuracy = nan`` and the error message.
    Rows come back sorted by accuracy, best first.
    """
    rows = []
    for kind in kinds:
        for r in reps:
            for opt in optimizers:
                t0 = time.perf_counter()
                try:
                    spec = AnsatzSpec(kind, feature_map.num_qubits, r, entanglement)
                    model = vqc_train(feature_map, spec, opt, X_train, y_train, seed)
                    acc, err = model.score(X_test, y_test), ""
                except Exception as exc:  # recorded per combination
                    acc, err = float("nan"), f"{type(exc).__name__}: {exc}"
                rows.append(GridRow(kind, r, opt.kind, acc, time.perf_counter() - t0, err))
    return sorted(rows, key=lambda g: (-(g.accuracy if g.accuracy == g.accuracy else -1.0)))


def write_grid_csv(rows: list[GridRow], path) -> None:
    with open(Path(path), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["ansatz", "reps", "optimizer", "accuracy", "seconds"])
        for g in rows:
            w.writerow([g.ansatz, g.reps, g.optimizer, repr(g.accuracy), f"{g.seconds:.3f}"])
