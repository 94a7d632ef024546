"""Shared fixtures and independent oracles.

The oracles here never call into the package's gate kernels: they build full
2^n x 2^n unitaries with Kronecker products, so agreement with the simulator
is evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np
import pytest

from qxai.pipeline.config import resolve_config
from qxai.pipeline.data import load_csv, minmax_fit, stratified_split
from qxai.pipeline.trainers import train_model

I2 = np.eye(2, dtype=complex)
HM = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def one_qubit_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "H":
        return HM
    if kind == "RY":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "PHASE":
        return np.diag([1, np.exp(1j * angle)])
    raise ValueError(kind)


def lift(single: np.ndarray, target: int, n: int) -> np.ndarray:
    """Embed a one-qubit matrix; qubit 0 is the least significant bit."""
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, single if q == target else I2)
    return out


def cx_matrix(control: int, target: int, n: int) -> np.ndarray:
    dim = 1 << n
    U = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        U[b ^ (1 << target) if (b >> control) & 1 else b, b] = 1
    return U


def dense_unitary(gates, n: int) -> np.ndarray:
    """Gates given as ``(kind, target, control, angle)`` tuples."""
    U = np.eye(1 << n, dtype=complex)
    for kind, target, control, angle in gates:
        G = cx_matrix(control, target, n) if kind == "CX" else lift(one_qubit_matrix(kind, angle), target, n)
        U = G @ U
    return U


def zz_state_oracle(x, reps: int, pairs) -> np.ndarray:
    """ZZ map in closed form: per rep, H on all qubits then a diagonal phase
    exp(i(sum 2 x_q b_q + sum 2 (pi-x_i)(pi-x_j) (b_i xor b_j)))."""
    x = np.asarray(x, dtype=float)
    n = x.size
    dim = 1 << n
    bits = (np.arange(dim)[:, None] >> np.arange(n)) & 1
    theta = 2 * bits @ x
    for i, j in pairs:
        theta = theta + 2 * (np.pi - x[i]) * (np.pi - x[j]) * (bits[:, i] ^ bits[:, j])
    Hn = np.array([[1.0 + 0j]])
    for _ in range(n):
        Hn = np.kron(Hn, HM)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1
    for _ in range(reps):
        psi = np.exp(1j * theta) * (Hn @ psi)
    return psi


def random_gates(rng: np.random.Generator, n: int, count: int):
    kinds = ["H", "RY", "RZ", "PHASE"] + (["CX"] if n > 1 else [])
    gates = []
    for _ in range(count):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CX":
            c, t = rng.choice(n, 2, replace=False)
            gates.append(("CX", int(t), int(c), None))
        else:
            angle = None if kind == "H" else float(rng.uniform(-2 * np.pi, 2 * np.pi))
            gates.append((kind, int(rng.integers(n)), None, angle))
    return gates


@pytest.fixture(scope="session")
def iris_split():
    cfg = resolve_config()
    ds = load_csv()
    tr, te = stratified_split(ds.y, 0.2, cfg["seed"])
    sc = minmax_fit(ds.X[tr])
    return {
        "cfg": cfg, "dataset": ds, "train": tr, "test": te,
        "X_train": sc.transform(ds.X[tr]), "y_train": ds.y[tr],
        "X_test": sc.transform(ds.X[te]), "y_test": ds.y[te],
    }


@pytest.fixture(scope="session")
def iris_models(iris_split):
    s = iris_split
    return {k: train_model(k, s["X_train"], s["y_train"], s["cfg"], 3)
            for k in ("SVC", "QSVC", "RF", "VQC")}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        status, text = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {text}")
