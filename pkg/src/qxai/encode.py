"""Classical-to-quantum encodings and the second-order Pauli-Z feature map."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .qsim import (
    ArityError,
    Gate,
    ParameterizedCircuit,
    StateVector,
    run_batch,
    zero_batch,
)

ENTANGLEMENTS = ("linear", "full")


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureMapSpec:
    """ZZ feature map layout: one qubit per feature."""

    num_features: int
    reps: int = 2
    entanglement: str = "linear"

    def __post_init__(self):
        if self.num_features < 1:
            raise ValueError("num_features must be >= 1")
        if not 1 <= self.reps <= 8:
            raise ValueError("reps must be in [1, 8]")
        if self.entanglement not in ENTANGLEMENTS:
            raise ValueError(f"entanglement must be one of {ENTANGLEMENTS}")

    @property
    def num_qubits(self) -> int:
        return self.num_features

    def pairs(self) -> list[tuple[int, int]]:
        n = self.num_features
        if self.entanglement == "linear":
            return [(i, i + 1) for i in range(n - 1)]
        return list(combinations(range(n), 2))

    def to_dict(self) -> dict:
        return {"num_features": self.num_features, "reps": self.reps,
                "entanglement": self.entanglement}


def basis_encode(bits: Sequence[int]) -> StateVector:
    bits = list(bits)
    if not bits:
        raise EncodingError("need at least one bit")
    index = 0
    for q, b in enumerate(bits):
        if b not in (0, 1):
            raise EncodingError(f"non-binary entry {b!r} at position {q}")
        index |= int(b) << q
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[index] = 1.0
    return StateVector(len(bits), amps)


def amplitude_encode(x: Sequence[float]) -> StateVector:
    """Zero-pad ``x`` to a power of two and normalize it into amplitudes."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise EncodingError("input must be a non-empty finite vector")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise EncodingError("cannot amplitude-encode the zero vector")
    n = max(1, int(np.ceil(np.log2(x.size))))
    amps = np.zeros(1 << n, dtype=complex)
    amps[: x.size] = x / norm
    return StateVector(n, amps)


def angle_encode(x: Sequence[float], axis: str = "Z") -> ParameterizedCircuit:
    """One rotation per qubit about ``axis`` ("Y" or "Z") by angle ``x[i]``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if axis not in ("Y", "Z"):
        raise EncodingError("axis must be 'Y' or 'Z'")
    if x.size == 0:
        raise ArityError("need at least one feature")
    kind = "R" + axis
    return ParameterizedCircuit(x.size, [Gate(kind, i, angle=float(v)) for i, v in enumerate(x)])


def pair_phase(xi, xj):
    return (np.pi - xi) * (np.pi - xj)


def zz_ops(spec: FeatureMapSpec, X: np.ndarray):
    """Gate program of the ZZ feature map for every row of ``X`` at once."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != spec.num_features:
        raise ArityError(f"expected {spec.num_features} features, got {X.shape[1]}")
    n = spec.num_features
    layer = [("H", q, None, None) for q in range(n)]
    layer += [("PHASE", q, None, 2.0 * X[:, q]) for q in range(n)]
    for i, j in spec.pairs():
        layer += [
            ("CX", j, i, None),
            ("PHASE", j, None, 2.0 * pair_phase(X[:, i], X[:, j])),
            ("CX", j, i, None),
        ]
    return layer * spec.reps


def zz_feature_map(spec: FeatureMapSpec, x: Sequence[float]) -> ParameterizedCircuit:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != spec.num_features:
        raise ArityError(f"expected {spec.num_features} features, got {x.size}")
    gates = [
        Gate(kind, t, c, None if a is None else float(np.asarray(a)[0]))
        for kind, t, c, a in zz_ops(spec, x[None, :])
    ]
    return ParameterizedCircuit(spec.num_qubits, gates)


def feature_map_states(spec: FeatureMapSpec, X: np.ndarray) -> np.ndarray:
    """Statevectors ``U(x)|0...0>`` for each row of ``X``, shape ``(rows, 2**n)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return run_batch(zero_batch(spec.num_qubits, X.shape[0]), zz_ops(spec, X))
