"""Fidelity quantum kernel via compute-uncompute, and Gram-matrix assembly."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encode import FeatureMapSpec, feature_map_states, zz_ops
from .qsim import ArityError, inverse_ops, run_batch


class KernelSizeError(ValueError):
    pass


@dataclass(frozen=True)
class KernelMatrix:
    entries: np.ndarray
    symmetric: bool = False

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.entries + self.entries.T)
        return float(np.linalg.eigvalsh(sym)[0])

    def to_csv(self, path) -> None:
        """Row-major, header-free, full round-trip precision."""
        lines = [",".join(repr(float(v)) for v in row) for row in self.entries]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, symmetric: bool = False) -> "KernelMatrix":
        rows = [
            [float(v) for v in line.split(",")]
            for line in Path(path).read_text().splitlines()
            if line.strip()
        ]
        return cls(np.array(rows), symmetric)


def _as_samples(spec: FeatureMapSpec, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise KernelSizeError("empty sample set")
    if X.shape[1] != spec.num_features:
        raise ArityError(f"expected {spec.num_features} features, got {X.shape[1]}")
    return X


def _uncompute_row(spec: FeatureMapSpec, x: np.ndarray, B: np.ndarray) -> np.ndarray:
    """All-zeros probability of ``U(b)^dagger U(x)|0>`` for every row ``b`` of ``B``."""
    start = feature_map_states(spec, x[None, :])
    states = np.repeat(start, B.shape[0], axis=0)
    out = run_batch(states, inverse_ops(zz_ops(spec, B)))
    return out[:, 0].real ** 2 + out[:, 0].imag ** 2


def fidelity(spec: FeatureMapSpec, x_i, x_j) -> float:
    xi = np.asarray(x_i, dtype=float).reshape(-1)
    xj = np.asarray(x_j, dtype=float).reshape(-1)
    if xi.size != spec.num_features or xj.size != spec.num_features:
        raise ArityError(f"expected {spec.num_features} features")
    return float(_uncompute_row(spec, xi, xj[None, :])[0])


def kernel_matrix(
    spec: FeatureMapSpec,
    A,
    B=None,
    *,
    method: str = "compute_uncompute",
    workers: int = 1,
) -> KernelMatrix:
    """Fidelity Gram matrix between the rows of ``A`` and ``B``.

    With ``B`` omitted the matrix is symmetric over ``A``; only the upper
    triangle is computed and mirrored. ``method="overlap"`` computes every
    statevector once and takes squared inner products, which agrees with
    compute-uncompute to rounding error and is much cheaper for large
    prediction batches.
    """
    A = _as_samples(spec, A)
    symmetric = B is None
    Bm = A if symmetric else _as_samples(spec, B)

    if method == "overlap":
        SA = feature_map_states(spec, A)
        SB = SA if symmetric else feature_map_states(spec, Bm)
        K = np.abs(SA.conj() @ SB.T) ** 2
        if symmetric:
            K = np.triu(K) + np.triu(K, 1).T
        return KernelMatrix(K, symmetric)
    if method != "compute_uncompute":
        raise ValueError(f"unknown kernel method {method!r}")

    K = np.empty((A.shape[0], Bm.shape[0]))

    def row(i: int) -> None:
        lo = i if symmetric else 0
        K[i, lo:] = _uncompute_row(spec, A[i], Bm[lo:])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(row, range(A.shape[0])))
    else:
        for i in range(A.shape[0]):
            row(i)
    if symmetric:
        K = np.triu(K) + np.triu(K, 1).T
    return KernelMatrix(K, symmetric)
