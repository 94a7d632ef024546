"""Soft-margin kernel SVM trained in the dual by SMO, plus one-vs-one multiclass."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from ..encode import FeatureMapSpec
from ..qkernel import kernel_matrix
from .base import ClassifierModel, DataError


class SolverError(RuntimeError):
    pass


class DegenerateLabelsError(DataError):
    pass


def rbf_kernel(a, b, gamma: float) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.exp(-gamma * float(d @ d)))


def rbf_gram(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def scale_gamma(X: np.ndarray) -> float:
    """``1 / (p * Var(X))`` over all entries of the training matrix."""
    var = float(np.var(X))
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


@dataclass
class SvmBinaryModel:
    support_indices: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    C: float
    iterations: int = 0
    max_violation: float = 0.0

    @property
    def coef(self) -> np.ndarray:
        """``alpha_i * y_i`` for each support vector."""
        return self.alphas * self.labels


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """``sum(alpha) - 1/2 alpha^T Q alpha`` with ``Q = (y y^T) * K`` (to maximize)."""
    v = alpha * y
    return float(alpha.sum() - 0.5 * v @ K @ v)


def svm_train_binary(
    K,
    y,
    C: float = 1.0,
    tol: float = 1e-3,
    max_iter: int = 100_000,
    psd_tol: float = 1e-8,
) -> SvmBinaryModel:
    """SMO with maximal-violating-pair working-set selection.

    ``K`` is the full training Gram matrix, ``y`` holds labels in {-1, +1}.
    Stops once the KKT violation ``max_{I_up}(-y G) - min_{I_low}(-y G)``
    drops below ``tol``.
    """
    K = np.asarray(getattr(K, "entries", K), dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    n = y.size
    if K.shape != (n, n):
        raise ValueError(f"kernel shape {K.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise DegenerateLabelsError("binary SVM needs both classes")
    if C <= 0:
        raise ValueError("C must be positive")
    if np.abs(K - K.T).max() > 1e-8 or np.linalg.eigvalsh(0.5 * (K + K.T))[0] < -psd_tol * max(1.0, n):
        raise SolverError("kernel matrix is not symmetric positive semidefinite")

    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a^T Q a - e^T a
    tau = 1e-12
    it = 0
    gap = np.inf
    while it < max_iter:
        minus_yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(minus_yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(minus_yg[low])])
        gap = minus_yg[i] - minus_yg[j]
        if gap < tol:
            break
        it += 1
        # LIBSVM two-variable update on (i, j)
        a = K[i, i] + K[j, j] - 2.0 * K[i, j]
        a = max(a, tau)
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / a
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0 and aj < 0:
                aj, ai = 0.0, diff
            elif diff <= 0 and ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0 and ai > C:
                ai, aj = C, C - diff
            elif diff <= 0 and aj > C:
                aj, ai = C, C + diff
        else:
            delta = (grad[i] - grad[j]) / a
            total = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if total > C and ai > C:
                ai, aj = C, total - C
            elif total <= C and aj < 0:
                aj, ai = 0.0, total
            if total > C and aj > C:
                aj, ai = C, total - C
            elif total <= C and ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        grad += Q[:, i] * (ai - old_i) + Q[:, j] * (aj - old_j)

    bias = _bias(y, grad, alpha, C)
    sv = np.flatnonzero(alpha > 0)
    return SvmBinaryModel(sv, alpha[sv].copy(), y[sv].copy(), bias, C, it, float(gap))


def _bias(y, grad, alpha, C) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        ub, lb = np.inf, -np.inf
        for t in range(y.size):
            at_upper, at_lower = alpha[t] >= C, alpha[t] <= 0
            if (at_upper and y[t] < 0) or (at_lower and y[t] > 0):
                ub = min(ub, yg[t])
            else:
                lb = max(lb, yg[t])
        rho = 0.5 * (ub + lb)
    return -rho


def svm_decision(model: SvmBinaryModel, k_row) -> np.ndarray | float:
    """``f(x) = sum_i alpha_i y_i k(x, x_i) + b``; ``k_row`` is aligned with the support set.

    Accepts one row (returns a float) or a 2-D block ``(samples, n_support)``.
    """
    k = np.asarray(k_row, dtype=float)
    if k.shape[-1] != model.support_indices.size:
        raise ValueError(
            f"kernel row has {k.shape[-1]} entries, support set has {model.support_indices.size}"
        )
    out = k @ model.coef + model.bias
    return float(out) if k.ndim == 1 else out


# --- one-vs-one -----------------------------------------------------------


@dataclass
class OvoSvm(ClassifierModel):
    """One binary SVM per class pair over a shared training set.

    ``pairs[k] = (a, b)`` is trained with class ``a`` as +1. The kernel is
    either RBF (``gamma``) or the fidelity quantum kernel (``feature_map``).
    """

    kind: str = "SVC"
    X_train: np.ndarray = field(default=None, repr=False)
    num_classes: int = 0
    pairs: list = field(default_factory=list)
    binaries: list = field(default_factory=list)
    gamma: float | None = None
    feature_map: FeatureMapSpec | None = None
    metadata: dict = field(default_factory=dict)

    def kernel(self, X: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
        B = self.X_train if B is None else B
        if self.feature_map is not None:
            return kernel_matrix(self.feature_map, X, B, method="overlap").entries
        return rbf_gram(X, B, self.gamma)

    def decision_function(self, X) -> np.ndarray:
        """Binary decision values, one column per class pair."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        used = sorted({int(i) for m in self.binaries for i in m.support_indices})
        Kx = self.kernel(X, self.X_train[used]) if used else np.zeros((X.shape[0], 0))
        pos = {i: c for c, i in enumerate(used)}
        out = np.empty((X.shape[0], len(self.binaries)))
        for k, m in enumerate(self.binaries):
            cols = [pos[int(i)] for i in m.support_indices]
            out[:, k] = svm_decision(m, Kx[:, cols]) if cols else m.bias
        return out

    def scores(self, X) -> np.ndarray:
        """Votes plus a tie-breaking confidence squashed into (-1/3, 1/3)."""
        dec = self.decision_function(X)
        votes = np.zeros((dec.shape[0], self.num_classes))
        conf = np.zeros_like(votes)
        for k, (a, b) in enumerate(self.pairs):
            win_a = dec[:, k] > 0
            votes[:, a] += win_a
            votes[:, b] += ~win_a
            conf[:, a] += dec[:, k]
            conf[:, b] -= dec[:, k]
        return votes + conf / (3.0 * (np.abs(conf) + 1.0))

    def predict_proba(self, X) -> np.ndarray:
        s = self.scores(X)
        e = np.exp(s - s.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)


def ovo_train(
    X,
    y,
    C: float = 1.0,
    *,
    gamma: float | None = None,
    feature_map: FeatureMapSpec | None = None,
    num_classes: int | None = None,
    gram: Callable | np.ndarray | None = None,
    workers: int = 1,
) -> OvoSvm:
    """Train one-vs-one SVMs with an RBF or fidelity-quantum kernel.

    ``gamma=None`` with no feature map selects ``1 / (p * Var(X))``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).reshape(-1)
    k = int(num_classes if num_classes is not None else y.max() + 1)
    classes = np.arange(k)
    counts = np.bincount(y, minlength=k)
    if np.count_nonzero(counts) < 2:
        raise DegenerateLabelsError("need at least two classes")
    if np.any(counts[counts > 0] < 2):
        raise DataError("every class needs at least 2 training samples")

    if feature_map is not None:
        kind = "QSVC"
        G = gram if gram is not None else kernel_matrix(feature_map, X, workers=workers).entries
    else:
        kind = "SVC"
        gamma = scale_gamma(X) if gamma is None else float(gamma)
        G = rbf_gram(X, X, gamma)

    pairs, binaries = [], []
    for a, b in combinations([c for c in classes if counts[c] > 0], 2):
        idx = np.flatnonzero((y == a) | (y == b))
        yy = np.where(y[idx] == a, 1.0, -1.0)
        m = svm_train_binary(G[np.ix_(idx, idx)], yy, C)
        m.support_indices = idx[m.support_indices]
        pairs.append((int(a), int(b)))
        binaries.append(m)
    meta = {"C": C, "gamma": gamma, "feature_map": feature_map.to_dict() if feature_map else None}
    return OvoSvm(kind=kind, X_train=X, num_classes=k, pairs=pairs, binaries=binaries,
                  gamma=gamma, feature_map=feature_map, metadata=meta)
