"""Derivative-free minimization by linear approximation (COBYLA, unconstrained).

The method keeps ``m + 1`` interpolation points (a simplex), fits the linear
model through them, and steps to the minimizer of that model inside a trust
region. Two radii are tracked as in Powell's later implementations: ``rho``
is the resolution, decreased monotonically from ``initial_trust_radius`` to
``final_trust_radius``; ``delta >= rho`` is the trust-region radius, which
expands after productive steps and contracts after poor ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class OptimizerInputError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    kind: str = "COBYLA"
    max_iters: int = 500
    initial_trust_radius: float = 1.0
    final_trust_radius: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.kind != "COBYLA":
            raise ValueError(f"unsupported optimizer {self.kind!r}")
        if not self.final_trust_radius < self.initial_trust_radius:
            raise ValueError("final_trust_radius must be below initial_trust_radius")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    trace: list[float] = field(default_factory=list)
    nfev: int = 0
    budget_exhausted: bool = False


class _Budget(Exception):
    pass


def cobyla_minimize(
    objective: Callable[[np.ndarray], float],
    x0,
    config: OptimizerConfig | None = None,
) -> OptimizeResult:
    """Minimize ``objective`` from ``x0``.

    ``config.max_iters`` caps objective evaluations. ``trace[k]`` is the best
    value seen after ``k + 1`` evaluations, hence non-increasing. Running out
    of budget is reported through ``budget_exhausted``, not raised.
    """
    cfg = config or OptimizerConfig()
    x0 = np.array(x0, dtype=float).reshape(-1)
    m = x0.size
    if m < 1:
        raise OptimizerInputError("need at least one variable")

    trace: list[float] = []
    best = {"x": x0.copy(), "f": np.inf}

    def evaluate(x: np.ndarray) -> float:
        if len(trace) >= cfg.max_iters:
            raise _Budget
        f = float(objective(x))
        if not np.isfinite(f):
            if not trace:
                raise OptimizerInputError("objective is not finite at x0")
            f = np.inf
        if f < best["f"]:
            best["f"], best["x"] = f, x.copy()
        trace.append(best["f"])
        return f

    rho = float(cfg.initial_trust_radius)
    rho_end = float(cfg.final_trust_radius)
    delta = rho

    try:
        points = np.empty((m + 1, m))
        values = np.empty(m + 1)
        points[0] = x0
        values[0] = evaluate(x0)
        for i in range(m):
            points[i + 1] = x0
            points[i + 1, i] += rho
            values[i + 1] = evaluate(points[i + 1])

        while True:
            pole = int(np.argmin(values))
            others = [k for k in range(m + 1) if k != pole]
            sim = points[others] - points[pole]
            try:
                simi = np.linalg.inv(sim)
            except np.linalg.LinAlgError:
                simi = np.linalg.pinv(sim)
            grad = simi @ (values[others] - values[pole])
            gnorm = float(np.linalg.norm(grad))

            dist = np.linalg.norm(sim, axis=1)
            # distance of each vertex to the face spanned by the rest
            heights = 1.0 / np.maximum(np.linalg.norm(simi, axis=0), 1e-300)
            far = int(np.argmax(dist))
            thin = int(np.argmin(heights))
            geometry_ok = dist[far] <= 2.0 * delta and heights[thin] >= 0.25 * rho

            step_ok = False
            shrinking = delta > rho
            if gnorm > 0.0 and np.isfinite(gnorm):
                d = -delta * grad / gnorm
                predicted = delta * gnorm
                x_new = points[pole] + d
                f_new = evaluate(x_new)
                ratio = (values[pole] - f_new) / predicted
                dnorm = delta
                if ratio <= 0.1:
                    delta = 0.5 * delta
                elif ratio <= 0.7:
                    delta = max(0.5 * delta, dnorm)
                else:
                    delta = max(0.5 * delta, 2.0 * dnorm)
                if delta <= 1.5 * rho:
                    delta = rho
                _insert(points, values, pole, simi, x_new, f_new, rho)
                step_ok = ratio > 0.1
            else:
                # flat model: nothing to step along, go straight to the resolution
                delta, shrinking = rho, False
            if step_ok:
                continue

            if not geometry_ok:
                # replace the worst-placed vertex by a point that restores volume
                row = far if dist[far] > 2.0 * delta else thin
                j = others[row]
                direction = simi[:, row]
                direction = direction / np.linalg.norm(direction)
                if grad @ direction > 0:
                    direction = -direction
                x_geo = points[pole] + rho * direction
                points[j] = x_geo
                values[j] = evaluate(x_geo)
                continue
            if shrinking:
                continue

            if rho <= rho_end:
                break
            if rho <= 16.0 * rho_end:
                rho = rho_end
            elif rho <= 250.0 * rho_end:
                rho = float(np.sqrt(rho * rho_end))
            else:
                rho = 0.1 * rho
            delta = max(0.5 * delta, rho)
    except _Budget:
        return OptimizeResult(best["x"], best["f"], trace, len(trace), True)

    return OptimizeResult(best["x"], best["f"], trace, len(trace), False)


def _insert(points, values, pole, simi, x_new, f_new, rho) -> None:
    """Swap ``x_new`` into the simplex if it improves the point set."""
    m = points.shape[1]
    others = [k for k in range(m + 1) if k != pole]
    # barycentric weights of x_new relative to the non-pole vertices
    lam = simi.T @ (x_new - points[pole])
    best_pole = f_new < values[pole]
    dist = np.linalg.norm(points[others] - (x_new if best_pole else points[pole]), axis=1)
    score = np.abs(lam) * np.maximum(1.0, (dist / rho) ** 2)
    j = int(np.argmax(score))
    if best_pole or score[j] > 1.0:
        points[others[j]] = x_new
        values[others[j]] = f_new
