import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qxai.optimize import OptimizerConfig, OptimizerInputError, cobyla_minimize


def rosenbrock(v):
    x, y = v
    return (1 - x) ** 2 + 100 * (y - x * x) ** 2


def assert_monotone(trace):
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_parabola():
    r = cobyla_minimize(lambda v: (v[0] - 3) ** 2, [0.0])
    assert abs(r.x[0] - 3) < 1e-4
    assert_monotone(r.trace)
    assert not r.budget_exhausted


def test_bowl():
    r = cobyla_minimize(lambda v: v[0] ** 2 + v[1] ** 2, [1.0, 1.0])
    assert r.fun <= 1e-6
    assert_monotone(r.trace)


def test_rosenbrock_against_grid_oracle():
    g = np.linspace(-2, 2, 401)
    X, Y = np.meshgrid(g, g)
    F = (1 - X) ** 2 + 100 * (Y - X**2) ** 2
    k = np.unravel_index(np.argmin(F), F.shape)
    grid_best = np.array([X[k], Y[k]])
    r = cobyla_minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iters=2000))
    assert r.fun < 1e-2
    assert np.linalg.norm(r.x - grid_best) < 0.3
    assert_monotone(r.trace)


def test_budget_is_a_flag_not_an_error():
    r = cobyla_minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iters=25))
    assert r.budget_exhausted and r.nfev == 25 == len(r.trace)
    assert r.fun == min(r.trace) == rosenbrock(r.x)


def test_flat_objective_terminates():
    r = cobyla_minimize(lambda v: 1.0, [0.0, 0.0, 0.0])
    assert not r.budget_exhausted and r.fun == 1.0


def test_input_errors():
    with pytest.raises(OptimizerInputError):
        cobyla_minimize(lambda v: np.nan, [0.0])
    with pytest.raises(OptimizerInputError):
        cobyla_minimize(lambda v: 0.0, [])
    with pytest.raises(ValueError):
        OptimizerConfig(initial_trust_radius=1e-5, final_trust_radius=1e-4)
    with pytest.raises(ValueError):
        OptimizerConfig(kind="SLSQP")


def test_non_finite_after_start_is_treated_as_bad():
    f = lambda v: np.inf if v[0] > 0.5 else (v[0] + 1) ** 2
    r = cobyla_minimize(f, [0.0])
    assert abs(r.x[0] + 1) < 1e-3 and np.isfinite(r.fun)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_random_quadratics(m, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, m))
    H = A @ A.T + 0.5 * np.eye(m)
    c = rng.uniform(-2, 2, m)
    f = lambda v: float((v - c) @ H @ (v - c))
    r = cobyla_minimize(f, np.zeros(m), OptimizerConfig(max_iters=3000))
    assert_monotone(r.trace)
    assert r.fun <= f(np.zeros(m))
    assert r.fun < 1e-5
