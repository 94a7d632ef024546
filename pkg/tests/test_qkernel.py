import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qxai.encode import FeatureMapSpec
from qxai.qkernel import KernelMatrix, KernelSizeError, fidelity, kernel_matrix
from qxai.qsim import ArityError
from conftest import zz_state_oracle


def direct_fidelity(spec, a, b):
    pa = zz_state_oracle(a, spec.reps, spec.pairs())
    pb = zz_state_oracle(b, spec.reps, spec.pairs())
    return abs(np.vdot(pa, pb)) ** 2


def test_self_fidelity_is_one():
    spec = FeatureMapSpec(4)
    x = np.array([0.1, 0.5, 0.9, 0.3])
    assert abs(fidelity(spec, x, x) - 1) < 1e-10


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_single_feature_closed_form(a, b):
    assert abs(fidelity(FeatureMapSpec(1, 1), [a], [b]) - np.cos(a - b) ** 2) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("ent", ["linear", "full"])
def test_compute_uncompute_matches_direct_overlap(n, ent):
    rng = np.random.default_rng(n)
    spec = FeatureMapSpec(n, 2, ent)
    for _ in range(25):
        a, b = rng.uniform(0, 1, (2, n))
        assert abs(fidelity(spec, a, b) - direct_fidelity(spec, a, b)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fidelity_symmetric(seed):
    rng = np.random.default_rng(seed)
    spec = FeatureMapSpec(3, 2, "full")
    a, b = rng.uniform(0, 1, (2, 3))
    assert abs(fidelity(spec, a, b) - fidelity(spec, b, a)) < 1e-10


def test_small_gram_properties():
    spec = FeatureMapSpec(2)
    A = np.array([[0.1, 0.2], [0.5, 0.5], [0.9, 0.3]])
    K = kernel_matrix(spec, A)
    assert K.symmetric and (K.rows, K.cols) == (3, 3)
    np.testing.assert_array_equal(K.entries, K.entries.T)
    np.testing.assert_allclose(np.diag(K.entries), 1, atol=1e-10)
    one = kernel_matrix(spec, A[:1], A[:1].copy())
    np.testing.assert_allclose(one.entries, [[1.0]], atol=1e-10)


def test_rectangular_and_methods_agree():
    rng = np.random.default_rng(9)
    spec = FeatureMapSpec(4)
    A, B = rng.uniform(size=(7, 4)), rng.uniform(size=(5, 4))
    K1 = kernel_matrix(spec, A, B)
    K2 = kernel_matrix(spec, A, B, method="overlap")
    assert not K1.symmetric and K1.entries.shape == (7, 5)
    np.testing.assert_allclose(K1.entries, K2.entries, atol=1e-12)
    oracle = np.array([[direct_fidelity(spec, a, b) for b in B] for a in A])
    np.testing.assert_allclose(K1.entries, oracle, atol=1e-10)


def test_workers_do_not_change_result():
    rng = np.random.default_rng(2)
    X = rng.uniform(size=(20, 4))
    spec = FeatureMapSpec(4)
    serial = kernel_matrix(spec, X).entries
    parallel = kernel_matrix(spec, X, workers=4).entries
    assert serial.tobytes() == parallel.tobytes()


def test_errors():
    spec = FeatureMapSpec(2)
    with pytest.raises(KernelSizeError):
        kernel_matrix(spec, np.empty((0, 2)))
    with pytest.raises(ArityError):
        kernel_matrix(spec, np.zeros((2, 3)))
    with pytest.raises(ArityError):
        fidelity(spec, [0.1], [0.2, 0.3])
    with pytest.raises(ValueError):
        kernel_matrix(spec, np.zeros((2, 2)), method="swap")


def test_csv_round_trip(tmp_path):
    K = kernel_matrix(FeatureMapSpec(2), np.random.default_rng(0).uniform(size=(4, 2)))
    K.to_csv(tmp_path / "k.csv")
    text = (tmp_path / "k.csv").read_text()
    assert len(text.splitlines()) == 4 and not text[0].isalpha()
    assert KernelMatrix.from_csv(tmp_path / "k.csv").entries.tobytes() == K.entries.tobytes()


def test_iris_gram(iris_split):
    K = kernel_matrix(FeatureMapSpec(4, 2), iris_split["X_train"])
    E = K.entries
    assert E.shape == (120, 120)
    assert np.abs(E - E.T).max() <= 1e-10
    assert np.abs(np.diag(E) - 1).max() <= 1e-10
    assert K.min_eigenvalue() >= -1e-8
    assert E.min() >= -1e-12 and E.max() <= 1 + 1e-10
