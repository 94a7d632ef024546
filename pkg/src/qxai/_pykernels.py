"""Pure-numpy gate kernels; same contract as the compiled ``_ckernels``."""

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _split(states: np.ndarray, target: int):
    nb, dim = states.shape
    low = 1 << target
    view = states.reshape(nb, dim // (2 * low), 2, low)
    return view[:, :, 0, :], view[:, :, 1, :]


def h(states: np.ndarray, target: int) -> None:
    a0, a1 = _split(states, target)
    s = a0 + a1
    a1 -= a0
    a1 *= -_INV_SQRT2
    a0[...] = s * _INV_SQRT2


def ry(states: np.ndarray, target: int, angles: np.ndarray) -> None:
    a0, a1 = _split(states, target)
    c = np.cos(0.5 * angles)[:, None, None]
    s = np.sin(0.5 * angles)[:, None, None]
    new0 = c * a0 - s * a1
    a1[...] = s * a0 + c * a1
    a0[...] = new0


def rz(states: np.ndarray, target: int, angles: np.ndarray) -> None:
    a0, a1 = _split(states, target)
    half = 0.5 * angles
    c = np.cos(half)
    s = np.sin(half)
    a0 *= (c - 1j * s)[:, None, None]
    a1 *= (c + 1j * s)[:, None, None]


def phase(states: np.ndarray, target: int, angles: np.ndarray) -> None:
    _, a1 = _split(states, target)
    a1 *= (np.cos(angles) + 1j * np.sin(angles))[:, None, None]


def cx(states: np.ndarray, control: int, target: int) -> None:
    nb, dim = states.shape
    idx = np.arange(dim)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    dst = src | (1 << target)
    tmp = states[:, src].copy()
    states[:, src] = states[:, dst]
    states[:, dst] = tmp
