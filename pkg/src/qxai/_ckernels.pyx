# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels acting in place on a batch of statevectors.

``states`` is a C-contiguous ``complex128`` array of shape ``(batch, 2**n)``.
Angle arguments are ``float64`` arrays of shape ``(batch,)`` so every row can
carry its own rotation angle. Qubit ``q`` is bit ``q`` of the basis index.
"""

from libc.math cimport cos, sin

ctypedef double complex cplx

cdef double _INV_SQRT2 = 0.70710678118654752440


def h(cplx[:, ::1] states, Py_ssize_t target):
    cdef Py_ssize_t b, i, j
    cdef Py_ssize_t nb = states.shape[0], dim = states.shape[1]
    cdef Py_ssize_t mask = 1 << target
    cdef cplx a0, a1
    with nogil:
        for b in range(nb):
            for i in range(dim):
                if i & mask:
                    continue
                j = i | mask
                a0 = states[b, i]
                a1 = states[b, j]
                states[b, i] = (a0 + a1) * _INV_SQRT2
                states[b, j] = (a0 - a1) * _INV_SQRT2


def ry(cplx[:, ::1] states, Py_ssize_t target, const double[::1] angles):
    cdef Py_ssize_t b, i, j
    cdef Py_ssize_t nb = states.shape[0], dim = states.shape[1]
    cdef Py_ssize_t mask = 1 << target
    cdef double c, s
    cdef cplx a0, a1
    with nogil:
        for b in range(nb):
            c = cos(0.5 * angles[b])
            s = sin(0.5 * angles[b])
            for i in range(dim):
                if i & mask:
                    continue
                j = i | mask
                a0 = states[b, i]
                a1 = states[b, j]
                states[b, i] = c * a0 - s * a1
                states[b, j] = s * a0 + c * a1


def rz(cplx[:, ::1] states, Py_ssize_t target, const double[::1] angles):
    cdef Py_ssize_t b, i
    cdef Py_ssize_t nb = states.shape[0], dim = states.shape[1]
    cdef Py_ssize_t mask = 1 << target
    cdef double c, s
    cdef cplx lo, hi
    with nogil:
        for b in range(nb):
            c = cos(0.5 * angles[b])
            s = sin(0.5 * angles[b])
            lo = c - 1j * s
            hi = c + 1j * s
            for i in range(dim):
                if i & mask:
                    states[b, i] = states[b, i] * hi
                else:
                    states[b, i] = states[b, i] * lo


def phase(cplx[:, ::1] states, Py_ssize_t target, const double[::1] angles):
    cdef Py_ssize_t b, i
    cdef Py_ssize_t nb = states.shape[0], dim = states.shape[1]
    cdef Py_ssize_t mask = 1 << target
    cdef cplx f
    with nogil:
        for b in range(nb):
            f = cos(angles[b]) + 1j * sin(angles[b])
            for i in range(dim):
                if i & mask:
                    states[b, i] = states[b, i] * f


def cx(cplx[:, ::1] states, Py_ssize_t control, Py_ssize_t target):
    cdef Py_ssize_t b, i, j
    cdef Py_ssize_t nb = states.shape[0], dim = states.shape[1]
    cdef Py_ssize_t cmask = 1 << control, tmask = 1 << target
    cdef cplx tmp
    with nogil:
        for b in range(nb):
            for i in range(dim):
                if (i & cmask) and not (i & tmask):
                    j = i | tmask
                    tmp = states[b, i]
                    states[b, i] = states[b, j]
                    states[b, j] = tmp
