# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Same contract as ftqc._kernels_py: flat complex128 amplitude arrays of
length 2**n, qubit j = bit j of the index, updates in place, deterministic
iteration order.
"""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "cython"

ctypedef cnp.complex128_t cplx


def apply_1q(cnp.ndarray[cplx, ndim=1] amps, int n, int q,
             cnp.ndarray[cplx, ndim=2] m):
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << q
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t size = amps.shape[0]
    cdef double complex m00 = m[0, 0], m01 = m[0, 1], m10 = m[1, 0], m11 = m[1, 1]
    cdef Py_ssize_t base, lo, i0, i1
    cdef double complex a0, a1
    for base in range(0, size, block):
        for lo in range(stride):
            i0 = base + lo
            i1 = i0 + stride
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1
    return amps


def apply_diag_1q(cnp.ndarray[cplx, ndim=1] amps, int n, int q,
                  double complex d0, double complex d1):
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << q
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t base, lo, i0
    for base in range(0, size, block):
        for lo in range(stride):
            i0 = base + lo
            amps[i0] = amps[i0] * d0
            amps[i0 + stride] = amps[i0 + stride] * d1
    return amps


def apply_cnot(cnp.ndarray[cplx, ndim=1] amps, int n, int control, int target):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t cbit = (<Py_ssize_t>1) << control
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t idx, j
    cdef double complex tmp
    for idx in range(size):
        if (idx & cbit) and not (idx & tbit):
            j = idx | tbit
            tmp = amps[idx]
            amps[idx] = amps[j]
            amps[j] = tmp
    return amps


def apply_toffoli(cnp.ndarray[cplx, ndim=1] amps, int n, int c1, int c2, int target):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t cbits = ((<Py_ssize_t>1) << c1) | ((<Py_ssize_t>1) << c2)
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t idx, j
    cdef double complex tmp
    for idx in range(size):
        if ((idx & cbits) == cbits) and not (idx & tbit):
            j = idx | tbit
            tmp = amps[idx]
            amps[idx] = amps[j]
            amps[j] = tmp
    return amps


def apply_phase_on_ones(cnp.ndarray[cplx, ndim=1] amps, int n, object mask_obj,
                        double complex phase):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t mask = <Py_ssize_t>mask_obj
    cdef Py_ssize_t idx
    for idx in range(size):
        if (idx & mask) == mask:
            amps[idx] = amps[idx] * phase
    return amps


def prob_one(cnp.ndarray[cplx, ndim=1] amps, int n, int q):
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << q
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t base, lo, i1
    cdef double total = 0.0
    cdef double complex a
    for base in range(0, size, block):
        for lo in range(stride):
            i1 = base + lo + stride
            a = amps[i1]
            total += a.real * a.real + a.imag * a.imag
    return total


def collapse(cnp.ndarray[cplx, ndim=1] amps, int n, int q, int outcome, double prob):
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << q
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t base, lo, idx
    cdef Py_ssize_t off = 0 if outcome == 1 else stride
    cdef double scale = 1.0 / np.sqrt(prob)
    for base in range(0, size, block):
        for lo in range(stride):
            amps[base + lo + off] = 0.0
    for idx in range(size):
        amps[idx] = amps[idx] * scale
    return amps
